#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(FPA_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fx(const char* name) { return support::fixture(name); }

fs::path scratch(const char* name) {
    fs::path dir = fs::temp_directory_path() / ("fpa_cli_" + std::string(name));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli verify and validate") {
    auto ok = run("verify --instance " + fx("three_point.dfpa.json") + " --profile " + fx("nonmono.pure.json") + " --eps 0");
    CHECK(ok.code == 0);
    auto j = json::parse(ok.out);
    CHECK(j["ok"] == true);
    CHECK(j["worst_gain"] == "0");

    auto val = run("validate --instance " + fx("three_point.dfpa.json") + " --profile " + fx("nonmono.pure.json"));
    CHECK(val.code == 0);
}

TEST_CASE("cli error categories map to exit codes") {
    CHECK(run("verify").code == 3);
    CHECK(run("no-such-verb").code == 3);
    CHECK(run("verify --instance /nonexistent/x.json --profile x --eps 0").code == 4);
    CHECK(run("verify --instance " + fx("three_point.dfpa.json") + " --profile " + fx("nonmono.pure.json") + " --eps 0.5")
              .code == 5);
    auto dir = scratch("errors");
    std::ofstream(dir / "bad.json") << R"({"kind":"cfpa-iid","bids":["0"],"n":2,"breakpoints":["0","1"],"densities":["1/2"]})";
    CHECK(run("verify --instance " + (dir / "bad.json").string() + " --profile x --eps 0").code == 6);
    // Mass 1/2 also makes validate report failure.
    CHECK(run("validate --instance " + (dir / "bad.json").string()).code == 6);
}

TEST_CASE("cli search exit codes") {
    auto none = run("solve-pure --instance " + fx("three_point.dfpa.json") + " --monotone --eps 1/100");
    CHECK(none.code == 2);
    CHECK(json::parse(none.out)["candidates"] == 2601);
    auto some = run("solve-pure --instance " + fx("three_point.dfpa.json") + " --eps 0");
    CHECK(some.code == 0);
    auto budget = run("solve-pure --instance " + fx("three_point.dfpa.json") + " --monotone --budget 10");
    CHECK(budget.code == 7);
}

TEST_CASE("cli reduction round trip") {
    auto dir = scratch("sat");
    auto r = run("from-sat " + fx("tiny.cnf") + " --out-dir " + dir.string());
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "tiny.dfpa.json"));
    CHECK(fs::exists(dir / "tiny.map.json"));
    CHECK(fs::exists(dir / "tiny.params.json"));

    auto enc = run("encode --cnf " + fx("tiny.cnf") + " --assignment 1,1,0 --params-in " + (dir / "tiny.params.json").string() +
                   " --out " + (dir / "enc.json").string());
    CHECK(enc.code == 0);
    auto ext = run("extract --cnf " + fx("tiny.cnf") + " --profile " + (dir / "enc.json").string());
    CHECK(ext.code == 0);
    auto j = json::parse(ext.out);
    CHECK(j["assignment"] == json::array({1, 1, 0}));
    CHECK(j["satisfies"] == true);

    auto bad = run("encode --cnf " + fx("tiny.cnf") + " --assignment 1,0");
    CHECK(bad.code != 0);
}

TEST_CASE("cli densify and plots") {
    auto dir = scratch("densify");
    auto args = "densify --instance " + fx("uniform2.cfpa.json") + " --eps 1/1099511627776 --out " +
                (dir / "s.json").string() + " --certificate " + (dir / "c.json").string() + " --plot " +
                (dir / "p.csv").string() + " --samples 20";
    auto r = run(args);
    CHECK(r.code == 0);
    auto cert = json::parse(slurp(dir / "c.json"));
    CHECK(cert["ok"] == true);
    CHECK(cert["gamma"] == "2");
    auto csv = slurp(dir / "p.csv");
    CHECK(csv.rfind("v,beta,beta_tilde\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);

    // Same output on a second run.
    auto again = run(args);
    CHECK(again.out == r.out);
    CHECK(run(args + " --serial").out == r.out);

    auto plot = run("emit-plot --instance " + fx("uniform2.cfpa.json") + " --profile " + (dir / "s.json").string() +
                    " --samples 4");
    CHECK(plot.code == 0);
    CHECK(plot.out.rfind("v,bid\n", 0) == 0);
    // Every threshold of the strategy appears as a sample row.
    auto strat = json::parse(slurp(dir / "s.json"));
    for (const auto& x : strat["profile"][0]) CHECK(plot.out.find("\n" + x.get<std::string>() + ",") != std::string::npos);
    auto with_beta = run("emit-plot --instance " + fx("uniform2.cfpa.json") + " --profile " +
                         (dir / "s.json").string() + " --samples 4 --beta");
    CHECK(with_beta.out.rfind("v,beta,beta_tilde\n", 0) == 0);
    CHECK(with_beta.out.find("\n1/2,1/4,") != std::string::npos);
}

TEST_CASE("cli affiliation, shrink and marginals") {
    auto aff = run("check-affiliation --instance " + fx("three_point.dfpa.json"));
    CHECK(aff.code == 1);
    CHECK(json::parse(aff.out)["affiliated"] == false);

    auto sh = run("shrink --instance " + fx("three_point.dfpa.json") + " --M 3");
    CHECK(sh.code == 0);

    auto m = run("marginal --instance " + fx("three_point.dfpa.json") + " --bidder 0");
    CHECK(m.code == 0);
    CHECK(m.out.find("1/3") != std::string::npos);
}
