#include <doctest.h>

#include "fpa/error.hpp"
#include "fpa/io.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fpa;
using support::R;
using support::Rs;

namespace {

void check_instance_round_trip(const Instance& inst) {
    std::string text = io::dump(io::to_json(inst));
    Instance back = io::parse_instance(text);
    CHECK(io::dump(io::to_json(back)) == text);
    CHECK(validate(back).ok());
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Usage;
}

}  // namespace

TEST_CASE("instances round-trip byte-identically") {
    check_instance_round_trip(support::three_point());
    check_instance_round_trip(support::load<DfpaInstance>("three_point.dfpa.json"));
    check_instance_round_trip(support::load<IidInstance>("uniform2.cfpa.json"));

    oracle::Rng rng(21);
    for (int t = 0; t < 10; ++t) {
        check_instance_round_trip(oracle::random_dfpa(rng, 3, 4, 3));
        check_instance_round_trip(oracle::random_sym_dfpa(rng, {2, 1}, 4, 3));
        check_instance_round_trip(BoxInstance{oracle::random_bids(rng, 4), oracle::random_apv_boxes(rng, 2, 2, t % 2 == 0)});
    }
    auto loaded = support::load<DfpaInstance>("three_point.dfpa.json");
    CHECK(loaded.prior.support.size() == 3);
    CHECK(loaded.bids.size() == 11);
}

TEST_CASE("strategy files round-trip") {
    Instance inst = support::three_point();
    auto text = io::read_file(support::fixture("nonmono.pure.json"));
    auto profile = io::parse_profile(text, inst);
    const auto& pure = std::get<PureProfile>(profile);
    CHECK(pure.strategies[0].bid == std::vector<int>{0, 3, 1});
    auto dumped = io::dump(io::to_json(profile, inst));
    CHECK(io::dump(io::to_json(io::parse_profile(dumped, inst), inst)) == dumped);

    oracle::Rng rng(4);
    auto dfpa = oracle::random_dfpa(rng, 3, 4, 3);
    Instance any = dfpa;
    io::AnyProfile mixed = oracle::random_mixed(rng, dfpa.prior.value_spaces, dfpa.bids.size());
    auto mt = io::dump(io::to_json(mixed, any));
    auto mixed_back = std::get<MixedProfile>(io::parse_profile(mt, any));
    CHECK(mixed_back.strategies[0].dist == std::get<MixedProfile>(mixed).strategies[0].dist);

    JumpProfile jp;
    jp.symmetric = true;
    jp.strategies.push_back(oracle::random_jump(rng, dfpa.bids));
    auto jt = io::dump(io::to_json(io::AnyProfile(jp), any));
    CHECK(std::get<JumpProfile>(io::parse_profile(jt, any)).strategies[0].x == jp.strategies[0].x);
}

TEST_CASE("malformed documents are rejected with the right category") {
    CHECK(kind_of([] { io::parse_instance("{\"kind\": \"dfpa\""); }) == ErrorKind::Parse);
    CHECK(kind_of([] { io::parse_instance("{\"kind\": \"auction\"}"); }) == ErrorKind::Parse);
    CHECK(kind_of([] {
              io::parse_instance(R"({"kind":"cfpa-iid","bids":["0"],"n":2,"breakpoints":["0","1"],"densities":["1"],"extra":1})");
          }) == ErrorKind::Parse);
    CHECK(kind_of([] {
              io::parse_instance(R"({"kind":"cfpa-iid","bids":["0"],"n":2,"breakpoints":["0","1"],"densities":["0.5"]})");
          }) == ErrorKind::Parse);
    // Parsing is structural; mass checks belong to validation.
    auto light = io::parse_instance(R"({"kind":"cfpa-iid","bids":["0"],"n":2,"breakpoints":["0","1"],"densities":["1/2"]})");
    CHECK_FALSE(validate(light).ok());
    CHECK(kind_of([&] { require_valid(validate(light), "instance"); }) == ErrorKind::Validation);
    Instance inst = support::three_point();
    CHECK(kind_of([&] { io::parse_profile(R"({"kind":"pure","profile":[{"0":"0"}]})", inst); }) == ErrorKind::Validation);
    CHECK(kind_of([&] {
              io::parse_profile(R"({"kind":"pure","profile":[{"0":"0","1/2":"1/4","1":"0"},{"0":"0","1/2":"0","1":"0"}]})", inst);
          }) == ErrorKind::Validation);
    CHECK(kind_of([] { io::read_file("/nonexistent/file.json"); }) == ErrorKind::Io);
}
