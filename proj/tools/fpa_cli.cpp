// Command-line front end. Every verb reads instance and strategy documents,
// runs one library operation and prints a JSON report on stdout.
//
// Exit codes: 0 ok, 1 verification failed, 2 search found nothing, 3 usage,
// 4 I/O, 5 parse, 6 validation, 7 budget or unsupported mode, 8 domain or
// other error. Errors are reported on stderr as {"error": kind, "message": ...}.

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "fpa/densify.hpp"
#include "fpa/engine.hpp"
#include "fpa/error.hpp"
#include "fpa/io.hpp"
#include "fpa/model.hpp"
#include "fpa/reduce.hpp"
#include "fpa/search.hpp"

namespace {

using fpa::Rational;
using fpa::io::Json;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitNone = 2;
constexpr int kExitUsage = 3;

int exit_code(fpa::ErrorKind kind) {
    switch (kind) {
        case fpa::ErrorKind::Usage: return kExitUsage;
        case fpa::ErrorKind::Io: return 4;
        case fpa::ErrorKind::Parse: return 5;
        case fpa::ErrorKind::Validation: return 6;
        case fpa::ErrorKind::Budget:
        case fpa::ErrorKind::Unsupported: return 7;
        case fpa::ErrorKind::Domain: return 8;
    }
    return 8;
}

void report_error(const std::string& kind, const std::string& message) {
    Json j;
    j["error"] = kind;
    j["message"] = message;
    std::cerr << j.dump() << "\n";
}

// Writes `text` to `path`, or to stdout when the path is empty.
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
    } else {
        fpa::io::write_file(path, text);
    }
}

fpa::Instance load_instance(const std::string& path) { return fpa::io::parse_instance(fpa::io::read_file(path)); }

fpa::io::AnyProfile load_profile(const std::string& path, const fpa::Instance& inst) {
    return fpa::io::parse_profile(fpa::io::read_file(path), inst);
}

Rational parse_rational(const std::string& s, const std::string& what) {
    try {
        return Rational::parse(s);
    } catch (const fpa::Error& e) {
        fpa::fail(fpa::ErrorKind::Parse, what + ": " + e.what());
    }
}

std::vector<Rational> parse_list(const std::string& s, const std::string& what) {
    std::vector<Rational> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_rational(tok, what));
    return out;
}

fpa::Exec exec_of(bool serial) { return serial ? fpa::Exec::Serial : fpa::Exec::Parallel; }

fpa::MixedProfile as_mixed(const fpa::io::AnyProfile& p, int bids) {
    if (const auto* m = std::get_if<fpa::MixedProfile>(&p)) return *m;
    if (const auto* q = std::get_if<fpa::PureProfile>(&p)) {
        fpa::MixedProfile out;
        out.symmetric = q->symmetric;
        for (const auto& s : q->strategies) out.strategies.push_back(fpa::to_mixed(s, bids));
        return out;
    }
    fpa::fail(fpa::ErrorKind::Validation, "a pure or mixed profile is required for a discrete instance");
}

const fpa::JumpProfile& as_jump(const fpa::io::AnyProfile& p) {
    const auto* j = std::get_if<fpa::JumpProfile>(&p);
    if (!j) fpa::fail(fpa::ErrorKind::Validation, "a jump profile is required for a continuous instance");
    return *j;
}

// Continuous instances as box densities (IID marginals become one symmetric group).
fpa::BoxInstance as_boxes(const fpa::Instance& inst) {
    if (const auto* b = std::get_if<fpa::BoxInstance>(&inst)) return *b;
    if (const auto* i = std::get_if<fpa::IidInstance>(&inst)) return fpa::iid_to_boxes(*i);
    fpa::fail(fpa::ErrorKind::Validation, "a continuous instance (cfpa-box or cfpa-iid) is required");
}

Json verify_json(const fpa::VerifyReport& r, const fpa::BidSpace& bids) {
    Json j;
    j["ok"] = r.ok;
    j["epsilon"] = r.epsilon.str();
    j["worst_gain"] = r.worst_gain.str();
    Json v = Json::array();
    for (const auto& x : r.violations) {
        Json e;
        e["bidder"] = x.bidder;
        e["value"] = x.value.str();
        e["deviation"] = bids[x.deviation].str();
        e["gain"] = x.gain.str();
        v.push_back(e);
    }
    j["violations"] = v;
    return j;
}

Json br_json(const fpa::BestResponseReport& r, const fpa::BidSpace& bids) {
    Json j;
    Json arg = Json::array();
    for (int k : r.argmax) arg.push_back(bids[k].str());
    j["argmax"] = arg;
    j["best_utility"] = r.best_utility.str();
    j["margin"] = r.margin ? Json(r.margin->str()) : Json(nullptr);
    return j;
}

Json marginal_json(const fpa::IIDMarginal& m) {
    Json j;
    j["breakpoints"] = fpa::io::to_json(m.breakpoints);
    j["densities"] = fpa::io::to_json(m.densities);
    return j;
}

Json chain_json(const fpa::DeltaChain& c) {
    Json j;
    j["kind"] = "reduction-params";
    j["delta_not"] = c.not_.str();
    j["delta_proj"] = c.proj.str();
    j["delta_or1"] = c.or1.str();
    j["delta_or2"] = c.or2.str();
    j["delta_out"] = c.out.str();
    j["Delta"] = c.delta.str();
    j["eps_threshold"] = c.eps_threshold.str();
    Json b = Json::object();
    for (const auto& [name, v] : c.eps_bounds) b[name] = v.str();
    j["eps_bounds"] = b;
    return j;
}

std::optional<fpa::DeltaChain> load_chain(const std::string& path) {
    if (path.empty()) return std::nullopt;
    Json j;
    try {
        j = Json::parse(fpa::io::read_file(path));
    } catch (const Json::parse_error& e) {
        fpa::fail(fpa::ErrorKind::Parse, path + ": " + e.what());
    }
    fpa::io::check_fields(j, {"kind", "delta_not", "delta_proj", "delta_or1", "delta_or2", "delta_out"},
                          {"Delta", "eps_threshold", "eps_bounds"}, "params file");
    fpa::DeltaChain c;
    c.not_ = fpa::io::rational_from(j["delta_not"], "delta_not");
    c.proj = fpa::io::rational_from(j["delta_proj"], "delta_proj");
    c.or1 = fpa::io::rational_from(j["delta_or1"], "delta_or1");
    c.or2 = fpa::io::rational_from(j["delta_or2"], "delta_or2");
    c.out = fpa::io::rational_from(j["delta_out"], "delta_out");
    return c;
}

Json map_json(const fpa::ReductionMap& m) {
    Json j;
    j["kind"] = "reduction-map";
    Json roles = Json::array();
    for (std::size_t b = 0; b < m.roles.size(); ++b) {
        const auto& r = m.roles[b];
        Json e;
        e["bidder"] = b;
        e["role"] = fpa::role_name(r.role);
        if (r.variable >= 0) e["variable"] = r.variable + 1;
        if (r.clause >= 0) e["clause"] = r.clause + 1;
        if (r.literal >= 0) e["literal"] = r.literal + 1;
        roles.push_back(e);
    }
    j["roles"] = roles;
    return j;
}

std::vector<bool> parse_assignment(const std::string& s, int variables) {
    std::vector<bool> a;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "1" || tok == "true") {
            a.push_back(true);
        } else if (tok == "0" || tok == "false") {
            a.push_back(false);
        } else {
            fpa::fail(fpa::ErrorKind::Parse, "assignment entries must be 0 or 1, got '" + tok + "'");
        }
    }
    if (static_cast<int>(a.size()) != variables) {
        fpa::fail(fpa::ErrorKind::Validation, "assignment has " + std::to_string(a.size()) + " entries for " +
                                                  std::to_string(variables) + " variables");
    }
    return a;
}

std::string fmt_double(const Rational& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", r.to_double());
    return buf;
}

template <class F>
void set_bids(fpa::Instance& inst, F&& f) {
    std::visit([&](auto& x) { x.bids = f(x.bids); }, inst);
}

struct Options {
    std::string instance, profile, out, cnf, params_in, certificate, plot, log, grid, assignment, out_dir;
    std::string eps = "0", value, bid, delta;
    int bidder = 0, M = 0, mesh = 2, samples = 100;
    std::uint64_t budget = 50'000'000;
    bool raw = false, serial = false, monotone = false, allow_overbidding = false, minimize = false,
         symmetric = false, beta = false;
};

int run(CLI::App& app, const Options& o) {
    const std::string verb = app.get_subcommands().front()->get_name();
    const auto norm = o.raw ? fpa::Normalization::Raw : fpa::Normalization::Interim;

    if (verb == "validate") {
        fpa::Instance inst = load_instance(o.instance);
        fpa::ValidationReport rep = fpa::validate(inst);
        if (rep.ok() && !o.profile.empty()) load_profile(o.profile, inst);
        Json j;
        j["ok"] = rep.ok();
        j["violations"] = rep.violations;
        std::cout << fpa::io::dump(j);
        return rep.ok() ? 0 : 6;
    }

    if (verb == "marginal") {
        fpa::Instance inst = load_instance(o.instance);
        fpa::require_valid(fpa::validate(inst), "instance");
        Json j;
        j["bidder"] = o.bidder;
        if (const auto* d = std::get_if<fpa::DfpaInstance>(&inst)) {
            if (o.bidder < 0 || o.bidder >= d->prior.n) fpa::fail(fpa::ErrorKind::Domain, "bidder out of range");
            Json m = Json::object();
            auto pmf = fpa::marginal(d->prior, o.bidder);
            const auto& space = d->prior.value_spaces[static_cast<std::size_t>(o.bidder)];
            for (std::size_t k = 0; k < pmf.size(); ++k) m[space[k].str()] = pmf[k].str();
            j["pmf"] = m;
        } else if (const auto* s = std::get_if<fpa::SymDfpaInstance>(&inst)) {
            if (o.bidder < 0 || o.bidder >= s->prior.n()) fpa::fail(fpa::ErrorKind::Domain, "bidder out of range");
            Json m = Json::object();
            auto pmf = fpa::marginal(s->prior, o.bidder);
            const auto& space = s->prior.value_spaces[static_cast<std::size_t>(s->prior.group_of(o.bidder))];
            for (std::size_t k = 0; k < pmf.size(); ++k) m[space[k].str()] = pmf[k].str();
            j["pmf"] = m;
        } else {
            fpa::BoxInstance b = as_boxes(inst);
            if (o.bidder < 0 || o.bidder >= b.density.n) fpa::fail(fpa::ErrorKind::Domain, "bidder out of range");
            j["density"] = marginal_json(fpa::marginal(b.density, o.bidder));
        }
        std::cout << fpa::io::dump(j);
        return 0;
    }

    if (verb == "utility" || verb == "best-response") {
        fpa::Instance inst = load_instance(o.instance);
        fpa::require_valid(fpa::validate(inst), "instance");
        auto any = load_profile(o.profile, inst);
        Rational v = parse_rational(o.value, "--value");
        const fpa::BidSpace& bids = fpa::io::bid_space(inst);
        Json j;
        if (verb == "utility") {
            Rational b = parse_rational(o.bid, "--bid");
            Rational win, u;
            if (const auto* d = std::get_if<fpa::DfpaInstance>(&inst)) {
                auto p = as_mixed(any, bids.size());
                win = fpa::win_prob_dfpa(*d, o.bidder, v, b, p);
                u = fpa::utility_dfpa(*d, o.bidder, v, b, p, norm);
            } else if (const auto* s = std::get_if<fpa::SymDfpaInstance>(&inst)) {
                auto p = as_mixed(any, bids.size());
                if (p.symmetric) {
                    win = fpa::win_prob_dfpa_symmetric(*s, o.bidder, v, b, p);
                    u = fpa::utility_dfpa_symmetric(*s, o.bidder, v, b, p, norm);
                } else {
                    auto e = fpa::expand_symmetric(*s);
                    win = fpa::win_prob_dfpa(e, o.bidder, v, b, p);
                    u = fpa::utility_dfpa(e, o.bidder, v, b, p, norm);
                }
            } else {
                fpa::BoxInstance box = as_boxes(inst);
                const auto& p = as_jump(any);
                win = fpa::win_prob_cfpa(box, o.bidder, v, b, p);
                u = p.symmetric && box.density.symmetric()
                        ? fpa::utility_cfpa_symmetric(box, o.bidder, v, b, p, norm)
                        : fpa::utility_cfpa(box, o.bidder, v, b, p, norm);
            }
            j["win_prob"] = win.str();
            j["utility"] = u.str();
        } else {
            fpa::BestResponseReport r;
            bool nob = !o.allow_overbidding;
            if (const auto* d = std::get_if<fpa::DfpaInstance>(&inst)) {
                r = fpa::best_response(*d, o.bidder, v, as_mixed(any, bids.size()), norm, nob);
            } else if (const auto* s = std::get_if<fpa::SymDfpaInstance>(&inst)) {
                auto p = as_mixed(any, bids.size());
                r = p.symmetric ? fpa::best_response(*s, o.bidder, v, p, norm, nob)
                                : fpa::best_response(fpa::expand_symmetric(*s), o.bidder, v, p, norm, nob);
            } else {
                r = fpa::best_response(as_boxes(inst), o.bidder, v, as_jump(any), norm, nob);
            }
            j = br_json(r, bids);
        }
        std::cout << fpa::io::dump(j);
        return 0;
    }

    if (verb == "verify") {
        fpa::Instance inst = load_instance(o.instance);
        fpa::require_valid(fpa::validate(inst), "instance");
        auto any = load_profile(o.profile, inst);
        Rational eps = parse_rational(o.eps, "--eps");
        const fpa::BidSpace& bids = fpa::io::bid_space(inst);
        const fpa::Exec ex = exec_of(o.serial);
        fpa::VerifyReport r;
        if (const auto* d = std::get_if<fpa::DfpaInstance>(&inst)) {
            if (const auto* p = std::get_if<fpa::PureProfile>(&any)) {
                r = fpa::verify_pbne(*d, *p, eps, ex);
            } else {
                r = fpa::verify_mbne(*d, as_mixed(any, bids.size()), eps, ex);
            }
        } else if (const auto* s = std::get_if<fpa::SymDfpaInstance>(&inst)) {
            const auto* p = std::get_if<fpa::PureProfile>(&any);
            if (p && p->symmetric) {
                r = fpa::verify_pbne(*s, *p, eps, ex);
            } else if (p) {
                r = fpa::verify_pbne(fpa::expand_symmetric(*s), *p, eps, ex);
            } else {
                auto m = as_mixed(any, bids.size());
                r = m.symmetric ? fpa::verify_mbne(*s, m, eps, ex)
                                : fpa::verify_mbne(fpa::expand_symmetric(*s), m, eps, ex);
            }
        } else if (const auto* iid = std::get_if<fpa::IidInstance>(&inst)) {
            r = fpa::verify_pbne(*iid, as_jump(any), eps, ex);
        } else {
            r = fpa::verify_pbne(std::get<fpa::BoxInstance>(inst), as_jump(any), eps, ex);
        }
        std::cout << fpa::io::dump(verify_json(r, bids));
        return r.ok ? 0 : kExitVerifyFailed;
    }

    if (verb == "solve-pure" || verb == "solve-symmetric" || verb == "jump-search") {
        fpa::Instance inst = load_instance(o.instance);
        fpa::SearchConfig cfg;
        cfg.eps = parse_rational(o.eps, "--eps");
        cfg.monotone_only = o.monotone;
        cfg.no_overbidding = !o.allow_overbidding;
        cfg.symmetric = o.symmetric;
        cfg.budget = o.budget;
        cfg.minimize = o.minimize;
        cfg.exec = exec_of(o.serial);
        cfg.log = !o.log.empty();
        Json j;
        fpa::io::AnyProfile found;
        bool ok = false;
        std::uint64_t candidates = 0;
        Rational worst;
        std::vector<fpa::SearchRecord> log;
        auto take = [&](auto res) {
            ok = res.found;
            candidates = res.candidates;
            worst = res.worst_gain;
            log = std::move(res.log);
            if (ok) found = res.profile;
        };
        if (verb == "solve-pure") {
            const auto* d = std::get_if<fpa::DfpaInstance>(&inst);
            if (!d) fpa::fail(fpa::ErrorKind::Validation, "solve-pure needs a dfpa instance");
            take(fpa::enumerate_pure_equilibria(*d, cfg));
        } else if (verb == "solve-symmetric") {
            const auto* s = std::get_if<fpa::SymDfpaInstance>(&inst);
            if (!s) fpa::fail(fpa::ErrorKind::Validation, "solve-symmetric needs a dfpa-sym instance");
            take(fpa::enumerate_symmetric_pure(*s, cfg));
        } else {
            std::vector<Rational> grid;
            if (!o.grid.empty()) {
                grid = parse_list(o.grid, "--grid");
            } else {
                grid = fpa::default_jump_grid(as_boxes(inst), o.mesh);
            }
            if (const auto* iid = std::get_if<fpa::IidInstance>(&inst)) {
                take(fpa::jump_grid_search(*iid, grid, cfg));
            } else if (const auto* b = std::get_if<fpa::BoxInstance>(&inst)) {
                take(fpa::jump_grid_search(*b, grid, cfg));
            } else {
                fpa::fail(fpa::ErrorKind::Validation, "jump-search needs a continuous instance");
            }
        }
        j["found"] = ok;
        j["candidates"] = candidates;
        if (ok) {
            j["worst_gain"] = worst.str();
            j["profile"] = fpa::io::to_json(found, inst);
            if (!o.out.empty()) fpa::io::write_file(o.out, fpa::io::dump(fpa::io::to_json(found, inst)));
        }
        if (!o.log.empty()) {
            std::string csv = "hash,pass,worst_gain\n";
            for (const auto& r : log) {
                csv += std::to_string(r.hash) + "," + (r.pass ? "1" : "0") + "," + r.worst_gain.str() + "\n";
            }
            fpa::io::write_file(o.log, csv);
        }
        std::cout << fpa::io::dump(j);
        return ok ? 0 : kExitNone;
    }

    if (verb == "shrink") {
        fpa::Instance inst = load_instance(o.instance);
        fpa::require_valid(fpa::validate(inst), "instance");
        fpa::ShrunkSpace s = fpa::shrink_bidspace(fpa::io::bid_space(inst), o.M);
        set_bids(inst, [&](const fpa::BidSpace&) { return s.bids; });
        if (!o.out.empty()) fpa::io::write_file(o.out, fpa::io::dump(fpa::io::to_json(inst)));
        Json j;
        j["M"] = s.M;
        j["guarantee"] = s.guarantee.str();
        j["bids"] = fpa::io::to_json(s.bids.bids);
        std::cout << fpa::io::dump(j);
        return 0;
    }

    if (verb == "from-sat" || verb == "encode" || verb == "extract") {
        fpa::SatFormula f = fpa::parse_sat(fpa::io::read_file(o.cnf));
        fpa::Reduction r = fpa::build_auction(f, load_chain(o.params_in));
        fpa::Instance inst = r.instance;
        if (verb == "from-sat") {
            std::filesystem::path dir = o.out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out_dir);
            std::string stem = std::filesystem::path(o.cnf).stem().string();
            std::string ipath = (dir / (stem + ".dfpa.json")).string();
            std::string mpath = (dir / (stem + ".map.json")).string();
            std::string ppath = (dir / (stem + ".params.json")).string();
            fpa::io::write_file(ipath, fpa::io::dump(fpa::io::to_json(inst)));
            fpa::io::write_file(mpath, fpa::io::dump(map_json(r.map)));
            fpa::io::write_file(ppath, fpa::io::dump(chain_json(r.map.chain)));
            Json j;
            j["bidders"] = r.instance.prior.n;
            j["support_points"] = r.instance.prior.support.size();
            j["instance"] = ipath;
            j["map"] = mpath;
            j["params"] = ppath;
            j["eps_threshold"] = r.map.chain.eps_threshold.str();
            std::cout << fpa::io::dump(j);
            return 0;
        }
        if (verb == "encode") {
            auto a = parse_assignment(o.assignment, f.variables);
            fpa::PureProfile p = fpa::encode_profile(a, f, r.map);
            emit(o.out, fpa::io::dump(fpa::io::to_json(fpa::io::AnyProfile{p}, inst)));
            return 0;
        }
        auto any = load_profile(o.profile, inst);
        const auto* p = std::get_if<fpa::PureProfile>(&any);
        if (!p || p->symmetric) fpa::fail(fpa::ErrorKind::Validation, "extract needs a per-bidder pure profile");
        auto a = fpa::extract_assignment(*p, r.map);
        Json j;
        if (a) {
            std::vector<int> bits(a->begin(), a->end());
            j["assignment"] = bits;
            j["satisfies"] = fpa::satisfies(f, *a);
        } else {
            j["assignment"] = "non-encoding";
        }
        std::cout << fpa::io::dump(j);
        return 0;
    }

    if (verb == "lift" || verb == "project") {
        fpa::Instance inst = load_instance(o.instance);
        Rational delta = parse_rational(o.delta, "--delta");
        fpa::LiftResult lift;
        if (const auto* d = std::get_if<fpa::DfpaInstance>(&inst)) {
            lift = fpa::lift_dfpa_to_cfpa(*d, delta);
        } else if (const auto* s = std::get_if<fpa::SymDfpaInstance>(&inst)) {
            lift = fpa::lift_dfpa_to_cfpa(*s, delta);
        } else {
            fpa::fail(fpa::ErrorKind::Validation, verb + " needs a discrete instance");
        }
        fpa::Instance lifted = lift.instance;
        if (verb == "lift") {
            if (!o.out.empty()) fpa::io::write_file(o.out, fpa::io::dump(fpa::io::to_json(lifted)));
            Json j;
            j["delta"] = lift.delta.str();
            j["value_scale"] = lift.value_scale.str();
            j["extra_loss"] = lift.extra_loss.str();
            j["boxes"] = lift.instance.density.boxes.size();
            if (o.out.empty()) j["instance"] = fpa::io::to_json(lifted);
            std::cout << fpa::io::dump(j);
            return 0;
        }
        auto any = load_profile(o.profile, lifted);
        const auto& jp = as_jump(any);
        fpa::MixedProfile m = fpa::project_strategy(jp, fpa::io::slot_values(inst, jp.symmetric), lift);
        emit(o.out, fpa::io::dump(fpa::io::to_json(fpa::io::AnyProfile{m}, inst)));
        return 0;
    }

    if (verb == "densify") {
        fpa::Instance inst = load_instance(o.instance);
        Rational eps = o.eps == "0" ? fpa::default_densify_eps() : parse_rational(o.eps, "--eps");
        fpa::DensifyCertificate c;
        std::optional<fpa::CanonicalBeta> beta;
        if (const auto* iid = std::get_if<fpa::IidInstance>(&inst)) {
            c = fpa::densify_solve(*iid, eps, exec_of(o.serial));
            beta.emplace(iid->marginal, iid->n);
        } else if (const auto* b = std::get_if<fpa::BoxInstance>(&inst)) {
            c = fpa::densify_solve(*b, eps, exec_of(o.serial));
            beta.emplace(b->density);
        } else {
            fpa::fail(fpa::ErrorKind::Validation, "densify needs a continuous instance");
        }
        fpa::JumpProfile p{{c.strategy}, true};
        if (!o.out.empty()) fpa::io::write_file(o.out, fpa::io::dump(fpa::io::to_json(fpa::io::AnyProfile{p}, inst)));
        Json cert;
        cert["kind"] = "densify-certificate";
        cert["eps"] = c.eps.str();
        cert["delta"] = c.bounds.delta.str();
        cert["gamma"] = c.bounds.gamma.str();
        cert["phi_lo"] = c.bounds.phi_lo.str();
        cert["phi_hi"] = c.bounds.phi_hi.str();
        cert["lipschitz"] = c.bounds.lipschitz.str();
        cert["v_lo"] = c.bounds.v_lo.str();
        cert["claimed"] = c.claimed.str();
        cert["measured"] = c.measured.str();
        cert["ok"] = c.ok;
        cert["thresholds"] = fpa::io::to_json(c.strategy.x);
        if (!o.certificate.empty()) fpa::io::write_file(o.certificate, fpa::io::dump(cert));
        if (!o.plot.empty()) {
            std::string csv = "v,beta,beta_tilde\n";
            for (int k = 0; k <= o.samples; ++k) {
                Rational v = Rational(k) / Rational(o.samples);
                if (v < beta->support_low()) continue;
                const Rational& bid = fpa::io::bid_space(inst)[fpa::jump_bid_index(c.strategy, v)];
                csv += fmt_double(v) + "," + fmt_double((*beta)(v)) + "," + fmt_double(bid) + "\n";
            }
            fpa::io::write_file(o.plot, csv);
        }
        std::cout << fpa::io::dump(cert);
        return c.ok ? 0 : kExitVerifyFailed;
    }

    if (verb == "check-affiliation") {
        fpa::Instance inst = load_instance(o.instance);
        fpa::require_valid(fpa::validate(inst), "instance");
        fpa::AffiliationReport r;
        if (const auto* d = std::get_if<fpa::DfpaInstance>(&inst)) {
            r = fpa::check_affiliation(d->prior);
        } else if (const auto* s = std::get_if<fpa::SymDfpaInstance>(&inst)) {
            r = fpa::check_affiliation(s->prior);
        } else {
            r = fpa::check_affiliation(as_boxes(inst).density);
        }
        Json j;
        j["affiliated"] = r.affiliated;
        if (!r.affiliated) {
            j["v"] = fpa::io::to_json(r.v);
            j["w"] = fpa::io::to_json(r.w);
        }
        std::cout << fpa::io::dump(j);
        return r.affiliated ? 0 : kExitVerifyFailed;
    }

    if (verb == "emit-plot") {
        fpa::Instance inst = load_instance(o.instance);
        const auto loaded = load_profile(o.profile, inst);
        const auto& jp = as_jump(loaded);
        if (o.bidder < 0 || o.bidder >= static_cast<int>(jp.strategies.size())) {
            fpa::fail(fpa::ErrorKind::Domain, "strategy slot out of range");
        }
        const auto& s = jp.of(o.bidder);
        const fpa::BidSpace& bids = fpa::io::bid_space(inst);
        std::vector<Rational> vs;
        for (int k = 0; k <= o.samples; ++k) vs.push_back(Rational(k) / Rational(o.samples));
        vs.insert(vs.end(), s.x.begin(), s.x.end());
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        std::optional<fpa::CanonicalBeta> beta;
        if (o.beta) {
            if (const auto* iid = std::get_if<fpa::IidInstance>(&inst)) {
                beta.emplace(iid->marginal, iid->n);
            } else {
                beta.emplace(as_boxes(inst).density);
            }
        }
        std::string csv = beta ? "v,beta,beta_tilde\n" : "v,bid\n";
        for (const auto& v : vs) {
            const Rational& bid = bids[fpa::jump_bid_index(s, v)];
            if (beta) {
                if (v < beta->support_low()) continue;
                csv += v.str() + "," + (*beta)(v).str() + "," + bid.str() + "\n";
            } else {
                csv += v.str() + "," + bid.str() + "\n";
            }
        }
        emit(o.out, csv);
        return 0;
    }
    fpa::fail(fpa::ErrorKind::Usage, "unknown verb " + verb);
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* t = std::getenv("FPA_THREADS")) {
        int k = std::atoi(t);
        if (k > 0) omp_set_num_threads(k);
    }
    CLI::App app{"Exact equilibrium tools for first-price auctions"};
    app.require_subcommand(1);
    Options o;

    auto add_instance = [&](CLI::App* c) { c->add_option("--instance", o.instance, "instance file")->required(); };
    auto add_profile = [&](CLI::App* c) { c->add_option("--profile", o.profile, "strategy file")->required(); };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "output file (stdout when omitted)"); };
    auto add_serial = [&](CLI::App* c) { c->add_flag("--serial", o.serial, "use the serial reference kernels"); };

    auto* validate = app.add_subcommand("validate", "check an instance (and optionally a strategy file)");
    add_instance(validate);
    validate->add_option("--profile", o.profile, "strategy file");

    auto* marginal = app.add_subcommand("marginal", "marginal distribution of one bidder");
    add_instance(marginal);
    marginal->add_option("--bidder", o.bidder, "bidder index")->required();

    for (const char* name : {"utility", "best-response"}) {
        auto* c = app.add_subcommand(name, std::string(name) == "utility" ? "winning probability and utility of a bid"
                                                                           : "best responses of a bidder at a value");
        add_instance(c);
        add_profile(c);
        c->add_option("--bidder", o.bidder, "bidder index")->required();
        c->add_option("--value", o.value, "value (p/q)")->required();
        if (std::string(name) == "utility") {
            c->add_option("--bid", o.bid, "bid (p/q)")->required();
        } else {
            c->add_flag("--allow-overbidding", o.allow_overbidding, "consider bids above the value");
        }
        c->add_flag("--raw", o.raw, "report f_i(v)-weighted utilities");
    }

    auto* verify = app.add_subcommand("verify", "check an approximate equilibrium exactly");
    add_instance(verify);
    add_profile(verify);
    verify->add_option("--eps", o.eps, "tolerance (p/q)");
    add_serial(verify);

    for (const char* name : {"solve-pure", "solve-symmetric", "jump-search"}) {
        auto* c = app.add_subcommand(name, "exhaustive equilibrium search");
        add_instance(c);
        add_out(c);
        add_serial(c);
        c->add_option("--eps", o.eps, "tolerance (p/q)");
        c->add_option("--budget", o.budget, "maximal number of candidate profiles");
        c->add_flag("--allow-overbidding", o.allow_overbidding, "include overbidding strategies");
        c->add_flag("--minimize", o.minimize, "return the candidate with the smallest worst gain");
        c->add_option("--log", o.log, "CSV log of every checked candidate");
        if (std::string(name) == "jump-search") {
            c->add_option("--mesh", o.mesh, "subdivisions per interval of the default grid");
            c->add_option("--grid", o.grid, "comma-separated thresholds grid");
            c->add_flag("--symmetric", o.symmetric, "one strategy per symmetry group");
        } else {
            c->add_flag("--monotone", o.monotone, "restrict to monotone strategies");
        }
    }

    auto* shrink = app.add_subcommand("shrink", "coarsen the bid space to at most M buckets");
    add_instance(shrink);
    add_out(shrink);
    shrink->add_option("--M", o.M, "number of grid points (>= 2)")->required();

    auto* from_sat = app.add_subcommand("from-sat", "build the auction of a 2/3-SAT formula");
    from_sat->add_option("cnf", o.cnf, "DIMACS file")->required();
    from_sat->add_option("--out-dir", o.out_dir, "directory for the instance, map and params files");
    from_sat->add_option("--params-in", o.params_in, "delta chain to use instead of the defaults");

    auto* encode = app.add_subcommand("encode", "profile encoding a truth assignment");
    encode->add_option("--cnf", o.cnf, "DIMACS file")->required();
    encode->add_option("--assignment", o.assignment, "comma-separated 0/1 per variable")->required();
    encode->add_option("--params-in", o.params_in, "delta chain");
    add_out(encode);

    auto* extract = app.add_subcommand("extract", "truth assignment encoded by a profile");
    extract->add_option("--cnf", o.cnf, "DIMACS file")->required();
    extract->add_option("--params-in", o.params_in, "delta chain");
    add_profile(extract);

    auto* lift = app.add_subcommand("lift", "continuous box-density lift of a discrete instance");
    add_instance(lift);
    add_out(lift);
    lift->add_option("--delta", o.delta, "requested cube side (p/q)")->required();

    auto* project = app.add_subcommand("project", "project a lifted jump profile back to mixed strategies");
    add_instance(project);
    add_profile(project);
    add_out(project);
    project->add_option("--delta", o.delta, "requested cube side used for the lift (p/q)")->required();

    auto* densify = app.add_subcommand("densify", "step strategy following the canonical equilibrium");
    add_instance(densify);
    add_out(densify);
    add_serial(densify);
    densify->add_option("--eps", o.eps, "inversion tolerance (p/q, default 2^-40)");
    densify->add_option("--certificate", o.certificate, "certificate file");
    densify->add_option("--plot", o.plot, "CSV samples v,beta,beta_tilde");
    densify->add_option("--samples", o.samples, "plot resolution");

    auto* aff = app.add_subcommand("check-affiliation", "test the affiliation (MTP2) inequality");
    add_instance(aff);

    auto* plot = app.add_subcommand("emit-plot", "CSV staircase of a jump strategy");
    add_instance(plot);
    add_profile(plot);
    add_out(plot);
    plot->add_option("--slot", o.bidder, "strategy slot");
    plot->add_option("--samples", o.samples, "grid resolution");
    plot->add_flag("--beta", o.beta, "add the canonical equilibrium column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what());
        return kExitUsage;
    }
    try {
        return run(app, o);
    } catch (const fpa::Error& e) {
        report_error(fpa::to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        report_error("other", e.what());
        return 8;
    }
}
