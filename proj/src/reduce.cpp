#include "fpa/reduce.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "fpa/error.hpp"

namespace fpa {

namespace {

std::size_t at(int k) { return static_cast<std::size_t>(k); }

const Rational kMid{23, 64};

// One unnormalised support point: bidder -> value (others are 0), constant.
struct MassPoint {
    std::map<int, Rational> values;
    Rational c;
};

DfpaInstance normalise(int n, const std::vector<MassPoint>& points, Rational* delta_out) {
    Rational delta{0};
    for (const auto& p : points) delta = delta + p.c;
    DfpaInstance inst;
    inst.bids = reduction_bids();
    inst.prior.n = n;
    inst.prior.value_spaces.assign(at(n), reduction_values());
    for (const auto& p : points) {
        SupportPoint sp{std::vector<Rational>(at(n), Rational{0}), p.c / delta};
        for (const auto& [bidder, v] : p.values) sp.values[at(bidder)] = v;
        inst.prior.support.push_back(std::move(sp));
    }
    if (delta_out) *delta_out = delta;
    return inst;
}

void input_points(std::vector<MassPoint>& pts, int hub, const std::array<int, 3>& copies) {
    for (int c : copies) pts.push_back({{{c, kMid}}, Rational{33, 128}});
    for (int c : copies) pts.push_back({{{hub, kMid}, {c, kMid}}, Rational{2}});
    for (int c : copies) pts.push_back({{{hub, kMid}, {c, Rational{1}}}, Rational{1}});
}

void not_points(std::vector<MassPoint>& pts, int in, int self, const Rational& d) {
    pts.push_back({{{self, kMid}}, Rational{33, 256} * d});
    pts.push_back({{{self, Rational{1}}}, d});
    pts.push_back({{{in, Rational{1}}, {self, kMid}}, d});
    pts.push_back({{{in, Rational{1}}, {self, Rational{1}}}, d});
}

void proj_points(std::vector<MassPoint>& pts, int in, int self, const Rational& d) {
    pts.push_back({{{self, kMid}}, Rational{33, 256} * d});
    pts.push_back({{{in, kMid}, {self, kMid}}, d});
    pts.push_back({{{in, kMid}, {self, Rational{1}}}, d});
}

void or_points(std::vector<MassPoint>& pts, int a, int b, int self, const Rational& d) {
    pts.push_back({{{self, kMid}}, d / Rational{128}});
    for (int in : {a, b}) {
        pts.push_back({{{in, kMid}, {self, kMid}}, d});
        pts.push_back({{{in, kMid}, {self, Rational{1}}}, d});
    }
}

void out_points(std::vector<MassPoint>& pts, int in, int k, int l, const Rational& d) {
    pts.push_back({{{k, Rational{1}}}, d});
    pts.push_back({{{l, Rational{1}}}, d});
    pts.push_back({{{in, kMid}, {k, Rational{1}}, {l, Rational{1}}}, Rational{3, 4} * d});
}

struct Layout {
    int n = 0;
    ReductionMap map;
    std::vector<MassPoint> points;
};

Layout layout(const SatFormula& f, const DeltaChain& ch) {
    Layout out;
    auto& map = out.map;
    auto add = [&](Role r, int var, int clause, int lit) {
        map.roles.push_back({r, var, clause, lit});
        return out.n++;
    };
    for (int x = 0; x < f.variables; ++x) {
        std::array<int, 4> ids{};
        ids[0] = add(Role::InputHub, x, -1, -1);
        ids[1] = add(Role::InputJ, x, -1, -1);
        ids[2] = add(Role::InputK, x, -1, -1);
        ids[3] = add(Role::InputL, x, -1, -1);
        map.inputs.push_back(ids);
        input_points(out.points, ids[0], {ids[1], ids[2], ids[3]});
    }
    std::vector<int> used(at(f.variables), 0);
    for (int c = 0; c < static_cast<int>(f.clauses.size()); ++c) {
        const auto& clause = f.clauses[at(c)];
        ClauseGadget g;
        for (int li = 0; li < static_cast<int>(clause.size()); ++li) {
            const Literal& lit = clause[at(li)];
            int copy = map.inputs[at(lit.var)][at(1 + used[at(lit.var)]++)];
            if (!lit.negated) {
                g.literal_bidders.push_back(copy);
                g.not_bidders.push_back(-1);
                g.proj_bidders.push_back(-1);
                continue;
            }
            int nb = add(Role::Not, lit.var, c, li);
            int pb = add(Role::Proj, lit.var, c, li);
            not_points(out.points, copy, nb, ch.not_);
            proj_points(out.points, nb, pb, ch.proj);
            g.literal_bidders.push_back(pb);
            g.not_bidders.push_back(nb);
            g.proj_bidders.push_back(pb);
        }
        if (clause.size() == 3) {
            g.or1 = add(Role::Or1, -1, c, -1);
            or_points(out.points, g.literal_bidders[0], g.literal_bidders[1], g.or1, ch.or1);
            g.or2 = add(Role::Or2, -1, c, -1);
            or_points(out.points, g.or1, g.literal_bidders[2], g.or2, ch.or2);
        } else {
            g.or2 = add(Role::Or2, -1, c, -1);
            or_points(out.points, g.literal_bidders[0], g.literal_bidders[1], g.or2, ch.or2);
        }
        g.out_k = add(Role::OutK, -1, c, -1);
        g.out_l = add(Role::OutL, -1, c, -1);
        out_points(out.points, g.or2, g.out_k, g.out_l, ch.out);
        map.clauses.push_back(std::move(g));
    }
    return out;
}

Rational min_gap(std::vector<Rational> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    Rational g{1};
    for (std::size_t k = 1; k < pts.size(); ++k) g = std::min(g, pts[k] - pts[k - 1]);
    return g;
}

// Chooses the applied δ and the value scale for the lift.
void lift_parameters(const BidSpace& bids, const std::vector<std::vector<Rational>>& spaces, const Rational& requested,
                     LiftResult& out) {
    if (requested.sign() <= 0) fail(ErrorKind::Domain, "lift: delta must be positive, got " + requested.str());
    std::vector<Rational> values;
    bool has_one = false;
    for (const auto& s : spaces) {
        for (const auto& v : s) {
            values.push_back(v);
            if (v == Rational{1}) has_one = true;
        }
    }
    std::vector<Rational> all = bids.bids;
    all.insert(all.end(), values.begin(), values.end());
    Rational gamma{0};
    if (has_one) gamma = min_gap(all) / Rational{4};
    Rational scale = Rational{1} - gamma;
    std::vector<Rational> scaled = bids.bids;
    Rational top{0};
    for (const auto& v : values) {
        scaled.push_back(scale * v);
        top = std::max(top, scale * v);
    }
    Rational bound = std::min(min_gap(scaled), Rational{1} - top);
    out.delta = requested < bound ? requested : bound / Rational{2};
    out.value_scale = scale;
    out.extra_loss = gamma;
}

}  // namespace

// --- formulas ---------------------------------------------------------------

SatFormula parse_sat(const std::string& text) {
    SatFormula f;
    std::istringstream in(text);
    std::string line;
    std::vector<Literal> current;
    int declared = -1;
    int max_var = 0;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "c" || tok[0] == 'c' || tok[0] == '%') continue;
        if (tok == "p") {
            std::string fmt;
            int v = 0, c = 0;
            if (!(ls >> fmt >> v >> c) || fmt != "cnf" || v < 0 || c < 0) {
                fail(ErrorKind::Parse, "cnf line " + std::to_string(line_no) + ": malformed header");
            }
            declared = v;
            continue;
        }
        do {
            long lit = 0;
            std::size_t used = 0;
            try {
                lit = std::stol(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) {
                fail(ErrorKind::Parse, "cnf line " + std::to_string(line_no) + ": bad literal '" + tok + "'");
            }
            if (lit == 0) {
                f.clauses.push_back(current);
                current.clear();
                continue;
            }
            int var = static_cast<int>(lit < 0 ? -lit : lit);
            max_var = std::max(max_var, var);
            current.push_back({var - 1, lit < 0});
        } while (ls >> tok);
    }
    if (!current.empty()) f.clauses.push_back(current);
    if (declared >= 0 && max_var > declared) {
        fail(ErrorKind::Parse, "cnf: variable " + std::to_string(max_var) + " exceeds declared count " +
                                   std::to_string(declared));
    }
    f.variables = std::max(declared, max_var);
    validate_formula(f);
    return f;
}

void validate_formula(const SatFormula& f) {
    std::vector<int> count(at(f.variables), 0);
    for (std::size_t c = 0; c < f.clauses.size(); ++c) {
        const auto& clause = f.clauses[c];
        if (clause.size() != 2 && clause.size() != 3) {
            fail(ErrorKind::Validation, "clause " + std::to_string(c + 1) + " has " + std::to_string(clause.size()) +
                                            " literals (expected 2 or 3)");
        }
        for (const auto& lit : clause) {
            if (lit.var < 0 || lit.var >= f.variables) {
                fail(ErrorKind::Validation, "clause " + std::to_string(c + 1) + " uses an undeclared variable");
            }
            if (++count[at(lit.var)] > 3) {
                fail(ErrorKind::Validation,
                     "variable " + std::to_string(lit.var + 1) + " occurs more than 3 times");
            }
        }
    }
}

bool satisfies(const SatFormula& f, const std::vector<bool>& a) {
    if (static_cast<int>(a.size()) != f.variables) fail(ErrorKind::Domain, "assignment size mismatch");
    return std::all_of(f.clauses.begin(), f.clauses.end(), [&](const std::vector<Literal>& clause) {
        return std::any_of(clause.begin(), clause.end(),
                           [&](const Literal& l) { return a[at(l.var)] != l.negated; });
    });
}

// --- parameters -------------------------------------------------------------

void finish_chain(DeltaChain& ch, const Rational& delta) {
    ch.delta = delta;
    ch.eps_bounds = {
        {"input", (Rational{33, 896} - Rational{2} * ch.not_) / delta},
        {"not", (Rational{33, 1792} * ch.not_ - Rational{2} * ch.proj) / delta},
        {"proj", (Rational{33, 1792} * ch.proj - Rational{2} * ch.or1) / delta},
        {"or1", (Rational{1, 896} * ch.or1 - Rational{2} * ch.or2) / delta},
        {"or2", (Rational{1, 896} * ch.or2 - Rational{3, 4} * ch.out) / delta},
        {"out", ch.out / (Rational{56} * delta)},
    };
    ch.eps_threshold = ch.eps_bounds.front().second;
    for (const auto& [name, b] : ch.eps_bounds) ch.eps_threshold = std::min(ch.eps_threshold, b);
}

void check_ladder(const DeltaChain& ch) {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) fail(ErrorKind::Validation, "delta chain violates " + what);
    };
    need(ch.not_.sign() > 0 && ch.proj.sign() > 0 && ch.or1.sign() > 0 && ch.or2.sign() > 0 && ch.out.sign() > 0,
         "positivity");
    need(ch.not_ < Rational{33, 1792}, "delta_not < 33/1792");
    need(ch.proj < Rational{33, 3584} * ch.not_, "delta_proj < (33/3584) delta_not");
    need(ch.or1 < Rational{33, 3584} * ch.proj, "delta_or1 < (33/3584) delta_proj");
    need(ch.or2 < Rational{1, 1792} * ch.or1, "delta_or2 < (1/1792) delta_or1");
    need(ch.out < Rational{1, 672} * ch.or2, "delta_out < (1/672) delta_or2");
}

DeltaChain default_deltas(const SatFormula& f) {
    DeltaChain ch;
    ch.not_ = Rational{33, 3584};
    ch.proj = Rational{33, 3584} * ch.not_ / Rational{2};
    ch.or1 = Rational{33, 3584} * ch.proj / Rational{2};
    ch.or2 = ch.or1 / Rational{3584};
    ch.out = ch.or2 / Rational{1344};
    Layout l = layout(f, ch);
    Rational delta{0};
    for (const auto& p : l.points) delta = delta + p.c;
    finish_chain(ch, delta);
    return ch;
}

const char* role_name(Role r) {
    switch (r) {
        case Role::InputHub: return "input-i";
        case Role::InputJ: return "input-j";
        case Role::InputK: return "input-k";
        case Role::InputL: return "input-l";
        case Role::Not: return "not";
        case Role::Proj: return "proj";
        case Role::Or1: return "or1";
        case Role::Or2: return "or2";
        case Role::OutK: return "out-k";
        case Role::OutL: return "out-l";
    }
    return "?";
}

BidSpace reduction_bids() { return BidSpace{{Rational{0}, Rational{1, 7}, Rational{2, 7}, Rational{3, 7}}}; }
std::vector<Rational> reduction_values() { return {Rational{0}, kMid, Rational{1}}; }
PureStrategy encoding(bool value) { return value ? PureStrategy{{0, 2, 3}} : PureStrategy{{0, 1, 2}}; }

Reduction build_auction(const SatFormula& f, const std::optional<DeltaChain>& chain) {
    validate_formula(f);
    DeltaChain ch = chain ? *chain : default_deltas(f);
    check_ladder(ch);
    Layout l = layout(f, ch);
    Reduction r;
    Rational delta;
    r.instance = normalise(l.n, l.points, &delta);
    finish_chain(ch, delta);
    l.map.chain = ch;
    r.map = std::move(l.map);
    return r;
}

PureProfile encode_profile(const std::vector<bool>& a, const SatFormula& f, const ReductionMap& map) {
    if (static_cast<int>(a.size()) != f.variables || map.inputs.size() != a.size()) {
        fail(ErrorKind::Domain, "assignment size does not match the formula");
    }
    PureProfile p;
    p.strategies.resize(map.roles.size());
    for (std::size_t x = 0; x < a.size(); ++x) {
        for (int b : map.inputs[x]) p.strategies[at(b)] = encoding(a[x]);
    }
    for (std::size_t c = 0; c < f.clauses.size(); ++c) {
        const auto& clause = f.clauses[c];
        const auto& g = map.clauses[c];
        std::vector<bool> truth;
        for (std::size_t li = 0; li < clause.size(); ++li) {
            bool x = a[at(clause[li].var)];
            if (clause[li].negated) {
                p.strategies[at(g.not_bidders[li])] = x ? PureStrategy{{0, 1, 1}} : encoding(true);
                p.strategies[at(g.proj_bidders[li])] = encoding(!x);
            }
            truth.push_back(x != clause[li].negated);
        }
        if (clause.size() == 3) {
            bool first = truth[0] || truth[1];
            p.strategies[at(g.or1)] = encoding(first);
            p.strategies[at(g.or2)] = encoding(first || truth[2]);
        } else {
            p.strategies[at(g.or2)] = encoding(truth[0] || truth[1]);
        }
        p.strategies[at(g.out_k)] = PureStrategy{{0, 0, 1}};
        p.strategies[at(g.out_l)] = PureStrategy{{0, 0, 3}};
    }
    return p;
}

std::optional<std::vector<bool>> extract_assignment(const PureProfile& profile, const ReductionMap& map) {
    if (profile.strategies.size() != map.roles.size()) {
        fail(ErrorKind::Domain, "profile size does not match the reduction");
    }
    std::vector<bool> a;
    for (const auto& ids : map.inputs) {
        std::optional<bool> value;
        for (int b : ids) {
            const auto& bid = profile.of(b).bid;
            bool is0 = bid == encoding(false).bid;
            bool is1 = bid == encoding(true).bid;
            if (!is0 && !is1) return std::nullopt;
            if (value && *value != is1) return std::nullopt;
            value = is1;
        }
        a.push_back(*value);
    }
    return a;
}

IsolatedGadget isolated_gadget(Gadget g) {
    std::vector<MassPoint> pts;
    int n = 0;
    const Rational one{1};
    switch (g) {
        case Gadget::Input:
            n = 4;
            input_points(pts, 0, {1, 2, 3});
            break;
        case Gadget::Not:
            n = 2;
            not_points(pts, 0, 1, one);
            break;
        case Gadget::Proj:
            n = 2;
            proj_points(pts, 0, 1, one);
            break;
        case Gadget::Or:
            n = 3;
            or_points(pts, 0, 1, 2, one);
            break;
        case Gadget::Out:
            n = 3;
            out_points(pts, 0, 1, 2, one);
            break;
    }
    IsolatedGadget out;
    out.instance = normalise(n, pts, &out.scale);
    return out;
}

// --- lift -------------------------------------------------------------------

LiftResult lift_dfpa_to_cfpa(const DfpaInstance& inst, const Rational& delta) {
    require_valid(validate(inst), "dfpa instance");
    LiftResult out;
    lift_parameters(inst.bids, inst.prior.value_spaces, delta, out);
    const int n = inst.prior.n;
    Rational vol = pow(out.delta, n);
    out.instance.bids = inst.bids;
    out.instance.density.n = n;
    for (const auto& sp : inst.prior.support) {
        if (sp.mass.is_zero()) continue;
        Box b;
        for (const auto& v : sp.values) {
            b.lo.push_back(out.value_scale * v);
            b.hi.push_back(out.value_scale * v + out.delta);
        }
        b.weight = sp.mass / vol;
        out.instance.density.boxes.push_back(std::move(b));
    }
    return out;
}

LiftResult lift_dfpa_to_cfpa(const SymDfpaInstance& inst, const Rational& delta) {
    require_valid(validate(inst), "dfpa-sym instance");
    LiftResult out;
    lift_parameters(inst.bids, inst.prior.value_spaces, delta, out);
    const int n = inst.prior.n();
    Rational vol = pow(out.delta, n);
    out.instance.bids = inst.bids;
    out.instance.density.n = n;
    out.instance.density.groups = inst.prior.groups;
    for (const auto& sp : inst.prior.support) {
        if (sp.mass.is_zero()) continue;
        Box b;
        for (const auto& v : sp.values) {
            b.lo.push_back(out.value_scale * v);
            b.hi.push_back(out.value_scale * v + out.delta);
        }
        b.weight = sp.mass / vol;
        out.instance.density.boxes.push_back(std::move(b));
    }
    return out;
}

MixedProfile project_strategy(const JumpProfile& profile, const std::vector<std::vector<Rational>>& value_spaces,
                              const LiftResult& lift) {
    if (profile.strategies.size() != value_spaces.size()) {
        fail(ErrorKind::Domain, "projection: profile has " + std::to_string(profile.strategies.size()) +
                                    " strategies for " + std::to_string(value_spaces.size()) + " slots");
    }
    require_valid(validate(lift.instance.bids), "bid space");
    MixedProfile out;
    out.symmetric = profile.symmetric;
    const int B = lift.instance.bids.size();
    for (std::size_t s = 0; s < value_spaces.size(); ++s) {
        const JumpStrategy& js = profile.strategies[s];
        require_valid(validate(js, lift.instance.bids), "jump strategy " + std::to_string(s));
        MixedStrategy m;
        for (const auto& v : value_spaces[s]) {
            Rational lo = lift.value_scale * v;
            Rational hi = lo + lift.delta;
            std::vector<Rational> dist(at(B), Rational{0});
            for (int k = 0; k < B; ++k) dist[at(k)] = jump_mass_at(js, k, lo, hi) / lift.delta;
            m.dist.push_back(std::move(dist));
        }
        out.strategies.push_back(std::move(m));
    }
    return out;
}

}  // namespace fpa
