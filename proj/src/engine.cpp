#include "fpa/engine.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "fpa/error.hpp"

namespace fpa {

namespace {

const std::size_t kNone = static_cast<std::size_t>(-1);

std::size_t at(int k) { return static_cast<std::size_t>(k); }

int require_value(const std::vector<Rational>& space, const Rational& v) {
    int k = value_index(space, v);
    if (k < 0) fail(ErrorKind::Domain, "value " + v.str() + " is not in the bidder's value space");
    return k;
}

int require_bid(const BidSpace& bids, const Rational& b) {
    int k = bids.index_of(b);
    if (k < 0) fail(ErrorKind::Domain, "bid " + b.str() + " is not in the bid space");
    return k;
}

void require_support(const Rational& f, const Rational& v) {
    if (f.is_zero()) fail(ErrorKind::Domain, "value outside marginal support: " + v.str());
}

void require_arity(std::size_t got, int want, const char* what) {
    if (static_cast<int>(got) != want) {
        fail(ErrorKind::Domain, std::string(what) + ": expected " + std::to_string(want) + " strategies, got " +
                                    std::to_string(got));
    }
}

// Cumulative sums strictly below each bid.
std::vector<Rational> below_sums(const std::vector<Rational>& row) {
    std::vector<Rational> out(row.size(), Rational(0));
    for (std::size_t b = 1; b < row.size(); ++b) out[b] = out[b - 1] + row[b - 1];
    return out;
}

std::vector<Rational> tie_dp(const std::vector<Rational>& g, const std::vector<Rational>& G) {
    std::vector<Rational> T{Rational(1)};
    for (std::size_t j = 0; j < g.size(); ++j) {
        std::vector<Rational> next(T.size() + 1, Rational(0));
        for (std::size_t r = 0; r < T.size(); ++r) {
            if (T[r].is_zero()) continue;
            if (!G[j].is_zero()) next[r] += T[r] * G[j];
            if (!g[j].is_zero()) next[r + 1] += T[r] * g[j];
        }
        T = std::move(next);
    }
    return T;
}

// Shares for pure opponents: `top` is the highest opponent bid index (-1 with
// no opponents) and `count` the number of opponents bidding it.
void add_pure_shares(std::vector<Rational>& out, const Rational& weight, int top, int count) {
    const int nb = static_cast<int>(out.size());
    for (int b = std::max(top, 0); b < nb; ++b) {
        if (b == top) {
            out[at(b)] += weight / Rational(count + 1);
        } else {
            out[at(b)] += weight;
        }
    }
}

std::vector<Rational> interim_utilities(const std::vector<Rational>& raw, const Rational& f, const Rational& v,
                                        const BidSpace& bids) {
    std::vector<Rational> u(raw.size());
    for (std::size_t b = 0; b < raw.size(); ++b) u[b] = (v - bids[static_cast<int>(b)]) * raw[b] / f;
    return u;
}

struct Gain {
    Rational gain;
    int dev = 0;
};

Gain gain_against(const std::vector<Rational>& u, const Rational& own) {
    Gain g;
    std::size_t best = 0;
    for (std::size_t b = 1; b < u.size(); ++b) {
        if (u[b] > u[best]) best = b;
    }
    g.dev = static_cast<int>(best);
    g.gain = u[best] - own;
    if (g.gain.sign() < 0) g.gain = 0;
    return g;
}

Rational mixed_value(const std::vector<Rational>& u, const std::vector<Rational>& mix) {
    Rational s(0);
    for (std::size_t b = 0; b < u.size(); ++b) {
        if (!mix[b].is_zero()) s += mix[b] * u[b];
    }
    return s;
}

struct Task {
    int slot = 0;
    Rational value;
    std::optional<Gain> gain;
};

template <class F>
void run_tasks(std::vector<Task>& tasks, Exec exec, F&& body) {
    const long count = static_cast<long>(tasks.size());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long t = 0; t < count; ++t) body(tasks[static_cast<std::size_t>(t)]);
    } else {
        for (long t = 0; t < count; ++t) body(tasks[static_cast<std::size_t>(t)]);
    }
}

VerifyReport collect(const std::vector<Task>& tasks, const Rational& eps) {
    VerifyReport rep;
    rep.epsilon = eps;
    rep.worst_gain = 0;
    for (const auto& t : tasks) {
        if (!t.gain) continue;
        if (t.gain->gain > rep.worst_gain) rep.worst_gain = t.gain->gain;
        if (t.gain->gain > eps) rep.violations.push_back({t.slot, t.value, t.gain->dev, t.gain->gain});
    }
    rep.ok = rep.violations.empty();
    return rep;
}

}  // namespace

Rational tie_share(const std::vector<Rational>& g, const std::vector<Rational>& G) {
    auto T = tie_dp(g, G);
    Rational s(0);
    for (std::size_t r = 0; r < T.size(); ++r) {
        if (!T[r].is_zero()) s += T[r] / Rational(static_cast<long>(r) + 1);
    }
    return s;
}

Rational no_higher_prob(const std::vector<Rational>& g, const std::vector<Rational>& G) {
    auto T = tie_dp(g, G);
    Rational s(0);
    for (const auto& t : T) s += t;
    return s;
}

// --- DfpaEvaluator -------------------------------------------------------------

DfpaEvaluator::DfpaEvaluator(const DfpaInstance& inst) {
    require_valid(validate(inst), "DFPA instance");
    n_ = inst.prior.n;
    nb_ = inst.bids.size();
    bid_space_ = inst.bids;
    values_ = inst.prior.value_spaces;
    by_value_.resize(at(n_));
    marg_.resize(at(n_));
    for (int i = 0; i < n_; ++i) {
        by_value_[at(i)].resize(values_[at(i)].size());
        marg_[at(i)].assign(values_[at(i)].size(), Rational(0));
    }
    for (const auto& pt : inst.prior.support) {
        std::vector<int> idx(at(n_));
        for (int i = 0; i < n_; ++i) idx[at(i)] = value_index(values_[at(i)], pt.values[at(i)]);
        int p = static_cast<int>(points_.size());
        for (int i = 0; i < n_; ++i) {
            by_value_[at(i)][at(idx[at(i)])].push_back(p);
            marg_[at(i)][at(idx[at(i)])] += pt.mass;
        }
        points_.push_back(std::move(idx));
        mass_.push_back(pt.mass);
    }
}

std::vector<Rational> DfpaEvaluator::raw_win(int i, int vi, const MixedProfile& profile) const {
    require_arity(profile.strategies.size(), n_, "DFPA profile");
    std::vector<Rational> out(at(nb_), Rational(0));
    std::vector<std::vector<Rational>> below(at(n_));
    std::vector<Rational> g(at(n_ - 1)), G(at(n_ - 1));
    for (int p : by_value_[at(i)][at(vi)]) {
        const auto& pt = points_[at(p)];
        std::vector<const std::vector<Rational>*> rows;
        for (int j = 0; j < n_; ++j) {
            if (j == i) continue;
            const auto& row = profile.of(j).dist[at(pt[at(j)])];
            rows.push_back(&row);
            below[at(j)] = below_sums(row);
        }
        for (int b = 0; b < nb_; ++b) {
            std::size_t k = 0;
            for (int j = 0; j < n_; ++j) {
                if (j == i) continue;
                g[k] = (*rows[k])[at(b)];
                G[k] = below[at(j)][at(b)];
                ++k;
            }
            out[at(b)] += mass_[at(p)] * tie_share(g, G);
        }
    }
    return out;
}

std::vector<Rational> DfpaEvaluator::raw_win(int i, int vi, const PureProfile& profile) const {
    require_arity(profile.strategies.size(), n_, "DFPA profile");
    std::vector<Rational> out(at(nb_), Rational(0));
    for (int p : by_value_[at(i)][at(vi)]) {
        const auto& pt = points_[at(p)];
        int top = -1;
        int count = 0;
        for (int j = 0; j < n_; ++j) {
            if (j == i) continue;
            int b = profile.of(j).bid[at(pt[at(j)])];
            if (b > top) {
                top = b;
                count = 1;
            } else if (b == top) {
                ++count;
            }
        }
        add_pure_shares(out, mass_[at(p)], top, count);
    }
    return out;
}

// --- SymDfpaEvaluator ----------------------------------------------------------

SymDfpaEvaluator::SymDfpaEvaluator(const SymDfpaInstance& inst) {
    require_valid(validate(inst), "symmetric DFPA instance");
    const auto& prior = inst.prior;
    nb_ = inst.bids.size();
    bid_space_ = inst.bids;
    groups_ = prior.groups;
    values_ = prior.value_spaces;
    const int k = static_cast<int>(groups_.size());
    terms_.resize(at(k));
    marg_.resize(at(k));
    for (int g = 0; g < k; ++g) {
        terms_[at(g)].resize(values_[at(g)].size());
        marg_[at(g)].assign(values_[at(g)].size(), Rational(0));
    }
    for (const auto& pt : prior.support) {
        Rational m = multiplicity(pt.values, groups_);
        std::vector<std::pair<int, int>> all;
        int pos = 0;
        for (int g = 0; g < k; ++g) {
            for (int c = 0; c < groups_[at(g)]; ++c, ++pos) {
                all.emplace_back(g, value_index(values_[at(g)], pt.values[at(pos)]));
            }
        }
        std::map<std::pair<int, int>, int> counts;
        for (const auto& e : all) ++counts[e];
        for (const auto& [key, c] : counts) {
            auto [g, vi] = key;
            Term t;
            t.weight = pt.mass * m * Rational(c) / Rational(groups_[at(g)]);
            t.opp = all;
            t.opp.erase(std::find(t.opp.begin(), t.opp.end(), key));
            marg_[at(g)][at(vi)] += t.weight;
            terms_[at(g)][at(vi)].push_back(std::move(t));
        }
    }
}

std::vector<Rational> SymDfpaEvaluator::raw_win(int g, int vi, const MixedProfile& profile) const {
    require_arity(profile.strategies.size(), groups(), "group profile");
    std::vector<Rational> out(at(nb_), Rational(0));
    for (const auto& t : terms_[at(g)][at(vi)]) {
        const std::size_t m = t.opp.size();
        std::vector<const std::vector<Rational>*> rows(m);
        std::vector<std::vector<Rational>> below(m);
        for (std::size_t k = 0; k < m; ++k) {
            rows[k] = &profile.of(t.opp[k].first).dist[at(t.opp[k].second)];
            below[k] = below_sums(*rows[k]);
        }
        std::vector<Rational> gg(m), GG(m);
        for (int b = 0; b < nb_; ++b) {
            for (std::size_t k = 0; k < m; ++k) {
                gg[k] = (*rows[k])[at(b)];
                GG[k] = below[k][at(b)];
            }
            out[at(b)] += t.weight * tie_share(gg, GG);
        }
    }
    return out;
}

std::vector<Rational> SymDfpaEvaluator::raw_win(int g, int vi, const PureProfile& profile) const {
    require_arity(profile.strategies.size(), groups(), "group profile");
    std::vector<Rational> out(at(nb_), Rational(0));
    for (const auto& t : terms_[at(g)][at(vi)]) {
        int top = -1;
        int count = 0;
        for (const auto& [h, vj] : t.opp) {
            int b = profile.of(h).bid[at(vj)];
            if (b > top) {
                top = b;
                count = 1;
            } else if (b == top) {
                ++count;
            }
        }
        add_pure_shares(out, t.weight, top, count);
    }
    return out;
}

// --- BoxEvaluator --------------------------------------------------------------

BoxEvaluator::BoxEvaluator(const BoxInstance& inst, bool symmetric_profile, bool succinct) {
    require_valid(validate(inst), "box instance");
    const auto& d = inst.density;
    n_ = d.n;
    nb_ = inst.bids.size();
    bid_space_ = inst.bids;
    if (symmetric_profile && !d.symmetric()) fail(ErrorKind::Domain, "group profile supplied for an instance without symmetry groups");
    if (succinct && !symmetric_profile) fail(ErrorKind::Domain, "asymmetric opponent profile supplied to a symmetric evaluation");
    BoxDensity src = succinct ? d : expand_symmetric(d);
    if (succinct) {
        block_size_ = d.groups;
        for (std::size_t g = 0; g < d.groups.size(); ++g) slot_of_block_.push_back(static_cast<int>(g));
    } else {
        block_size_.assign(at(n_), 1);
        for (int j = 0; j < n_; ++j) slot_of_block_.push_back(symmetric_profile ? d.group_of(j) : j);
    }
    const int nblocks = static_cast<int>(block_size_.size());
    axis_.assign(at(nblocks), {Rational(0), Rational(1)});
    for (const auto& box : src.boxes) {
        if (box.weight.is_zero()) continue;
        CanonBox cb;
        cb.weight = box.weight;
        cb.perms = 1;
        cb.block.resize(at(nblocks));
        int pos = 0;
        for (int g = 0; g < nblocks; ++g) {
            std::map<Side, int> counts;
            for (int c = 0; c < block_size_[at(g)]; ++c, ++pos) {
                Side s{box.lo[at(pos)], box.hi[at(pos)]};
                cb.block[at(g)].push_back(s);
                ++counts[s];
                axis_[at(g)].push_back(s.lo);
                axis_[at(g)].push_back(s.hi);
            }
            cb.perms *= factorial(static_cast<unsigned>(block_size_[at(g)]));
            for (const auto& [s, c] : counts) cb.perms /= factorial(static_cast<unsigned>(c));
        }
        boxes_.push_back(std::move(cb));
    }
    for (auto& ax : axis_) {
        std::sort(ax.begin(), ax.end());
        ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
    }
}

int BoxEvaluator::block_of(int bidder) const {
    int start = 0;
    for (std::size_t g = 0; g < block_size_.size(); ++g) {
        if (bidder < start + block_size_[g]) return static_cast<int>(g);
        start += block_size_[g];
    }
    fail(ErrorKind::Domain, "bidder index " + std::to_string(bidder) + " out of range");
}

// Calls f(box, count, skip) for every distinct side of `block` that contains v;
// count is the number of expanded boxes placing that side at the queried
// bidder, skip the index of one copy of the side within the block.
template <class F>
void BoxEvaluator::for_each_term(int block, const Rational& v, F&& f) const {
    const Rational size(block_size_[at(block)]);
    for (const auto& box : boxes_) {
        const auto& sides = box.block[at(block)];
        for (std::size_t s = 0; s < sides.size(); ++s) {
            if (!in_interval(v, sides[s].lo, sides[s].hi)) continue;
            bool first = true;
            int copies = 0;
            for (std::size_t t = 0; t < sides.size(); ++t) {
                if (sides[t] == sides[s]) {
                    if (t < s) first = false;
                    ++copies;
                }
            }
            if (!first) continue;
            f(box, box.perms * Rational(copies) / size, s);
        }
    }
}

Rational BoxEvaluator::marginal(int block, const Rational& v) const {
    Rational total(0);
    for_each_term(block, v, [&](const CanonBox& box, const Rational& count, std::size_t skip) {
        Rational c = box.weight * count;
        for (std::size_t g = 0; g < box.block.size(); ++g) {
            for (std::size_t s = 0; s < box.block[g].size(); ++s) {
                if (static_cast<int>(g) == block && s == skip) continue;
                c *= box.block[g][s].hi - box.block[g][s].lo;
            }
        }
        total += c;
    });
    return total;
}

std::vector<Rational> BoxEvaluator::raw_win(int block, const Rational& v, const JumpProfile& profile) const {
    require_arity(profile.strategies.size(), *std::max_element(slot_of_block_.begin(), slot_of_block_.end()) + 1,
                  "jump profile");
    std::vector<Rational> out(at(nb_), Rational(0));
    for_each_term(block, v, [&](const CanonBox& box, const Rational& count, std::size_t skip) {
        Rational coef = box.weight * count;
        std::vector<std::vector<Rational>> tie, below;
        for (std::size_t g = 0; g < box.block.size(); ++g) {
            const auto& strat = profile.of(slot_of_block_[g]);
            for (std::size_t s = 0; s < box.block[g].size(); ++s) {
                if (static_cast<int>(g) == block && s == skip) continue;
                const auto& side = box.block[g][s];
                Rational len = side.hi - side.lo;
                coef *= len;
                std::vector<Rational> t(at(nb_)), u(at(nb_));
                for (int b = 0; b < nb_; ++b) {
                    t[at(b)] = jump_mass_at(strat, b, side.lo, side.hi) / len;
                    u[at(b)] = jump_mass_below(strat, b, side.lo, side.hi) / len;
                }
                tie.push_back(std::move(t));
                below.push_back(std::move(u));
            }
        }
        std::vector<Rational> gg(tie.size()), GG(tie.size());
        for (int b = 0; b < nb_; ++b) {
            for (std::size_t k = 0; k < tie.size(); ++k) {
                gg[k] = tie[k][at(b)];
                GG[k] = below[k][at(b)];
            }
            out[at(b)] += coef * tie_share(gg, GG);
        }
    });
    return out;
}

// --- utilities -------------------------------------------------------------------

namespace {

void require_plain(const MixedProfile& p) {
    if (p.symmetric) fail(ErrorKind::Domain, "per-bidder profile expected");
}

}  // namespace

Rational win_prob_dfpa(const DfpaInstance& inst, int i, const Rational& v, const Rational& b, const MixedProfile& profile) {
    require_plain(profile);
    DfpaEvaluator ev(inst);
    if (i < 0 || i >= ev.n()) fail(ErrorKind::Domain, "bidder index out of range");
    int vi = require_value(ev.values(i), v);
    int bi = require_bid(inst.bids, b);
    require_support(ev.marginal(i, vi), v);
    return ev.raw_win(i, vi, profile)[at(bi)] / ev.marginal(i, vi);
}

Rational utility_dfpa(const DfpaInstance& inst, int i, const Rational& v, const Rational& b, const MixedProfile& profile,
                      Normalization norm) {
    require_plain(profile);
    DfpaEvaluator ev(inst);
    if (i < 0 || i >= ev.n()) fail(ErrorKind::Domain, "bidder index out of range");
    int vi = require_value(ev.values(i), v);
    int bi = require_bid(inst.bids, b);
    require_support(ev.marginal(i, vi), v);
    Rational raw = (v - b) * ev.raw_win(i, vi, profile)[at(bi)];
    return norm == Normalization::Raw ? raw : raw / ev.marginal(i, vi);
}

Rational utility_dfpa(const DfpaInstance& inst, int i, const Rational& v, const std::vector<Rational>& own,
                      const MixedProfile& profile, Normalization norm) {
    require_plain(profile);
    DfpaEvaluator ev(inst);
    if (i < 0 || i >= ev.n()) fail(ErrorKind::Domain, "bidder index out of range");
    if (static_cast<int>(own.size()) != ev.bids()) fail(ErrorKind::Domain, "own bid distribution has wrong length");
    int vi = require_value(ev.values(i), v);
    require_support(ev.marginal(i, vi), v);
    auto raw = ev.raw_win(i, vi, profile);
    Rational u(0);
    for (int b = 0; b < ev.bids(); ++b) u += own[at(b)] * (v - inst.bids[b]) * raw[at(b)];
    return norm == Normalization::Raw ? u : u / ev.marginal(i, vi);
}

Rational win_prob_dfpa_symmetric(const SymDfpaInstance& inst, int i, const Rational& v, const Rational& b,
                                 const MixedProfile& group_profile) {
    SymDfpaEvaluator ev(inst);
    if (i < 0 || i >= inst.prior.n()) fail(ErrorKind::Domain, "bidder index out of range");
    int g = inst.prior.group_of(i);
    int vi = require_value(ev.values(g), v);
    int bi = require_bid(inst.bids, b);
    require_support(ev.marginal(g, vi), v);
    return ev.raw_win(g, vi, group_profile)[at(bi)] / ev.marginal(g, vi);
}

Rational utility_dfpa_symmetric(const SymDfpaInstance& inst, int i, const Rational& v, const Rational& b,
                                const MixedProfile& group_profile, Normalization norm) {
    if (!group_profile.symmetric) fail(ErrorKind::Domain, "asymmetric opponent profile supplied");
    SymDfpaEvaluator ev(inst);
    if (i < 0 || i >= inst.prior.n()) fail(ErrorKind::Domain, "bidder index out of range");
    int g = inst.prior.group_of(i);
    int vi = require_value(ev.values(g), v);
    int bi = require_bid(inst.bids, b);
    require_support(ev.marginal(g, vi), v);
    Rational raw = (v - b) * ev.raw_win(g, vi, group_profile)[at(bi)];
    return norm == Normalization::Raw ? raw : raw / ev.marginal(g, vi);
}

namespace {

Rational cfpa_query(const BoxEvaluator& ev, int block, const Rational& v, const Rational& b, const JumpProfile& profile,
                    bool utility, Normalization norm) {
    int bi = require_bid(ev.bid_space(), b);
    Rational f = ev.marginal(block, v);
    require_support(f, v);
    Rational raw = ev.raw_win(block, v, profile)[at(bi)];
    if (utility) raw *= v - b;
    return (utility && norm == Normalization::Raw) ? raw : raw / f;
}

BoxInstance as_grouped(const BoxInstance& inst) {
    if (inst.density.symmetric()) return inst;
    BoxInstance out = inst;
    out.density.groups.assign(at(inst.density.n), 1);
    return out;
}

}  // namespace

Rational win_prob_cfpa(const BoxInstance& inst, int i, const Rational& v, const Rational& b, const JumpProfile& profile) {
    BoxEvaluator ev(inst, profile.symmetric, false);
    return cfpa_query(ev, ev.block_of(i), v, b, profile, false, Normalization::Interim);
}

Rational utility_cfpa(const BoxInstance& inst, int i, const Rational& v, const Rational& b, const JumpProfile& profile,
                      Normalization norm) {
    BoxEvaluator ev(inst, profile.symmetric, false);
    return cfpa_query(ev, ev.block_of(i), v, b, profile, true, norm);
}

Rational utility_cfpa_symmetric(const BoxInstance& inst, int i, const Rational& v, const Rational& b,
                                const JumpProfile& group_profile, Normalization norm) {
    if (!group_profile.symmetric && inst.density.symmetric()) fail(ErrorKind::Domain, "asymmetric opponent profile supplied");
    BoxInstance grouped = as_grouped(inst);
    JumpProfile p = group_profile;
    p.symmetric = true;
    BoxEvaluator ev(grouped, true, true);
    return cfpa_query(ev, ev.block_of(i), v, b, p, true, norm);
}

// --- best responses --------------------------------------------------------------

BestResponseReport best_response_from(const std::vector<Rational>& utilities) {
    BestResponseReport rep;
    if (utilities.empty()) fail(ErrorKind::Domain, "no bids to choose from");
    rep.best_utility = *std::max_element(utilities.begin(), utilities.end());
    std::optional<Rational> runner_up;
    for (std::size_t b = 0; b < utilities.size(); ++b) {
        if (utilities[b] == rep.best_utility) {
            rep.argmax.push_back(static_cast<int>(b));
        } else if (!runner_up || utilities[b] > *runner_up) {
            runner_up = utilities[b];
        }
    }
    if (runner_up) rep.margin = rep.best_utility - *runner_up;
    return rep;
}

namespace {

BestResponseReport br_from_raw(const std::vector<Rational>& raw, const Rational& f, const Rational& v, const BidSpace& bids,
                               Normalization norm, bool no_overbidding) {
    std::vector<Rational> u;
    std::vector<int> idx;
    for (int b = 0; b < bids.size(); ++b) {
        if (no_overbidding && bids[b] > v) continue;
        Rational x = (v - bids[b]) * raw[at(b)];
        u.push_back(norm == Normalization::Raw ? x : x / f);
        idx.push_back(b);
    }
    auto rep = best_response_from(u);
    for (auto& a : rep.argmax) a = idx[at(a)];
    return rep;
}

}  // namespace

BestResponseReport best_response(const DfpaInstance& inst, int i, const Rational& v, const MixedProfile& profile,
                                 Normalization norm, bool no_overbidding) {
    require_plain(profile);
    DfpaEvaluator ev(inst);
    if (i < 0 || i >= ev.n()) fail(ErrorKind::Domain, "bidder index out of range");
    int vi = require_value(ev.values(i), v);
    require_support(ev.marginal(i, vi), v);
    return br_from_raw(ev.raw_win(i, vi, profile), ev.marginal(i, vi), v, inst.bids, norm, no_overbidding);
}

BestResponseReport best_response(const SymDfpaInstance& inst, int i, const Rational& v, const MixedProfile& group_profile,
                                 Normalization norm, bool no_overbidding) {
    SymDfpaEvaluator ev(inst);
    if (i < 0 || i >= inst.prior.n()) fail(ErrorKind::Domain, "bidder index out of range");
    int g = inst.prior.group_of(i);
    int vi = require_value(ev.values(g), v);
    require_support(ev.marginal(g, vi), v);
    return br_from_raw(ev.raw_win(g, vi, group_profile), ev.marginal(g, vi), v, inst.bids, norm, no_overbidding);
}

BestResponseReport best_response(const BoxInstance& inst, int i, const Rational& v, const JumpProfile& profile,
                                 Normalization norm, bool no_overbidding) {
    BoxEvaluator ev(inst, profile.symmetric, false);
    int block = ev.block_of(i);
    Rational f = ev.marginal(block, v);
    require_support(f, v);
    return br_from_raw(ev.raw_win(block, v, profile), f, v, inst.bids, norm, no_overbidding);
}

// --- verification ----------------------------------------------------------------

namespace {

template <class Ev, class P>
std::optional<Gain> discrete_gain(const Ev& ev, int slot, int vi, const P& profile) {
    const Rational& f = ev.marginal(slot, vi);
    if (f.is_zero()) return std::nullopt;
    const Rational& v = ev.values(slot)[at(vi)];
    auto u = interim_utilities(ev.raw_win(slot, vi, profile), f, v, ev.bid_space());
    if constexpr (std::is_same_v<P, PureProfile>) {
        return gain_against(u, u[at(profile.of(slot).bid[at(vi)])]);
    } else {
        return gain_against(u, mixed_value(u, profile.of(slot).dist[at(vi)]));
    }
}

template <class Ev, class P>
VerifyReport verify_discrete(const Ev& ev, int slots, const P& profile, const Rational& eps, Exec exec) {
    std::vector<Task> tasks;
    std::vector<int> vidx;
    for (int s = 0; s < slots; ++s) {
        for (std::size_t vi = 0; vi < ev.values(s).size(); ++vi) {
            tasks.push_back({s, ev.values(s)[vi], std::nullopt});
            vidx.push_back(static_cast<int>(vi));
        }
    }
    run_tasks(tasks, exec, [&](Task& t) {
        std::size_t k = static_cast<std::size_t>(&t - tasks.data());
        t.gain = discrete_gain(ev, t.slot, vidx[k], profile);
    });
    return collect(tasks, eps);
}

template <class Ev, class P>
bool discrete_passes(const Ev& ev, int slots, const P& profile, const Rational& eps, Rational* worst) {
    if (worst) *worst = 0;
    for (int s = 0; s < slots; ++s) {
        for (std::size_t vi = 0; vi < ev.values(s).size(); ++vi) {
            auto g = discrete_gain(ev, s, static_cast<int>(vi), profile);
            if (!g) continue;
            if (worst) {
                if (g->gain > *worst) *worst = g->gain;
            } else if (g->gain > eps) {
                return false;
            }
        }
    }
    return worst ? *worst <= eps : true;
}

void check_pure_profile(const DfpaEvaluator& ev, const PureProfile& p) {
    require_arity(p.strategies.size(), ev.n(), "DFPA profile");
    if (p.symmetric) fail(ErrorKind::Domain, "per-bidder profile expected");
    for (int i = 0; i < ev.n(); ++i) require_valid(validate(p.of(i), static_cast<int>(ev.values(i).size()), ev.bids()), "strategy of bidder " + std::to_string(i));
}

void check_pure_profile(const SymDfpaEvaluator& ev, const PureProfile& p) {
    require_arity(p.strategies.size(), ev.groups(), "group profile");
    for (int g = 0; g < ev.groups(); ++g) require_valid(validate(p.of(g), static_cast<int>(ev.values(g).size()), ev.bids()), "strategy of group " + std::to_string(g));
}

void check_mixed_profile(const DfpaEvaluator& ev, const MixedProfile& p) {
    require_arity(p.strategies.size(), ev.n(), "DFPA profile");
    for (int i = 0; i < ev.n(); ++i) require_valid(validate(p.of(i), static_cast<int>(ev.values(i).size()), ev.bids()), "strategy of bidder " + std::to_string(i));
}

void check_mixed_profile(const SymDfpaEvaluator& ev, const MixedProfile& p) {
    require_arity(p.strategies.size(), ev.groups(), "group profile");
    for (int g = 0; g < ev.groups(); ++g) require_valid(validate(p.of(g), static_cast<int>(ev.values(g).size()), ev.bids()), "strategy of group " + std::to_string(g));
}

// Cells of a block's axis: box endpoints together with the block's own jumps.
std::vector<Rational> cell_edges(const BoxEvaluator& ev, int block, const JumpProfile& profile) {
    std::vector<Rational> e = ev.axis(block);
    const auto& x = profile.of(ev.slot_of_block(block)).x;
    e.insert(e.end(), x.begin(), x.end());
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
}

// Worst gain over a cell. Winning probabilities are constant on the cell and
// each utility is affine in v, so the gain is convex in v and its supremum is
// attained at one of the two cell edges (as a limit from inside).
std::optional<std::pair<Rational, Gain>> cell_gain(const BoxEvaluator& ev, int block, const Rational& lo,
                                                   const Rational& hi, const JumpProfile& profile) {
    Rational mid = (lo + hi) / Rational(2);
    Rational f = ev.marginal(block, mid);
    if (f.is_zero()) return std::nullopt;
    auto raw = ev.raw_win(block, mid, profile);
    int own = jump_bid_index(profile.of(ev.slot_of_block(block)), mid);
    std::optional<std::pair<Rational, Gain>> worst;
    for (const Rational* v : {&lo, &hi}) {
        auto u = interim_utilities(raw, f, *v, ev.bid_space());
        Gain g = gain_against(u, u[at(own)]);
        if (!worst || g.gain > worst->second.gain) worst = std::make_pair(*v, g);
    }
    return worst;
}

void check_jump_profile(const BoxEvaluator& ev, const JumpProfile& p) {
    for (std::size_t s = 0; s < p.strategies.size(); ++s) require_valid(validate(p.strategies[s], ev.bid_space()), "jump strategy " + std::to_string(s));
}

}  // namespace

VerifyReport verify_pbne(const DfpaInstance& inst, const PureProfile& profile, const Rational& eps, Exec exec) {
    DfpaEvaluator ev(inst);
    check_pure_profile(ev, profile);
    return verify_discrete(ev, ev.n(), profile, eps, exec);
}

VerifyReport verify_pbne(const SymDfpaInstance& inst, const PureProfile& group_profile, const Rational& eps, Exec exec) {
    SymDfpaEvaluator ev(inst);
    check_pure_profile(ev, group_profile);
    return verify_discrete(ev, ev.groups(), group_profile, eps, exec);
}

VerifyReport verify_mbne(const DfpaInstance& inst, const MixedProfile& profile, const Rational& eps, Exec exec) {
    require_plain(profile);
    DfpaEvaluator ev(inst);
    check_mixed_profile(ev, profile);
    return verify_discrete(ev, ev.n(), profile, eps, exec);
}

VerifyReport verify_mbne(const SymDfpaInstance& inst, const MixedProfile& group_profile, const Rational& eps, Exec exec) {
    SymDfpaEvaluator ev(inst);
    check_mixed_profile(ev, group_profile);
    return verify_discrete(ev, ev.groups(), group_profile, eps, exec);
}

VerifyReport verify_pbne(const BoxInstance& inst, const JumpProfile& profile, const Rational& eps, Exec exec) {
    bool succinct = profile.symmetric && inst.density.symmetric();
    BoxEvaluator ev(inst, profile.symmetric, succinct);
    check_jump_profile(ev, profile);
    std::vector<Task> tasks;
    std::vector<Rational> lo, hi;
    for (int block = 0; block < ev.blocks(); ++block) {
        auto e = cell_edges(ev, block, profile);
        for (std::size_t c = 0; c + 1 < e.size(); ++c) {
            tasks.push_back({block, e[c], std::nullopt});
            lo.push_back(e[c]);
            hi.push_back(e[c + 1]);
        }
    }
    run_tasks(tasks, exec, [&](Task& t) {
        std::size_t k = static_cast<std::size_t>(&t - tasks.data());
        auto g = cell_gain(ev, t.slot, lo[k], hi[k], profile);
        if (g) {
            t.value = g->first;
            t.gain = g->second;
        }
    });
    return collect(tasks, eps);
}

VerifyReport verify_pbne(const IidInstance& inst, const JumpProfile& profile, const Rational& eps, Exec exec) {
    require_valid(validate(inst), "IID instance");
    return verify_pbne(iid_to_boxes(inst), profile, eps, exec);
}

bool passes_pbne(const DfpaEvaluator& ev, const PureProfile& profile, const Rational& eps) {
    return discrete_passes(ev, ev.n(), profile, eps, nullptr);
}

bool passes_pbne(const SymDfpaEvaluator& ev, const PureProfile& group_profile, const Rational& eps) {
    return discrete_passes(ev, ev.groups(), group_profile, eps, nullptr);
}

Rational worst_gain(const DfpaEvaluator& ev, const PureProfile& profile) {
    Rational w;
    discrete_passes(ev, ev.n(), profile, Rational(0), &w);
    return w;
}

Rational worst_gain(const SymDfpaEvaluator& ev, const PureProfile& group_profile) {
    Rational w;
    discrete_passes(ev, ev.groups(), group_profile, Rational(0), &w);
    return w;
}

namespace {

bool box_scan(const BoxEvaluator& ev, const JumpProfile& profile, const Rational& eps, Rational* worst) {
    if (worst) *worst = 0;
    for (int block = 0; block < ev.blocks(); ++block) {
        auto e = cell_edges(ev, block, profile);
        for (std::size_t c = 0; c + 1 < e.size(); ++c) {
            auto g = cell_gain(ev, block, e[c], e[c + 1], profile);
            if (!g) continue;
            if (worst) {
                if (g->second.gain > *worst) *worst = g->second.gain;
            } else if (g->second.gain > eps) {
                return false;
            }
        }
    }
    return worst ? *worst <= eps : true;
}

}  // namespace

bool passes_pbne(const BoxEvaluator& ev, const JumpProfile& profile, const Rational& eps) {
    return box_scan(ev, profile, eps, nullptr);
}

Rational worst_gain(const BoxEvaluator& ev, const JumpProfile& profile) {
    Rational w;
    box_scan(ev, profile, Rational(0), &w);
    return w;
}

// --- structural checks -----------------------------------------------------------

AffiliationReport check_affiliation(const DiscretePrior& prior) {
    std::map<std::vector<Rational>, Rational> f;
    for (const auto& pt : prior.support) f[pt.values] = pt.mass;
    auto lookup = [&](const std::vector<Rational>& t) {
        auto it = f.find(t);
        return it == f.end() ? Rational(0) : it->second;
    };
    AffiliationReport rep;
    const auto& s = prior.support;
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = a + 1; b < s.size(); ++b) {
            std::vector<Rational> join(at(prior.n)), meet(at(prior.n));
            for (int k = 0; k < prior.n; ++k) {
                join[at(k)] = std::max(s[a].values[at(k)], s[b].values[at(k)]);
                meet[at(k)] = std::min(s[a].values[at(k)], s[b].values[at(k)]);
            }
            if (lookup(join) * lookup(meet) < s[a].mass * s[b].mass) {
                rep.affiliated = false;
                rep.v = s[a].values;
                rep.w = s[b].values;
                return rep;
            }
        }
    }
    return rep;
}

AffiliationReport check_affiliation(const SymmetricDiscretePrior& prior) {
    return check_affiliation(expand_symmetric(prior));
}

AffiliationReport check_affiliation(const BoxDensity& density) {
    BoxDensity full = expand_symmetric(density);
    const int n = full.n;
    std::vector<std::vector<Rational>> axes(at(n));
    for (int j = 0; j < n; ++j) axes[at(j)] = axis_breakpoints(full, j);
    // Enumerate grid cells, keeping those with positive density.
    std::map<std::vector<int>, Rational> dens;
    std::vector<int> idx(at(n), 0);
    std::vector<std::vector<int>> positive;
    auto midpoint = [&](const std::vector<int>& c) {
        std::vector<Rational> p(at(n));
        for (int j = 0; j < n; ++j) p[at(j)] = (axes[at(j)][at(c[at(j)])] + axes[at(j)][at(c[at(j)] + 1)]) / Rational(2);
        return p;
    };
    while (true) {
        Rational d = density_at(full, midpoint(idx));
        if (d.sign() > 0) {
            dens[idx] = d;
            positive.push_back(idx);
        }
        int j = 0;
        while (j < n && ++idx[at(j)] + 1 == static_cast<int>(axes[at(j)].size())) {
            idx[at(j)] = 0;
            ++j;
        }
        if (j == n) break;
    }
    auto lookup = [&](const std::vector<int>& c) {
        auto it = dens.find(c);
        return it == dens.end() ? Rational(0) : it->second;
    };
    AffiliationReport rep;
    for (std::size_t a = 0; a < positive.size(); ++a) {
        for (std::size_t b = a + 1; b < positive.size(); ++b) {
            std::vector<int> join(at(n)), meet(at(n));
            for (int k = 0; k < n; ++k) {
                join[at(k)] = std::max(positive[a][at(k)], positive[b][at(k)]);
                meet[at(k)] = std::min(positive[a][at(k)], positive[b][at(k)]);
            }
            if (lookup(join) * lookup(meet) < dens[positive[a]] * dens[positive[b]]) {
                rep.affiliated = false;
                rep.v = midpoint(positive[a]);
                rep.w = midpoint(positive[b]);
                return rep;
            }
        }
    }
    return rep;
}

bool check_monotone(const PureStrategy& s) { return std::is_sorted(s.bid.begin(), s.bid.end()); }

bool check_monotone(const MixedStrategy& s) {
    auto support_bounds = [](const std::vector<Rational>& row) {
        std::size_t lo = kNone, hi = kNone;
        for (std::size_t b = 0; b < row.size(); ++b) {
            if (row[b].sign() > 0) {
                if (lo == kNone) lo = b;
                hi = b;
            }
        }
        return std::make_pair(lo, hi);
    };
    for (std::size_t v = 1; v < s.dist.size(); ++v) {
        auto prev = support_bounds(s.dist[v - 1]);
        auto cur = support_bounds(s.dist[v]);
        if (prev.second != kNone && cur.first != kNone && prev.second > cur.first) return false;
    }
    return true;
}

bool check_no_overbidding(const PureStrategy& s, const std::vector<Rational>& values, const BidSpace& bids) {
    for (std::size_t v = 0; v < s.bid.size(); ++v) {
        if (bids[s.bid[v]] > values[v]) return false;
    }
    return true;
}

bool check_no_overbidding(const MixedStrategy& s, const std::vector<Rational>& values, const BidSpace& bids) {
    for (std::size_t v = 0; v < s.dist.size(); ++v) {
        for (std::size_t b = 0; b < s.dist[v].size(); ++b) {
            if (s.dist[v][b].sign() > 0 && bids[static_cast<int>(b)] > values[v]) return false;
        }
    }
    return true;
}

}  // namespace fpa
