#include "fpa/search.hpp"

#include <algorithm>
#include <atomic>
#include <limits>

#include "fpa/error.hpp"

namespace fpa {

namespace {

std::size_t at(int k) { return static_cast<std::size_t>(k); }

std::uint64_t fnv(std::uint64_t h, std::uint64_t x) {
    for (int k = 0; k < 8; ++k) {
        h ^= (x >> (8 * k)) & 0xffU;
        h *= 1099511628211ULL;
    }
    return h;
}

constexpr std::uint64_t kFnvBasis = 14695981039346656037ULL;

// Candidate strategies of one slot, in lexicographic order.
std::vector<PureStrategy> pure_candidates(const std::vector<Rational>& values, const std::vector<bool>& supported,
                                          const BidSpace& bids, const SearchConfig& cfg) {
    std::vector<int> free;
    for (std::size_t v = 0; v < values.size(); ++v) {
        if (supported[v]) free.push_back(static_cast<int>(v));
    }
    std::vector<PureStrategy> out;
    std::vector<int> choice(free.size(), 0);
    auto allowed = [&](std::size_t k, int b) {
        if (cfg.no_overbidding && bids[b] > values[at(free[k])]) return false;
        if (cfg.monotone_only && k > 0 && b < choice[k - 1]) return false;
        return true;
    };
    auto emit = [&]() {
        PureStrategy s{std::vector<int>(values.size(), 0)};
        int last = 0;
        std::size_t k = 0;
        for (std::size_t v = 0; v < values.size(); ++v) {
            if (k < free.size() && free[k] == static_cast<int>(v)) {
                last = choice[k++];
            }
            s.bid[v] = last;
        }
        out.push_back(std::move(s));
    };
    // iterative depth-first enumeration
    std::size_t depth = 0;
    if (free.empty()) {
        emit();
        return out;
    }
    choice[0] = -1;
    while (true) {
        int b = choice[depth] + 1;
        while (b < bids.size() && !allowed(depth, b)) ++b;
        if (b >= bids.size()) {
            if (depth == 0) break;
            --depth;
            continue;
        }
        choice[depth] = b;
        if (depth + 1 == free.size()) {
            emit();
        } else {
            ++depth;
            choice[depth] = -1;
        }
    }
    return out;
}

template <class Ev, class P>
SearchResult<P> run_search(const Ev& ev, const std::vector<std::vector<typename decltype(P::strategies)::value_type>>& cands,
                           bool symmetric, const SearchConfig& cfg) {
    SearchResult<P> res;
    std::uint64_t total = 1;
    for (const auto& c : cands) {
        if (c.empty()) {
            total = 0;
            break;
        }
        if (total > std::numeric_limits<std::uint64_t>::max() / c.size()) {
            fail(ErrorKind::Budget, "enumeration budget exceeded: profile count overflows");
        }
        total *= c.size();
    }
    res.candidates = total;
    if (total > cfg.budget) {
        fail(ErrorKind::Budget, "enumeration budget exceeded: " + std::to_string(total) + " candidate profiles > budget " +
                                    std::to_string(cfg.budget));
    }
    auto build = [&](std::uint64_t idx) {
        P p;
        p.symmetric = symmetric;
        p.strategies.resize(cands.size());
        for (std::size_t s = cands.size(); s-- > 0;) {
            p.strategies[s] = cands[s][idx % cands[s].size()];
            idx /= cands[s].size();
        }
        return p;
    };
    if (total == 0) return res;
    if (cfg.log) {
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            P p = build(idx);
            Rational g = worst_gain(ev, p);
            bool pass = g <= cfg.eps;
            res.log.push_back({profile_hash(p), pass, g});
            if (cfg.minimize) {
                if (!res.found || g < res.worst_gain) {
                    res.found = true;
                    res.profile = p;
                    res.worst_gain = g;
                }
            } else if (pass) {
                res.found = true;
                res.profile = p;
                res.worst_gain = g;
                break;
            }
        }
        if (cfg.minimize && res.worst_gain > cfg.eps) res.found = false;
        return res;
    }
    const long long n = static_cast<long long>(total);
    if (cfg.minimize) {
        // per-index minima merged deterministically: smallest gain, then smallest index
        Rational best_gain;
        long long best_idx = -1;
        auto consider = [&](long long idx, const Rational& g, Rational& bg, long long& bi) {
            if (bi < 0 || g < bg || (g == bg && idx < bi)) {
                bg = g;
                bi = idx;
            }
        };
        if (cfg.exec == Exec::Parallel) {
#pragma omp parallel
            {
                Rational local_gain;
                long long local_idx = -1;
#pragma omp for schedule(dynamic, 16)
                for (long long idx = 0; idx < n; ++idx) {
                    consider(idx, worst_gain(ev, build(static_cast<std::uint64_t>(idx))), local_gain, local_idx);
                }
#pragma omp critical
                if (local_idx >= 0) consider(local_idx, local_gain, best_gain, best_idx);
            }
        } else {
            for (long long idx = 0; idx < n; ++idx) consider(idx, worst_gain(ev, build(static_cast<std::uint64_t>(idx))), best_gain, best_idx);
        }
        res.profile = build(static_cast<std::uint64_t>(best_idx));
        res.worst_gain = best_gain;
        res.found = best_gain <= cfg.eps;
        return res;
    }
    std::atomic<long long> first{n};
    if (cfg.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long long idx = 0; idx < n; ++idx) {
            if (idx >= first.load(std::memory_order_relaxed)) continue;
            if (passes_pbne(ev, build(static_cast<std::uint64_t>(idx)), cfg.eps)) {
                long long cur = first.load();
                while (idx < cur && !first.compare_exchange_weak(cur, idx)) {
                }
            }
        }
    } else {
        for (long long idx = 0; idx < n; ++idx) {
            if (passes_pbne(ev, build(static_cast<std::uint64_t>(idx)), cfg.eps)) {
                first = idx;
                break;
            }
        }
    }
    if (first.load() < n) {
        res.found = true;
        res.profile = build(static_cast<std::uint64_t>(first.load()));
        res.worst_gain = worst_gain(ev, res.profile);
    }
    return res;
}

}  // namespace

std::uint64_t profile_hash(const PureProfile& p) {
    std::uint64_t h = kFnvBasis;
    for (const auto& s : p.strategies) {
        h = fnv(h, s.bid.size());
        for (int b : s.bid) h = fnv(h, static_cast<std::uint64_t>(b));
    }
    return h;
}

std::uint64_t profile_hash(const JumpProfile& p) {
    std::uint64_t h = kFnvBasis;
    for (const auto& s : p.strategies) {
        for (const auto& x : s.x) h = fnv(h, x.hash());
    }
    return h;
}

PureSearchResult enumerate_pure_equilibria(const DfpaInstance& inst, const SearchConfig& cfg) {
    DfpaEvaluator ev(inst);
    std::vector<std::vector<PureStrategy>> cands;
    for (int i = 0; i < ev.n(); ++i) {
        std::vector<bool> supported;
        for (std::size_t v = 0; v < ev.values(i).size(); ++v) supported.push_back(ev.marginal(i, static_cast<int>(v)).sign() > 0);
        cands.push_back(pure_candidates(ev.values(i), supported, inst.bids, cfg));
    }
    return run_search<DfpaEvaluator, PureProfile>(ev, cands, false, cfg);
}

PureSearchResult enumerate_symmetric_pure(const SymDfpaInstance& inst, const SearchConfig& cfg) {
    SymDfpaEvaluator ev(inst);
    std::vector<std::vector<PureStrategy>> cands;
    for (int g = 0; g < ev.groups(); ++g) {
        std::vector<bool> supported;
        for (std::size_t v = 0; v < ev.values(g).size(); ++v) supported.push_back(ev.marginal(g, static_cast<int>(v)).sign() > 0);
        cands.push_back(pure_candidates(ev.values(g), supported, inst.bids, cfg));
    }
    return run_search<SymDfpaEvaluator, PureProfile>(ev, cands, true, cfg);
}

ShrunkSpace shrink_bidspace(const BidSpace& bids, int M) {
    if (M < 2) fail(ErrorKind::Domain, "shrinkage target M must be at least 2");
    require_valid(validate(bids), "bid space");
    ShrunkSpace out;
    out.M = M;
    out.guarantee = Rational(1, M - 1);
    out.bids.bids.push_back(Rational(0));
    for (int k = 1; k <= M - 1; ++k) {
        Rational lo(k - 1, M - 1), hi(k, M - 1);
        const Rational* best = nullptr;
        for (const auto& b : bids.bids) {
            if (b > lo && b <= hi) best = &b;
        }
        if (best) out.bids.bids.push_back(*best);
    }
    return out;
}

PureProfile remap_bids(const PureProfile& p, const BidSpace& from, const BidSpace& to) {
    PureProfile out = p;
    for (auto& s : out.strategies) {
        for (auto& b : s.bid) {
            int k = to.index_of(from[b]);
            if (k < 0) fail(ErrorKind::Domain, "bid " + from[b].str() + " is missing from the target bid space");
            b = k;
        }
    }
    return out;
}

std::vector<Rational> default_jump_grid(const BoxInstance& inst, int mesh) {
    if (mesh < 1) fail(ErrorKind::Domain, "grid mesh must be positive");
    BoxDensity full = expand_symmetric(inst.density);
    std::vector<Rational> pts{Rational(0), Rational(1)};
    for (int j = 0; j < full.n; ++j) {
        auto ax = axis_breakpoints(full, j);
        pts.insert(pts.end(), ax.begin(), ax.end());
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<IIDMarginal> margs;
    for (int j = 0; j < full.n; ++j) margs.push_back(marginal(full, j));
    std::vector<Rational> grid{Rational(0), Rational(1)};
    for (std::size_t c = 0; c + 1 < pts.size(); ++c) {
        Rational mid = (pts[c] + pts[c + 1]) / Rational(2);
        bool positive = std::any_of(margs.begin(), margs.end(), [&](const IIDMarginal& m) { return m.density_at(mid).sign() > 0; });
        if (!positive) continue;
        for (int k = 0; k <= mesh; ++k) grid.push_back(pts[c] + (pts[c + 1] - pts[c]) * Rational(k, mesh));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

namespace {

std::vector<JumpStrategy> jump_candidates(const BidSpace& bids, const std::vector<Rational>& grid) {
    const int m = bids.size();
    std::vector<JumpStrategy> out;
    if (m == 1) {
        out.push_back({{Rational(0), Rational(1)}});
        return out;
    }
    // interior thresholds x[1..m-1] as nondecreasing grid indices with grid[c] >= bid
    std::vector<int> choice(at(m - 1), -1);
    int depth = 0;
    while (true) {
        int c = choice[at(depth)] + 1;
        if (c == 0 && depth > 0) c = choice[at(depth - 1)];
        while (c < static_cast<int>(grid.size()) && grid[at(c)] < bids[depth + 1]) ++c;
        if (c >= static_cast<int>(grid.size())) {
            if (depth == 0) break;
            choice[at(depth)] = -1;
            --depth;
            continue;
        }
        choice[at(depth)] = c;
        if (depth + 1 == m - 1) {
            JumpStrategy s;
            s.x.push_back(Rational(0));
            for (int k : choice) s.x.push_back(grid[at(k)]);
            s.x.push_back(Rational(1));
            out.push_back(std::move(s));
        } else {
            ++depth;
            choice[at(depth)] = -1;
        }
    }
    return out;
}

}  // namespace

JumpSearchResult jump_grid_search(const BoxInstance& inst, const std::vector<Rational>& grid_in, const SearchConfig& cfg) {
    std::vector<Rational> grid = grid_in;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.empty() || grid.front() != 0 || grid.back() != 1) fail(ErrorKind::Domain, "jump grid must contain 0 and 1");
    for (const auto& g : grid) {
        if (g < 0 || g > 1) fail(ErrorKind::Domain, "jump grid points must lie in [0,1]");
    }
    const bool symmetric = cfg.symmetric && inst.density.symmetric();
    BoxEvaluator ev(inst, symmetric, symmetric);
    auto one = jump_candidates(inst.bids, grid);
    const int slots = symmetric ? static_cast<int>(inst.density.groups.size()) : inst.density.n;
    std::vector<std::vector<JumpStrategy>> cands(at(slots), one);
    return run_search<BoxEvaluator, JumpProfile>(ev, cands, symmetric, cfg);
}

JumpSearchResult jump_grid_search(const IidInstance& inst, const std::vector<Rational>& grid, const SearchConfig& cfg) {
    require_valid(validate(inst), "IID instance");
    return jump_grid_search(iid_to_boxes(inst), grid, cfg);
}

}  // namespace fpa
