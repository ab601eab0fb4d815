#pragma once

#include <cstdint>
#include <vector>

#include "fpa/engine.hpp"
#include "fpa/model.hpp"

namespace fpa {

struct SearchConfig {
    Rational eps{0};
    bool monotone_only = false;
    bool no_overbidding = true;
    bool symmetric = false;               // one strategy per group (jump search)
    std::uint64_t budget = 50'000'000;    // maximal number of candidate profiles
    bool minimize = false;                // return the profile with the smallest worst gain
    Exec exec = Exec::Parallel;
    bool log = false;                     // record every checked candidate (serial)
};

// One line of a search log.
struct SearchRecord {
    std::uint64_t hash = 0;
    bool pass = false;
    Rational worst_gain;
};

template <class P>
struct SearchResult {
    bool found = false;
    P profile;
    Rational worst_gain;       // of the returned profile
    std::uint64_t candidates = 0;
    std::vector<SearchRecord> log;
};

using PureSearchResult = SearchResult<PureProfile>;
using JumpSearchResult = SearchResult<JumpProfile>;

// Exhaustive search over pure profiles (lexicographic order, bidder 0 most
// significant, values in increasing order). Values outside a bidder's
// marginal support carry no weight; they are pinned to the bid of the nearest
// supported value below (or 0), which keeps every filter intact.
PureSearchResult enumerate_pure_equilibria(const DfpaInstance& inst, const SearchConfig& cfg);
PureSearchResult enumerate_symmetric_pure(const SymDfpaInstance& inst, const SearchConfig& cfg);

struct ShrunkSpace {
    BidSpace bids;
    int M = 0;
    Rational guarantee;  // additive loss bound 1/(M-1)
};

// Keeps 0 and the largest bid of every bucket ((k-1)/(M-1), k/(M-1)].
ShrunkSpace shrink_bidspace(const BidSpace& bids, int M);

// Re-expresses a profile over bid space `from` in terms of bid space `to`
// (every used bid must exist in `to`).
PureProfile remap_bids(const PureProfile& p, const BidSpace& from, const BidSpace& to);

// Box endpoints on every axis, with each interval of positive marginal split
// into `mesh` equal parts.
std::vector<Rational> default_jump_grid(const BoxInstance& inst, int mesh);

// Exhaustive search over monotone no-overbidding jump strategies whose
// interior thresholds lie on `grid` (which must contain 0 and 1).
JumpSearchResult jump_grid_search(const BoxInstance& inst, const std::vector<Rational>& grid, const SearchConfig& cfg);
JumpSearchResult jump_grid_search(const IidInstance& inst, const std::vector<Rational>& grid, const SearchConfig& cfg);

std::uint64_t profile_hash(const PureProfile& p);
std::uint64_t profile_hash(const JumpProfile& p);

}  // namespace fpa
