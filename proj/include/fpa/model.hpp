#pragma once

#include <string>
#include <variant>
#include <vector>

#include "fpa/rational.hpp"

namespace fpa {

// Sorted, distinct bids in [0,1] containing 0.
struct BidSpace {
    std::vector<Rational> bids;

    int size() const { return static_cast<int>(bids.size()); }
    const Rational& operator[](int k) const { return bids[static_cast<std::size_t>(k)]; }
    // Index of an exact bid, or -1.
    int index_of(const Rational& b) const;
};

struct SupportPoint {
    std::vector<Rational> values;
    Rational mass;
};

// Explicit joint pmf over value tuples.
struct DiscretePrior {
    int n = 0;
    std::vector<std::vector<Rational>> value_spaces;
    std::vector<SupportPoint> support;
};

// Group-succinct pmf. Groups are contiguous bidder blocks of the given sizes;
// each support tuple is canonical (non-increasing within every block) and
// stands for all its distinct within-group permutations, each with its mass.
struct SymmetricDiscretePrior {
    std::vector<int> groups;
    std::vector<std::vector<Rational>> value_spaces;  // one per group
    std::vector<SupportPoint> support;

    int n() const;
    int group_of(int bidder) const;
    int group_start(int group) const;
};

struct Box {
    std::vector<Rational> lo;
    std::vector<Rational> hi;
    Rational weight;
};

// Piecewise-constant density: sum of weighted indicator functions of boxes.
// With symmetry groups, every box also stands for each of its distinct
// within-group permutations (same weight).
struct BoxDensity {
    int n = 0;
    std::vector<Box> boxes;
    std::vector<int> groups;  // empty: no symmetry

    bool symmetric() const { return !groups.empty(); }
    int group_of(int bidder) const;
    int group_start(int group) const;
    int group_count() const { return symmetric() ? static_cast<int>(groups.size()) : n; }
};

// Piecewise-constant density on [0,1] with breakpoints 0 = a_0 < ... < a_k = 1.
struct IIDMarginal {
    std::vector<Rational> breakpoints;
    std::vector<Rational> densities;

    int pieces() const { return static_cast<int>(densities.size()); }
    Rational cdf(const Rational& x) const;
    Rational density_at(const Rational& x) const;  // right-continuous lookup
};

struct DfpaInstance {
    BidSpace bids;
    DiscretePrior prior;
};

struct SymDfpaInstance {
    BidSpace bids;
    SymmetricDiscretePrior prior;
};

struct BoxInstance {
    BidSpace bids;
    BoxDensity density;
};

struct IidInstance {
    BidSpace bids;
    int n = 0;
    IIDMarginal marginal;
};

using Instance = std::variant<DfpaInstance, SymDfpaInstance, BoxInstance, IidInstance>;

// Strategies refer to the instance's value spaces and bid space by index.
struct PureStrategy {
    std::vector<int> bid;  // value index -> bid index
};

struct MixedStrategy {
    std::vector<std::vector<Rational>> dist;  // value index -> weights over bids
};

// Monotone step function: bid k is played on (x[k], x[k+1]]; x[0] = 0 and
// x[|B|] = 1. The value 0 bids the lowest k with 0 <= x[k+1].
struct JumpStrategy {
    std::vector<Rational> x;
};

template <class S>
struct Profile {
    std::vector<S> strategies;
    bool symmetric = false;  // one strategy per group instead of per bidder

    const S& of(int slot) const { return strategies[static_cast<std::size_t>(slot)]; }
};

using PureProfile = Profile<PureStrategy>;
using MixedProfile = Profile<MixedStrategy>;
using JumpProfile = Profile<JumpStrategy>;

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const BidSpace& bids);
ValidationReport validate(const DfpaInstance& inst);
ValidationReport validate(const SymDfpaInstance& inst);
ValidationReport validate(const BoxInstance& inst);
ValidationReport validate(const IidInstance& inst);
ValidationReport validate(const Instance& inst);

ValidationReport validate(const PureStrategy& s, int values, int bids);
ValidationReport validate(const MixedStrategy& s, int values, int bids);
ValidationReport validate(const JumpStrategy& s, const BidSpace& bids);

// Throws Error(Validation) carrying every violation when the report is not ok.
void require_valid(const ValidationReport& report, const std::string& what);

// Index of an exact value in a sorted value space, or -1.
int value_index(const std::vector<Rational>& space, const Rational& v);

// Closed-open membership [lo, hi), closed at 1 so the top edge is covered.
bool in_interval(const Rational& v, const Rational& lo, const Rational& hi);

// Length of [lo,hi] intersected with [a,b] (0 when disjoint).
Rational overlap(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b);

int jump_bid_index(const JumpStrategy& s, const Rational& v);
// Length of {x in [lo,hi] : s(x) = bid k} and of {x in [lo,hi] : s(x) < bid k}.
Rational jump_mass_at(const JumpStrategy& s, int k, const Rational& lo, const Rational& hi);
Rational jump_mass_below(const JumpStrategy& s, int k, const Rational& lo, const Rational& hi);

MixedStrategy to_mixed(const PureStrategy& s, int bids);

// Number of distinct within-group permutations of a tuple whose blocks are
// canonical (non-increasing). Throws Domain for non-canonical input.
Rational multiplicity(const std::vector<Rational>& tuple, const std::vector<int>& groups);

DiscretePrior expand_symmetric(const SymmetricDiscretePrior& sym);
BoxDensity expand_symmetric(const BoxDensity& boxes);
DfpaInstance expand_symmetric(const SymDfpaInstance& inst);
BoxInstance expand_symmetric(const BoxInstance& inst);

// Product boxes of an IID marginal, as a single-group symmetric density
// listing one canonical box per multiset of pieces.
BoxInstance iid_to_boxes(const IidInstance& inst);

// Marginal pmf of bidder i over its value space.
std::vector<Rational> marginal(const DiscretePrior& prior, int i);
std::vector<Rational> marginal(const SymmetricDiscretePrior& prior, int i);
// Marginal density of bidder i as a piecewise-constant function of its axis.
IIDMarginal marginal(const BoxDensity& density, int i);

// Conditional distribution of the opponents' values given v_i = v.
std::vector<SupportPoint> conditional(const DiscretePrior& prior, int i, const Rational& v);
// Conditional density of the opponents as boxes over the remaining n-1 axes.
std::vector<Box> conditional(const BoxDensity& density, int i, const Rational& v);

Rational total_mass(const BoxDensity& density);
// Joint density at a point (sum of the weights of boxes containing it).
Rational density_at(const BoxDensity& density, const std::vector<Rational>& point);

// Sorted distinct coordinates of all box endpoints on bidder i's axis,
// together with 0 and 1 (after symmetric expansion).
std::vector<Rational> axis_breakpoints(const BoxDensity& density, int i);

}  // namespace fpa
