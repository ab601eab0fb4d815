#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fpa/model.hpp"

namespace fpa {

enum class Normalization { Interim, Raw };

// Parallel kernels run under OpenMP; Serial is the reference path kept for
// testing and benchmarking. Both produce identical results.
enum class Exec { Serial, Parallel };

// Expected share of the item for a bidder facing independent opponents, when
// opponent j ties the bid with probability g[j] and bids strictly below it
// with probability G[j]: sum over r of P(r ties, nobody above) / (r + 1).
Rational tie_share(const std::vector<Rational>& g, const std::vector<Rational>& G);
// Probability that no opponent bids strictly above: sum over r of T_r.
Rational no_higher_prob(const std::vector<Rational>& g, const std::vector<Rational>& G);

// Compiled DFPA instance for repeated utility queries.
class DfpaEvaluator {
public:
    explicit DfpaEvaluator(const DfpaInstance& inst);

    int n() const { return n_; }
    int bids() const { return nb_; }
    const BidSpace& bid_space() const { return bid_space_; }
    const std::vector<Rational>& values(int i) const { return values_[static_cast<std::size_t>(i)]; }
    const Rational& marginal(int i, int vi) const { return marg_[static_cast<std::size_t>(i)][static_cast<std::size_t>(vi)]; }

    // f_i(v) * H_i(b; v) for every bid b, opponents mixing per profile.
    std::vector<Rational> raw_win(int i, int vi, const MixedProfile& profile) const;
    // Same, specialised to pure opponents.
    std::vector<Rational> raw_win(int i, int vi, const PureProfile& profile) const;

private:
    int n_ = 0;
    int nb_ = 0;
    BidSpace bid_space_;
    std::vector<std::vector<Rational>> values_;
    std::vector<std::vector<int>> points_;
    std::vector<Rational> mass_;
    std::vector<std::vector<std::vector<int>>> by_value_;
    std::vector<std::vector<Rational>> marg_;
};

// Compiled group-symmetric DFPA. Queries are per group, for a representative
// bidder of that group; opponents within a group share one strategy.
class SymDfpaEvaluator {
public:
    explicit SymDfpaEvaluator(const SymDfpaInstance& inst);

    int groups() const { return static_cast<int>(groups_.size()); }
    int bids() const { return nb_; }
    const BidSpace& bid_space() const { return bid_space_; }
    const std::vector<Rational>& values(int g) const { return values_[static_cast<std::size_t>(g)]; }
    const Rational& marginal(int g, int vi) const { return marg_[static_cast<std::size_t>(g)][static_cast<std::size_t>(vi)]; }

    std::vector<Rational> raw_win(int g, int vi, const MixedProfile& group_profile) const;
    std::vector<Rational> raw_win(int g, int vi, const PureProfile& group_profile) const;

private:
    struct Term {
        Rational weight;                        // p_j * (# expanded tuples with v_i at bidder i)
        std::vector<std::pair<int, int>> opp;   // (group, value index) of each opponent
    };
    int nb_ = 0;
    BidSpace bid_space_;
    std::vector<int> groups_;
    std::vector<std::vector<Rational>> values_;
    std::vector<std::vector<std::vector<Term>>> terms_;  // [group][value index]
    std::vector<std::vector<Rational>> marg_;
};

// Compiled box-density CFPA against jump-strategy opponents. When built
// succinctly the instance's symmetry groups are kept and queries address a
// representative bidder of a group; otherwise the density is expanded and
// every bidder is its own block.
class BoxEvaluator {
public:
    // `symmetric_profile`: strategies are indexed by the instance's groups.
    // `succinct`: keep the group representation (requires symmetric_profile).
    BoxEvaluator(const BoxInstance& inst, bool symmetric_profile, bool succinct);

    int n() const { return n_; }
    int blocks() const { return static_cast<int>(block_size_.size()); }
    int bids() const { return nb_; }
    const BidSpace& bid_space() const { return bid_space_; }
    // Block containing bidder i, and the strategy slot used for a block.
    int block_of(int bidder) const;
    int slot_of_block(int block) const { return slot_of_block_[static_cast<std::size_t>(block)]; }
    // Breakpoints of the block's axis (box endpoints plus 0 and 1).
    const std::vector<Rational>& axis(int block) const { return axis_[static_cast<std::size_t>(block)]; }

    Rational marginal(int block, const Rational& v) const;
    std::vector<Rational> raw_win(int block, const Rational& v, const JumpProfile& profile) const;

private:
    struct Side {
        Rational lo, hi;
        auto operator<=>(const Side&) const = default;
        bool operator==(const Side&) const = default;
    };
    struct CanonBox {
        Rational weight;
        Rational perms;                        // distinct group-valid permutations
        std::vector<std::vector<Side>> block;  // sides per block
    };
    template <class F>
    void for_each_term(int block, const Rational& v, F&& f) const;

    int n_ = 0;
    int nb_ = 0;
    BidSpace bid_space_;
    std::vector<int> block_size_;
    std::vector<int> slot_of_block_;
    std::vector<CanonBox> boxes_;
    std::vector<std::vector<Rational>> axis_;
};

// --- utilities ---------------------------------------------------------------

Rational win_prob_dfpa(const DfpaInstance& inst, int i, const Rational& v, const Rational& b,
                       const MixedProfile& profile);
Rational utility_dfpa(const DfpaInstance& inst, int i, const Rational& v, const Rational& b,
                      const MixedProfile& profile, Normalization norm = Normalization::Interim);
// Own bid drawn from a distribution over B (averaged utility).
Rational utility_dfpa(const DfpaInstance& inst, int i, const Rational& v, const std::vector<Rational>& own,
                      const MixedProfile& profile, Normalization norm = Normalization::Interim);

Rational win_prob_dfpa_symmetric(const SymDfpaInstance& inst, int i, const Rational& v, const Rational& b,
                                 const MixedProfile& group_profile);
Rational utility_dfpa_symmetric(const SymDfpaInstance& inst, int i, const Rational& v, const Rational& b,
                                const MixedProfile& group_profile, Normalization norm = Normalization::Interim);

Rational win_prob_cfpa(const BoxInstance& inst, int i, const Rational& v, const Rational& b, const JumpProfile& profile);
Rational utility_cfpa(const BoxInstance& inst, int i, const Rational& v, const Rational& b, const JumpProfile& profile,
                      Normalization norm = Normalization::Interim);
Rational utility_cfpa_symmetric(const BoxInstance& inst, int i, const Rational& v, const Rational& b,
                                const JumpProfile& group_profile, Normalization norm = Normalization::Interim);

// --- best responses and verification -----------------------------------------

struct BestResponseReport {
    std::vector<int> argmax;          // bid indices attaining the maximum
    Rational best_utility;
    std::optional<Rational> margin;   // empty when every bid is in the argmax
};

BestResponseReport best_response_from(const std::vector<Rational>& utilities);
BestResponseReport best_response(const DfpaInstance& inst, int i, const Rational& v, const MixedProfile& profile,
                                 Normalization norm = Normalization::Interim, bool no_overbidding = false);
BestResponseReport best_response(const SymDfpaInstance& inst, int i, const Rational& v,
                                 const MixedProfile& group_profile, Normalization norm = Normalization::Interim,
                                 bool no_overbidding = false);
BestResponseReport best_response(const BoxInstance& inst, int i, const Rational& v, const JumpProfile& profile,
                                 Normalization norm = Normalization::Interim, bool no_overbidding = false);

struct Violation {
    int bidder = 0;     // bidder, or group representative for symmetric profiles
    Rational value;
    int deviation = 0;  // best deviating bid index
    Rational gain;
};

struct VerifyReport {
    bool ok = true;
    Rational epsilon;
    Rational worst_gain;  // smallest epsilon that would pass
    std::vector<Violation> violations;
};

VerifyReport verify_pbne(const DfpaInstance& inst, const PureProfile& profile, const Rational& eps,
                         Exec exec = Exec::Parallel);
VerifyReport verify_pbne(const SymDfpaInstance& inst, const PureProfile& group_profile, const Rational& eps,
                         Exec exec = Exec::Parallel);
VerifyReport verify_pbne(const BoxInstance& inst, const JumpProfile& profile, const Rational& eps,
                         Exec exec = Exec::Parallel);
VerifyReport verify_pbne(const IidInstance& inst, const JumpProfile& profile, const Rational& eps,
                         Exec exec = Exec::Parallel);
VerifyReport verify_mbne(const DfpaInstance& inst, const MixedProfile& profile, const Rational& eps,
                         Exec exec = Exec::Parallel);
VerifyReport verify_mbne(const SymDfpaInstance& inst, const MixedProfile& group_profile, const Rational& eps,
                         Exec exec = Exec::Parallel);

// Early-exit checks used inside searches: true iff every gain is <= eps.
bool passes_pbne(const DfpaEvaluator& ev, const PureProfile& profile, const Rational& eps);
bool passes_pbne(const SymDfpaEvaluator& ev, const PureProfile& group_profile, const Rational& eps);
bool passes_pbne(const BoxEvaluator& ev, const JumpProfile& profile, const Rational& eps);
// Worst deviation gain (serial).
Rational worst_gain(const DfpaEvaluator& ev, const PureProfile& profile);
Rational worst_gain(const SymDfpaEvaluator& ev, const PureProfile& group_profile);
Rational worst_gain(const BoxEvaluator& ev, const JumpProfile& profile);

// --- structural checks ---------------------------------------------------------

struct AffiliationReport {
    bool affiliated = true;
    std::vector<Rational> v, w;  // violating pair when not affiliated
};

AffiliationReport check_affiliation(const DiscretePrior& prior);
AffiliationReport check_affiliation(const SymmetricDiscretePrior& prior);
AffiliationReport check_affiliation(const BoxDensity& density);

bool check_monotone(const PureStrategy& s);
bool check_monotone(const MixedStrategy& s);
bool check_no_overbidding(const PureStrategy& s, const std::vector<Rational>& values, const BidSpace& bids);
bool check_no_overbidding(const MixedStrategy& s, const std::vector<Rational>& values, const BidSpace& bids);

}  // namespace fpa
