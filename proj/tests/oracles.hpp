#pragma once

// Independent reference computations and random instance generators used by
// the unit tests and the acceptance binary. Nothing here calls the dynamic
// programs under test.

#include <cstdint>
#include <random>
#include <vector>

#include "fpa/model.hpp"

namespace oracle {

using fpa::Rational;
using Rng = std::mt19937_64;

int uniform_int(Rng& rng, int lo, int hi);  // inclusive

// Sorted distinct values from {0, 1/4, 1/3, 1/2, 2/3, 3/4, 1} of the given size.
std::vector<Rational> random_values(Rng& rng, int count);
// Bid space of at most `max_bids` bids drawn from a fine grid, always with 0.
fpa::BidSpace random_bids(Rng& rng, int max_bids);

// Random joint pmf over a random subset of the value grid (not affiliated in general).
fpa::DfpaInstance random_dfpa(Rng& rng, int max_n, int max_bids, int max_values);
// Affiliated pmf on the full value grid: f(x) ∝ Π_i a_i(x_i) · c^{Σ_{i<j} r_i r_j},
// where r_i is the rank of x_i in V_i and c >= 1.
fpa::DfpaInstance random_apv_dfpa(Rng& rng, int max_n, int max_bids, int max_values);
// Group-symmetric pmf with the given group sizes.
fpa::SymDfpaInstance random_sym_dfpa(Rng& rng, const std::vector<int>& groups, int max_bids, int max_values);

fpa::MixedProfile random_mixed(Rng& rng, const std::vector<std::vector<Rational>>& spaces, int bids);
fpa::MixedProfile random_monotone_mixed(Rng& rng, const std::vector<std::vector<Rational>>& spaces, int bids);
fpa::PureProfile random_monotone_pure(Rng& rng, const std::vector<std::vector<Rational>>& spaces,
                                      const fpa::BidSpace& bids);

// Affiliated box density on a grid with cut points shared by all axes. With
// `symmetric`, lists only canonical (non-increasing) cells and one group of n.
fpa::BoxDensity random_apv_boxes(Rng& rng, int n, int cuts, bool symmetric);
fpa::JumpStrategy random_jump(Rng& rng, const fpa::BidSpace& bids);

// Winning probability by enumerating every value tuple and every opponent bid tuple.
Rational enum_win_prob(const fpa::DfpaInstance& inst, int i, const Rational& v, const Rational& b,
                       const fpa::MixedProfile& profile);
Rational enum_utility(const fpa::DfpaInstance& inst, int i, const Rational& v, const Rational& b,
                      const fpa::MixedProfile& profile);

// Continuous winning probability: every (expanded) box containing v is cut
// into the bid-preimage segments of each opponent and all segment
// combinations are enumerated.
Rational rect_win_prob(const fpa::BoxDensity& density, const fpa::BidSpace& bids, int i, const Rational& v,
                       const Rational& b, const fpa::JumpProfile& profile);

// Closed form for uniform IID values: (n-1) v / n.
Rational beta_uniform(int n, const Rational& v);
// Floating-point quadrature of the canonical equilibrium.
double beta_quadrature_iid(const fpa::IIDMarginal& m, int n, double x);
double beta_quadrature_boxes(const fpa::BoxDensity& density, double x);
// P(max opponent value <= y | X_1 = v) by direct volume computation.
double max_order_cdf_volume(const fpa::BoxDensity& density, double v, double y);

}  // namespace oracle
