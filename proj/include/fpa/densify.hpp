#pragma once

#include <memory>
#include <vector>

#include "fpa/engine.hpp"
#include "fpa/model.hpp"
#include "fpa/polynomial.hpp"

namespace fpa {

// Canonical symmetric equilibrium β(x) = x - ∫_{v̲}^x L(y | x) dy of a
// symmetric first-price auction with continuous bids, for an IID
// piecewise-constant marginal or a full-support symmetric box density.
class CanonicalBeta {
public:
    CanonicalBeta(const IIDMarginal& marginal, int n);
    // Requires a single symmetry group over all bidders and full support.
    explicit CanonicalBeta(const BoxDensity& density);

    int n() const { return n_; }
    bool iid() const { return iid_; }
    const Rational& support_low() const { return v_lo_; }

    Rational operator()(const Rational& x) const;

    // Box mode only: G_v(y) = P(max opponent value <= y | X_1 = v) and
    // L(y | v) = exp(-∫_y^v g_t(t) / G_t(t) dt) for y <= v.
    PiecewisePoly max_order_cdf(const Rational& v) const;
    Rational L(const Rational& y, const Rational& v) const;

private:
    int interval_of(const Rational& x) const;

    int n_ = 0;
    bool iid_ = false;
    Rational v_lo_{0};
    IIDMarginal marginal_;
    // box mode: arrangement a_0 < ... < a_K; per interval m = [a_m, a_{m+1}),
    // N_m(y) = joint density of (X_1 = x, Y_1 <= y) for x in the interval.
    std::vector<Rational> a_;
    std::vector<PiecewisePoly> N_;
    std::vector<Rational> N_left_, N_right_, C_;
};

Rational eval_beta_iid(const IIDMarginal& marginal, int n, const Rational& x);
Rational eval_beta_sapv(const BoxDensity& density, const Rational& x);
PiecewisePoly max_order_cdf(const BoxDensity& density, const Rational& v);

struct BoundsProfile {
    Rational phi_lo;     // lower density bound (0 in IID mode when unused)
    Rational phi_hi;     // upper density bound
    Rational delta;      // largest gap of B ∪ {0, 1}
    Rational gamma;      // concentration constant
    Rational lipschitz;  // upper bound on sup |β'|
    Rational v_lo;       // left end of the support
};

Rational lipschitz_bound(const IidInstance& inst);
Rational lipschitz_bound(const BoxInstance& inst);
BoundsProfile bounds_profile(const IidInstance& inst);
BoundsProfile bounds_profile(const BoxInstance& inst);

// Bisection for s with β(s) in [b, b + 2ε]. Throws Domain when b lies outside
// [β(v̲), β(1)].
Rational approx_invert(const CanonicalBeta& beta, const Rational& b, const Rational& eps, const Rational& lipschitz);

struct DensifyCertificate {
    JumpStrategy strategy;
    Rational eps;
    BoundsProfile bounds;
    Rational claimed;   // 2γ(δ + 2ε)
    Rational measured;  // worst deviation gain from exact verification
    bool ok = false;    // measured <= claimed
};

// Step strategy following β from below on the given bids, with its
// certificate. `eps` defaults to 2^-40 at the call sites.
DensifyCertificate densify_solve(const IidInstance& inst, const Rational& eps, Exec exec = Exec::Parallel);
DensifyCertificate densify_solve(const BoxInstance& inst, const Rational& eps, Exec exec = Exec::Parallel);

// Thresholds of the step strategy for a bid space (exposed for testing).
JumpStrategy step_strategy(const CanonicalBeta& beta, const BidSpace& bids, const Rational& eps,
                           const Rational& lipschitz);

Rational default_densify_eps();  // 2^-40

}  // namespace fpa
