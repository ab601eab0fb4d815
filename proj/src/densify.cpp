#include "fpa/densify.hpp"

#include <algorithm>

#include "fpa/error.hpp"

namespace fpa {

namespace {

std::size_t at(int k) { return static_cast<std::size_t>(k); }

std::vector<Rational> arrangement(const BoxDensity& full) {
    std::vector<Rational> a{Rational{0}, Rational{1}};
    for (const auto& b : full.boxes) {
        for (int j = 0; j < full.n; ++j) {
            a.push_back(b.lo[at(j)]);
            a.push_back(b.hi[at(j)]);
        }
    }
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

// Smallest and largest joint density over the cells of the arrangement grid.
std::pair<Rational, Rational> density_range(const BoxDensity& full, const std::vector<Rational>& a) {
    const int n = full.n;
    const int K = static_cast<int>(a.size()) - 1;
    std::vector<int> idx(at(n), 0);
    std::vector<Rational> mid(at(n));
    std::optional<Rational> lo, hi;
    while (true) {
        for (int j = 0; j < n; ++j) mid[at(j)] = (a[at(idx[at(j)])] + a[at(idx[at(j)] + 1)]) / Rational{2};
        Rational d = density_at(full, mid);
        if (!lo || d < *lo) lo = d;
        if (!hi || d > *hi) hi = d;
        int j = n - 1;
        while (j >= 0 && ++idx[at(j)] == K) idx[at(j--)] = 0;
        if (j < 0) break;
    }
    return {*lo, *hi};
}

Rational max_gap(const BidSpace& bids) {
    std::vector<Rational> pts = bids.bids;
    pts.push_back(Rational{0});
    pts.push_back(Rational{1});
    std::sort(pts.begin(), pts.end());
    Rational g{0};
    for (std::size_t k = 1; k < pts.size(); ++k) g = std::max(g, pts[k] - pts[k - 1]);
    return g;
}

void require_single_group(const BoxDensity& d) {
    if (d.n < 2 || !d.symmetric() || d.groups.size() != 1) {
        fail(ErrorKind::Unsupported, "canonical equilibrium needs a symmetric density with one group of all " +
                                         std::to_string(d.n) + " bidders");
    }
}

void require_full_support(const Rational& phi_lo) {
    if (phi_lo.sign() <= 0) {
        fail(ErrorKind::Unsupported,
             "symmetric affiliated prior without full support: the density vanishes on part of [0,1]^n "
             "(open problem, only full-support priors are handled)");
    }
}

}  // namespace

// --- canonical equilibrium ---------------------------------------------------

CanonicalBeta::CanonicalBeta(const IIDMarginal& marginal, int n) : n_(n), iid_(true), marginal_(marginal) {
    if (n < 2) fail(ErrorKind::Domain, "canonical equilibrium needs n >= 2");
    bool found = false;
    for (int k = 0; k < marginal.pieces(); ++k) {
        if (marginal.densities[at(k)].sign() > 0) {
            v_lo_ = marginal.breakpoints[at(k)];
            found = true;
            break;
        }
    }
    if (!found) fail(ErrorKind::Domain, "IID marginal has no positive piece");
}

CanonicalBeta::CanonicalBeta(const BoxDensity& density) : n_(density.n), iid_(false) {
    require_single_group(density);
    BoxDensity full = expand_symmetric(density);
    a_ = arrangement(full);
    require_full_support(density_range(full, a_).first);
    const int K = static_cast<int>(a_.size()) - 1;
    Rational carry{0};
    for (int m = 0; m < K; ++m) {
        std::vector<Polynomial> pieces(at(K));
        for (const auto& b : full.boxes) {
            if (b.weight.is_zero() || b.lo[0] > a_[at(m)] || b.hi[0] < a_[at(m + 1)]) continue;
            for (int q = 0; q < K; ++q) {
                Polynomial term = Polynomial::constant(b.weight);
                for (int j = 1; j < n_ && !term.is_zero(); ++j) {
                    const Rational& lo = b.lo[at(j)];
                    const Rational& hi = b.hi[at(j)];
                    if (hi <= a_[at(q)]) {
                        term = term * (hi - lo);
                    } else if (lo >= a_[at(q + 1)]) {
                        term = Polynomial{};
                    } else {
                        term = term * Polynomial::linear_shift(lo);
                    }
                }
                pieces[at(q)] += term;
            }
        }
        PiecewisePoly N(a_, std::move(pieces));
        Rational left = N(a_[at(m)]);
        Rational right = N(a_[at(m + 1)]);
        carry = N.integral(a_[at(m)], a_[at(m + 1)]) / right + left / right * carry;
        N_.push_back(std::move(N));
        N_left_.push_back(left);
        N_right_.push_back(right);
        C_.push_back(carry);
    }
}

int CanonicalBeta::interval_of(const Rational& x) const {
    if (x < Rational{0} || x > Rational{1}) fail(ErrorKind::Domain, "value outside [0,1]: " + x.str());
    auto it = std::upper_bound(a_.begin(), a_.end(), x);
    int m = static_cast<int>(it - a_.begin()) - 1;
    return std::min(m, static_cast<int>(N_.size()) - 1);
}

Rational CanonicalBeta::operator()(const Rational& x) const {
    if (x < v_lo_) fail(ErrorKind::Domain, "value " + x.str() + " below the support start " + v_lo_.str());
    if (x > Rational{1}) fail(ErrorKind::Domain, "value outside [0,1]: " + x.str());
    if (iid_) {
        Rational Fx = marginal_.cdf(x);
        if (Fx.is_zero()) return x;
        Rational integral{0};
        const unsigned n = static_cast<unsigned>(n_);
        for (int k = 0; k < marginal_.pieces(); ++k) {
            const Rational& s = marginal_.breakpoints[at(k)];
            if (!(s < x)) break;
            Rational e = std::min(x, marginal_.breakpoints[at(k + 1)]);
            const Rational& p = marginal_.densities[at(k)];
            Rational Fs = marginal_.cdf(s);
            if (p.is_zero()) {
                integral += (e - s) * pow(Fs, n - 1);
            } else {
                integral += (pow(marginal_.cdf(e), n) - pow(Fs, n)) / (Rational(n_) * p);
            }
        }
        return x - integral / pow(Fx, n - 1);
    }
    int m = interval_of(x);
    const PiecewisePoly& N = N_[at(m)];
    Rational Nx = N(x);
    if (Nx.is_zero()) return x;
    Rational before = m > 0 ? N_left_[at(m)] * C_[at(m - 1)] : Rational{0};
    return x - (N.integral(a_[at(m)], x) + before) / Nx;
}

PiecewisePoly CanonicalBeta::max_order_cdf(const Rational& v) const {
    if (iid_) fail(ErrorKind::Unsupported, "max_order_cdf is computed for box densities");
    const PiecewisePoly& N = N_[at(interval_of(v))];
    Rational f = N(Rational{1});
    if (f.is_zero()) fail(ErrorKind::Domain, "value outside marginal support: " + v.str());
    return N.scaled(Rational{1} / f);
}

Rational CanonicalBeta::L(const Rational& y, const Rational& v) const {
    if (iid_) fail(ErrorKind::Unsupported, "L is computed for box densities");
    if (y < Rational{0} || v < y || v > Rational{1} || v.is_zero()) {
        fail(ErrorKind::Domain, "L(y | v) needs 0 <= y <= v <= 1 and v > 0");
    }
    int k = interval_of(v);
    int j = interval_of(y);
    Rational Nv = N_[at(k)](v);
    if (j == k) return N_[at(k)](y) / Nv;
    Rational r = N_left_[at(k)] / Nv;
    for (int m = j + 1; m < k; ++m) r = r * N_left_[at(m)] / N_right_[at(m)];
    return r * N_[at(j)](y) / N_right_[at(j)];
}

Rational eval_beta_iid(const IIDMarginal& marginal, int n, const Rational& x) { return CanonicalBeta(marginal, n)(x); }

Rational eval_beta_sapv(const BoxDensity& density, const Rational& x) { return CanonicalBeta(density)(x); }

PiecewisePoly max_order_cdf(const BoxDensity& density, const Rational& v) {
    return CanonicalBeta(density).max_order_cdf(v);
}

// --- bounds ------------------------------------------------------------------

Rational lipschitz_bound(const IidInstance& inst) { return bounds_profile(inst).lipschitz; }

Rational lipschitz_bound(const BoxInstance& inst) { return bounds_profile(inst).lipschitz; }

BoundsProfile bounds_profile(const IidInstance& inst) {
    require_valid(validate(inst), "IID instance");
    BoundsProfile bp;
    std::optional<Rational> pmin, pmax, lmin, lmax;
    bool seen = false;
    for (int k = 0; k < inst.marginal.pieces(); ++k) {
        const Rational& p = inst.marginal.densities[at(k)];
        if (p.sign() <= 0) continue;
        Rational len = inst.marginal.breakpoints[at(k + 1)] - inst.marginal.breakpoints[at(k)];
        if (!seen) bp.v_lo = inst.marginal.breakpoints[at(k)];
        seen = true;
        if (!pmin || p < *pmin) pmin = p;
        if (!pmax || p > *pmax) pmax = p;
        if (!lmin || len < *lmin) lmin = len;
        if (!lmax || len > *lmax) lmax = len;
    }
    if (!seen) fail(ErrorKind::Domain, "IID marginal has no positive piece");
    bp.phi_lo = *pmin;
    bp.phi_hi = *pmax;
    bp.delta = max_gap(inst.bids);
    bp.gamma = Rational(inst.n) * *pmax;
    bp.lipschitz = Rational(inst.n) * (*lmax / *lmin) * (*pmax / *pmin);
    return bp;
}

BoundsProfile bounds_profile(const BoxInstance& inst) {
    require_valid(validate(inst), "box instance");
    require_single_group(inst.density);
    BoxDensity full = expand_symmetric(inst.density);
    auto [lo, hi] = density_range(full, arrangement(full));
    require_full_support(lo);
    BoundsProfile bp;
    const Rational n1(inst.density.n - 1);
    bp.phi_lo = lo;
    bp.phi_hi = hi;
    bp.delta = max_gap(inst.bids);
    bp.gamma = Rational{2} * n1 * (hi / lo) * (hi / lo);
    bp.lipschitz = n1 * hi / lo;
    bp.v_lo = 0;
    return bp;
}

// --- inversion and assembly ------------------------------------------------------

Rational approx_invert(const CanonicalBeta& beta, const Rational& b, const Rational& eps, const Rational& lipschitz) {
    if (eps.sign() <= 0) fail(ErrorKind::Domain, "approx_invert: eps must be positive");
    Rational lo = beta.support_low();
    Rational hi{1};
    Rational blo = beta(lo);
    Rational bhi = beta(hi);
    if (b < blo || b > bhi) {
        fail(ErrorKind::Domain, "bid " + b.str() + " outside [" + blo.str() + ", " + bhi.str() + "]");
    }
    if (b == blo) return lo;
    const unsigned cap = ceil_log2(lipschitz * (Rational{1} - lo) / eps) + 2;
    for (unsigned it = 0; it < cap && bhi - blo > eps; ++it) {
        Rational mid = (lo + hi) / Rational{2};
        Rational bm = beta(mid);
        if (bm < b) {
            lo = mid;
            blo = bm;
        } else {
            hi = mid;
            bhi = bm;
        }
    }
    return hi;
}

JumpStrategy step_strategy(const CanonicalBeta& beta, const BidSpace& bids, const Rational& eps,
                           const Rational& lipschitz) {
    const int m = bids.size();
    JumpStrategy s;
    s.x.assign(at(m + 1), Rational{1});
    s.x[0] = 0;
    const Rational lo = beta(beta.support_low());
    const Rational hi = beta(Rational{1});
#pragma omp parallel for schedule(dynamic)
    for (int j = 1; j < m; ++j) {
        const Rational& b = bids[j];
        if (b < lo) {
            s.x[at(j)] = b;
        } else if (b <= hi) {
            s.x[at(j)] = approx_invert(beta, b, eps, lipschitz);
        }
    }
    return s;
}

Rational default_densify_eps() { return Rational{1} / pow(Rational{2}, 40); }

namespace {

DensifyCertificate certify(const CanonicalBeta& beta, const BoundsProfile& bp, const BidSpace& bids,
                           const Rational& eps) {
    DensifyCertificate c;
    c.eps = eps;
    c.bounds = bp;
    c.strategy = step_strategy(beta, bids, eps, bp.lipschitz);
    c.claimed = Rational{2} * bp.gamma * (bp.delta + Rational{2} * eps);
    return c;
}

}  // namespace

DensifyCertificate densify_solve(const IidInstance& inst, const Rational& eps, Exec exec) {
    BoundsProfile bp = bounds_profile(inst);
    CanonicalBeta beta(inst.marginal, inst.n);
    DensifyCertificate c = certify(beta, bp, inst.bids, eps);
    JumpProfile profile{{c.strategy}, true};
    VerifyReport rep = verify_pbne(inst, profile, c.claimed, exec);
    c.measured = rep.worst_gain;
    c.ok = c.measured <= c.claimed;
    return c;
}

DensifyCertificate densify_solve(const BoxInstance& inst, const Rational& eps, Exec exec) {
    BoundsProfile bp = bounds_profile(inst);
    CanonicalBeta beta(inst.density);
    DensifyCertificate c = certify(beta, bp, inst.bids, eps);
    JumpProfile profile{{c.strategy}, true};
    VerifyReport rep = verify_pbne(inst, profile, c.claimed, exec);
    c.measured = rep.worst_gain;
    c.ok = c.measured <= c.claimed;
    return c;
}

}  // namespace fpa
