#include <doctest.h>

#include <cmath>

#include "fpa/densify.hpp"
#include "fpa/error.hpp"
#include "fpa/polynomial.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fpa;
using support::R;
using support::Rs;

namespace {

BoxDensity sym_cube(int n) {
    auto d = support::unit_cube(n);
    d.groups = {n};
    return d;
}

// Two symmetric boxes on [0,1/2]^2 and [1/2,1]^2 plus a thin full-support floor.
BoxDensity two_box() {
    BoxDensity d;
    d.n = 2;
    d.groups = {2};
    d.boxes = {{Rs({"0", "0"}), Rs({"1/2", "1/2"}), R("3/2")},
               {Rs({"1/2", "1/2"}), Rs({"1", "1"}), R("3/2")},
               {Rs({"1/2", "0"}), Rs({"1", "1/2"}), R("1/2")}};
    return d;
}

BidSpace grid(int m) {
    BidSpace b;
    for (int k = 0; k <= m; ++k) b.bids.push_back(Rational(k, m));
    return b;
}

}  // namespace

TEST_CASE("polynomial algebra") {
    Polynomial p({R("1"), R("2")});          // 1 + 2x
    Polynomial q = Polynomial::linear_shift(R("1/2"));  // x - 1/2
    auto pq = p * q;
    CHECK(pq.degree() == 2);
    CHECK(pq(R("1")) == R("3/2"));
    CHECK(pq.derivative()(R("0")) == R("0"));
    CHECK(p.integral(R("0"), R("1")) == R("2"));
    CHECK(p.antiderivative()(R("1")) == R("2"));
    PiecewisePoly pw(Rs({"0", "1/2", "1"}), {Polynomial::constant(R("1")), p});
    CHECK(pw(R("1/4")) == 1);
    CHECK(pw(R("1/2")) == 2);
    CHECK(pw(R("1")) == 3);
    CHECK(pw.integral(R("0"), R("1")) == R("1/2") + p.integral(R("1/2"), R("1")));
    CHECK(pw.scaled(R("2"))(R("1")) == 6);
}

TEST_CASE("canonical equilibrium for IID marginals") {
    IIDMarginal uni{Rs({"0", "1"}), Rs({"1"})};
    CHECK(eval_beta_iid(uni, 2, R("1/2")) == R("1/4"));
    CHECK(eval_beta_iid(uni, 3, R("3/5")) == R("2/5"));
    IIDMarginal shifted{Rs({"0", "1/4", "1"}), Rs({"0", "4/3"})};
    CHECK(eval_beta_iid(shifted, 2, R("1/4")) == R("1/4"));
    CHECK_THROWS_AS(eval_beta_iid(shifted, 2, R("1/8")), Error);

    IIDMarginal two{Rs({"0", "1/2", "1"}), Rs({"3/2", "1/2"})};
    for (const char* x : {"3/4", "1/3", "1"}) {
        double exact = eval_beta_iid(two, 2, R(x)).to_double();
        CHECK(std::fabs(exact - oracle::beta_quadrature_iid(two, 2, R(x).to_double())) < 1e-12);
    }
    IIDMarginal gap{Rs({"0", "1/4", "1/2", "1"}), Rs({"2", "0", "1"})};
    for (const char* x : {"3/8", "3/4", "1"}) {
        double exact = eval_beta_iid(gap, 3, R(x)).to_double();
        CHECK(std::fabs(exact - oracle::beta_quadrature_iid(gap, 3, R(x).to_double())) < 1e-12);
    }
}

TEST_CASE("canonical equilibrium for symmetric boxes") {
    for (int n : {2, 3}) {
        auto cube = sym_cube(n);
        for (int k = 0; k <= 8; ++k) {
            Rational x(k, 8);
            CHECK(eval_beta_sapv(cube, x) == oracle::beta_uniform(n, x));
        }
    }
    auto d = two_box();
    CHECK(eval_beta_sapv(d, R("0")) == 0);
    for (const char* x : {"1/4", "1/2", "5/8", "7/8", "1"}) {
        double exact = eval_beta_sapv(d, R(x)).to_double();
        CHECK(std::fabs(exact - oracle::beta_quadrature_boxes(d, R(x).to_double())) < 1e-10);
    }
    oracle::Rng rng(14);
    auto r = oracle::random_apv_boxes(rng, 3, 2, true);
    for (const char* x : {"1/5", "3/5", "1"}) {
        double exact = eval_beta_sapv(r, R(x)).to_double();
        CHECK(std::fabs(exact - oracle::beta_quadrature_boxes(r, R(x).to_double())) < 1e-8);
    }

    BoxDensity holes;
    holes.n = 2;
    holes.groups = {2};
    holes.boxes = {{Rs({"0", "0"}), Rs({"1/2", "1/2"}), R("2")}, {Rs({"1/2", "1/2"}), Rs({"1", "1"}), R("2")}};
    CHECK_THROWS_AS(CanonicalBeta{holes}, Error);
    try {
        CanonicalBeta b(holes);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Unsupported);
    }
    auto asym = support::unit_cube(2);
    CHECK_THROWS_AS(CanonicalBeta{asym}, Error);
}

TEST_CASE("maximum order statistic cdf") {
    auto g2 = max_order_cdf(sym_cube(2), R("1/3"));
    auto g3 = max_order_cdf(sym_cube(3), R("1/3"));
    for (int k = 0; k <= 6; ++k) {
        Rational y(k, 6);
        CHECK(g2(y) == y);
        CHECK(g3(y) == y * y);
    }
    auto d = two_box();
    for (const char* v : {"1/4", "3/4"}) {
        auto G = max_order_cdf(d, R(v));
        CHECK(G(R("0")) == 0);
        CHECK(G(R("1")) == 1);
        for (const char* y : {"1/8", "1/3", "1/2", "2/3", "9/10"})
            CHECK(std::fabs(G(R(y)).to_double() - oracle::max_order_cdf_volume(d, R(v).to_double(), R(y).to_double())) < 1e-14);
    }
}

TEST_CASE("Lipschitz bounds and density bounds") {
    BoxInstance cube{grid(4), sym_cube(2)};
    CHECK(lipschitz_bound(cube) == 1);
    auto bp = bounds_profile(cube);
    CHECK(bp.gamma == 2);
    CHECK(bp.delta == R("1/4"));

    IidInstance u3{grid(4), 3, IIDMarginal{Rs({"0", "1"}), Rs({"1"})}};
    CHECK(lipschitz_bound(u3) == 3);
    CHECK(bounds_profile(u3).gamma == 3);
    IidInstance two{grid(4), 2, IIDMarginal{Rs({"0", "1/2", "1"}), Rs({"3/2", "1/2"})}};
    CHECK(lipschitz_bound(two) == 6);

    auto tb = bounds_profile(BoxInstance{grid(4), two_box()});
    CHECK(tb.phi_lo == R("1/2"));
    CHECK(tb.phi_hi == R("3/2"));
    CHECK(tb.gamma == 18);
    CHECK(tb.lipschitz == 3);
    // The bound dominates measured slopes of β.
    CanonicalBeta beta(two_box());
    for (int k = 0; k < 16; ++k) {
        Rational a(k, 16), b(k + 1, 16);
        CHECK((beta(b) - beta(a)) / (b - a) <= tb.lipschitz);
    }
}

TEST_CASE("approximate inversion") {
    CanonicalBeta beta(IIDMarginal{Rs({"0", "1"}), Rs({"1"})}, 2);
    Rational eps(1, 1000000);
    auto s = approx_invert(beta, R("1/4"), eps, R("1"));
    CHECK(beta(s) >= R("1/4"));
    CHECK(beta(s) <= R("1/4") + Rational(2) * eps);
    CHECK(approx_invert(beta, R("0"), eps, R("1")) == 0);
    CHECK(approx_invert(beta, R("1/2"), eps, R("1")) == 1);
    CHECK_THROWS_AS(approx_invert(beta, R("3/5"), eps, R("1")), Error);
}

TEST_CASE("densified step strategies") {
    Rational eps = default_densify_eps();
    IidInstance u2{grid(20), 2, IIDMarginal{Rs({"0", "1"}), Rs({"1"})}};
    auto cert = densify_solve(u2, eps);
    CHECK(cert.ok);
    CHECK(cert.claimed == Rational(4) * (R("1/20") + Rational(2) * eps));
    CHECK(cert.measured <= cert.claimed);
    CHECK(validate(cert.strategy, u2.bids).ok());
    auto serial = densify_solve(u2, eps, Exec::Serial);
    CHECK(serial.strategy.x == cert.strategy.x);
    CHECK(serial.measured == cert.measured);

    // Underapproximation on a dense probe grid.
    CanonicalBeta beta(u2.marginal, 2);
    const Rational slack = cert.bounds.delta + Rational(2) * eps;
    for (int k = 0; k <= 200; ++k) {
        Rational v(k, 200);
        Rational bt = u2.bids[jump_bid_index(cert.strategy, v)];
        CHECK(bt <= beta(v));
        CHECK(bt >= beta(v) - slack);
    }

    auto box = densify_solve(BoxInstance{grid(10), two_box()}, eps);
    CHECK(box.ok);
    CHECK(box.bounds.gamma == 18);

    auto cube = densify_solve(BoxInstance{grid(10), sym_cube(2)}, eps);
    CHECK(cube.ok);
    CHECK(cube.bounds.gamma == 2);

    // B = {0, 1}: bid 1 exceeds β(1) = 1/2, so everybody bids 0.
    IidInstance coarse{BidSpace{Rs({"0", "1"})}, 2, u2.marginal};
    auto deg = densify_solve(coarse, eps);
    CHECK(deg.strategy.x == Rs({"0", "1", "1"}));
    CHECK(deg.ok);
}

TEST_CASE("canonical equilibrium structure on box fixtures") {
    oracle::Rng rng(123);
    for (int t = 0; t < 4; ++t) {
        auto d = t == 0 ? two_box() : oracle::random_apv_boxes(rng, 2 + t % 2, 2, true);
        CanonicalBeta beta(d);
        std::vector<Rational> probes;
        for (int k = 1; k < 12; ++k) probes.push_back(Rational(k, 12) + Rational(1, 97));
        // strictly increasing
        for (std::size_t k = 1; k < probes.size(); ++k) CHECK(beta(probes[k - 1]) < beta(probes[k]));
        // β' = (v - β) g_v(v) / G_v(v) away from breakpoints
        const Rational h(1, 100000);
        for (const auto& v : probes) {
            auto G = beta.max_order_cdf(v);
            Rational lhs = (beta(v + h) - beta(v - h)) / (Rational(2) * h);
            Rational rhs = (v - beta(v)) * G.derivative(v) / G(v);
            CHECK(std::fabs((lhs - rhs).to_double()) < 1e-3);
        }
        // concentration: P(β(y1) <= β(Y) <= β(y2) | X = v) <= γ (β(y2) - β(y1))
        auto gamma = bounds_profile(BoxInstance{grid(2), d}).gamma;
        for (const auto& v : probes) {
            auto G = beta.max_order_cdf(v);
            for (std::size_t a = 0; a < probes.size(); ++a)
                for (std::size_t b = a + 1; b < probes.size(); ++b)
                    CHECK(G(probes[b]) - G(probes[a]) <= gamma * (beta(probes[b]) - beta(probes[a])));
        }
    }
}
