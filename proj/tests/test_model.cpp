#include <doctest.h>

#include "fpa/error.hpp"
#include "fpa/model.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fpa;
using support::R;
using support::Rs;

TEST_CASE("rational parsing is strict and canonical") {
    CHECK(Rational::parse("6/8") == Rational(3, 4));
    CHECK(Rational::parse("-2") == Rational(-2));
    CHECK(Rational::parse("6/8").str() == "3/4");
    CHECK_THROWS_AS(Rational::parse("0.5"), Error);
    CHECK_THROWS_AS(Rational::parse("1/0"), Error);
    CHECK_THROWS_AS(Rational::parse(" 1"), Error);
    CHECK_THROWS_AS(Rational::parse("1/-2"), Error);
    CHECK(ceil_log2(Rational(5)) == 3u);
    CHECK(ceil_log2(Rational(1, 2)) == 0u);
    CHECK(pow(Rational(2, 3), 3) == Rational(8, 27));
}

TEST_CASE("validation reports every violated invariant") {
    CHECK(validate(support::three_point()).ok());

    auto bad = support::three_point();
    bad.prior.support[0].mass = R("1/6");
    auto rep = validate(bad);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.violations.back().find("total mass") != std::string::npos);

    BidSpace nozero{Rs({"1/10", "1/5"})};
    CHECK_FALSE(validate(nozero).ok());

    SymDfpaInstance sym;
    sym.bids = BidSpace{Rs({"0", "1/2"})};
    sym.prior.groups = {2};
    sym.prior.value_spaces = {Rs({"0", "1/2", "1"})};
    // Two permutations of (1, 1/2) at 1/4 each plus (1/2, 1/2) at 3/8: total 7/8.
    sym.prior.support = {{Rs({"1", "1/2"}), R("1/4")}, {Rs({"1/2", "1/2"}), R("3/8")}};
    rep = validate(sym);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.violations.front().find("total mass 7/8") != std::string::npos);

    sym.prior.support = {{Rs({"1/2", "1"}), R("1/2")}};
    CHECK_FALSE(validate(sym).ok());  // not canonical

    CHECK_THROWS_AS(require_valid(validate(bad), "instance"), Error);
}

TEST_CASE("marginals and conditionals of the three-point prior") {
    auto inst = support::three_point();
    auto f = marginal(inst.prior, 0);
    CHECK(f == Rs({"1/3", "1/3", "1/3"}));
    auto c = conditional(inst.prior, 0, R("1"));
    REQUIRE(c.size() == 1);
    CHECK(c[0].values == Rs({"0"}));
    CHECK(c[0].mass == 1);
    CHECK_THROWS_AS(conditional(inst.prior, 0, R("1/4")), Error);
}

TEST_CASE("marginal agrees with direct summation on random priors") {
    oracle::Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        auto inst = oracle::random_dfpa(rng, 3, 3, 3);
        for (int i = 0; i < inst.prior.n; ++i) {
            auto f = marginal(inst.prior, i);
            const auto& space = inst.prior.value_spaces[static_cast<std::size_t>(i)];
            Rational total;
            for (std::size_t k = 0; k < space.size(); ++k) {
                Rational direct;
                for (const auto& pt : inst.prior.support)
                    if (pt.values[static_cast<std::size_t>(i)] == space[k]) direct += pt.mass;
                CHECK(f[k] == direct);
                total += f[k];
                if (!direct.is_zero()) {
                    Rational sum;
                    for (const auto& p : conditional(inst.prior, i, space[k])) sum += p.mass;
                    CHECK(sum == 1);
                }
            }
            CHECK(total == 1);
        }
    }
}

TEST_CASE("multiplicity counts distinct group-valid permutations") {
    auto a = R("1/2"), b = R("1/4"), c = R("1/8");
    CHECK(multiplicity({a, a, b}, {3}) == 3);
    CHECK(multiplicity({a, a, a}, {3}) == 1);
    CHECK(multiplicity({a, b, c}, {2, 1}) == 2);
    CHECK_THROWS_AS(multiplicity({b, a}, {2}), Error);
}

TEST_CASE("symmetric expansion") {
    SymmetricDiscretePrior sym;
    sym.groups = {2};
    sym.value_spaces = {Rs({"1/4", "1/2"})};
    sym.support = {{Rs({"1/2", "1/4"}), R("1/2")}};
    auto full = expand_symmetric(sym);
    REQUIRE(full.support.size() == 2);
    CHECK(full.support[0].mass == R("1/2"));
    CHECK(full.support[1].mass == R("1/2"));

    sym.support = {{Rs({"1/2", "1/2"}), R("1")}};
    CHECK(expand_symmetric(sym).support.size() == 1);

    oracle::Rng rng(5);
    for (int t = 0; t < 10; ++t) {
        auto inst = oracle::random_sym_dfpa(rng, {1, 2}, 3, 3);
        REQUIRE(validate(inst).ok());
        auto ex = expand_symmetric(inst);
        REQUIRE(validate(ex).ok());
        for (int i = 0; i < 3; ++i) CHECK(marginal(ex.prior, i) == marginal(inst.prior, i));
    }
}

TEST_CASE("jump strategy evaluation uses the lower bid at a jump point") {
    JumpStrategy s{Rs({"0", "1/4", "1/2", "1"})};
    BidSpace bids{Rs({"0", "1/8", "1/4"})};
    CHECK(validate(s, bids).ok());
    CHECK(jump_bid_index(s, R("0")) == 0);
    CHECK(jump_bid_index(s, R("1/4")) == 0);
    CHECK(jump_bid_index(s, R("3/10")) == 1);
    CHECK(jump_bid_index(s, R("1/2")) == 1);
    CHECK(jump_bid_index(s, R("1")) == 2);
    CHECK(jump_mass_at(s, 1, R("0"), R("1")) == R("1/4"));
    CHECK(jump_mass_below(s, 2, R("0"), R("3/4")) == R("1/2"));
    JumpStrategy over{Rs({"0", "1/16", "1/2", "1"})};
    CHECK_FALSE(validate(over, bids).ok());

    // The induced map is nondecreasing and never exceeds the value off the thresholds.
    oracle::Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        auto b = oracle::random_bids(rng, 5);
        auto j = oracle::random_jump(rng, b);
        REQUIRE(validate(j, b).ok());
        int prev = 0;
        for (int k = 0; k <= 48; ++k) {
            Rational v(k, 48);
            int bid = jump_bid_index(j, v);
            CHECK(bid >= prev);
            prev = bid;
            bool at_threshold = std::find(j.x.begin(), j.x.end(), v) != j.x.end();
            if (!at_threshold) CHECK(b[bid] <= v);
        }
    }
}

TEST_CASE("closed-open membership is closed at one") {
    CHECK(in_interval(R("0"), R("0"), R("1/2")));
    CHECK_FALSE(in_interval(R("1/2"), R("0"), R("1/2")));
    CHECK(in_interval(R("1"), R("1/2"), R("1")));
    CHECK(overlap(R("0"), R("1/2"), R("1/4"), R("1")) == R("1/4"));
    CHECK(overlap(R("0"), R("1/4"), R("1/2"), R("1")) == 0);
}

TEST_CASE("box densities: marginal, totals and IID product boxes") {
    auto cube = support::unit_cube(2);
    BoxInstance inst{BidSpace{Rs({"0", "1/2"})}, cube};
    CHECK(validate(inst).ok());
    auto m = marginal(cube, 0);
    CHECK(m.pieces() == 1);
    CHECK(m.densities[0] == 1);
    CHECK(total_mass(cube) == 1);
    CHECK(density_at(cube, Rs({"1/3", "1"})) == 1);

    IidInstance iid{BidSpace{Rs({"0", "1/2"})}, 3, IIDMarginal{Rs({"0", "1/2", "1"}), Rs({"3/2", "1/2"})}};
    REQUIRE(validate(iid).ok());
    auto boxes = iid_to_boxes(iid);
    CHECK(validate(boxes).ok());
    CHECK(boxes.density.boxes.size() == 4);  // multisets of size 3 from 2 pieces
    CHECK(total_mass(boxes.density) == 1);
    CHECK(density_at(boxes.density, Rs({"1/4", "3/4", "1/4"})) == R("9/8"));
    auto bm = marginal(boxes.density, 1);
    CHECK(bm.density_at(R("1/4")) == R("3/2"));
    CHECK(bm.density_at(R("3/4")) == R("1/2"));

    oracle::Rng rng(8);
    for (int t = 0; t < 5; ++t) {
        auto d = oracle::random_apv_boxes(rng, 3, 2, true);
        REQUIRE(validate(BoxInstance{BidSpace{Rs({"0"})}, d}).ok());
        CHECK(total_mass(expand_symmetric(d)) == 1);
    }
}
