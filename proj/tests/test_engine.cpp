#include <doctest.h>

#include "fpa/engine.hpp"
#include "fpa/error.hpp"
#include "fpa/reduce.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fpa;
using support::R;
using support::Rs;

namespace {

MixedProfile mixed_of(const PureProfile& p, int bids) {
    MixedProfile m;
    m.symmetric = p.symmetric;
    for (const auto& s : p.strategies) m.strategies.push_back(to_mixed(s, bids));
    return m;
}

// Replicates a per-group profile to one strategy per bidder.
template <class S>
Profile<S> per_bidder(const Profile<S>& group_profile, const std::vector<int>& groups) {
    Profile<S> out;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int k = 0; k < groups[g]; ++k) out.strategies.push_back(group_profile.strategies[g]);
    return out;
}

}  // namespace

TEST_CASE("winning probability in simple tie situations") {
    DfpaInstance inst;
    inst.bids = BidSpace{Rs({"0", "1/2"})};
    inst.prior.n = 2;
    inst.prior.value_spaces = {Rs({"1"}), Rs({"1"})};
    inst.prior.support = {{Rs({"1", "1"}), R("1")}};
    PureProfile zero{{PureStrategy{{0}}, PureStrategy{{0}}}};
    auto m = mixed_of(zero, 2);
    CHECK(win_prob_dfpa(inst, 0, R("1"), R("1/2"), m) == 1);
    CHECK(win_prob_dfpa(inst, 0, R("1"), R("0"), m) == R("1/2"));
    CHECK(utility_dfpa(inst, 0, R("1"), R("1/2"), m) == R("1/2"));
    CHECK(utility_dfpa(inst, 0, R("1"), Rs({"1/2", "1/2"}), m) == R("1/2"));
    CHECK_THROWS_AS(win_prob_dfpa(inst, 0, R("1/2"), R("0"), m), Error);
}

TEST_CASE("tie recursion against subset enumeration") {
    oracle::Rng rng(17);
    for (int t = 0; t < 40; ++t) {
        int k = oracle::uniform_int(rng, 0, 4);
        std::vector<Rational> g, G;
        for (int j = 0; j < k; ++j) {
            Rational a(oracle::uniform_int(rng, 0, 4), 8), c(oracle::uniform_int(rng, 0, 4), 8);
            g.push_back(a);
            G.push_back(c);
        }
        Rational share, none_above(1);
        for (int j = 0; j < k; ++j) none_above *= g[static_cast<std::size_t>(j)] + G[static_cast<std::size_t>(j)];
        for (int mask = 0; mask < (1 << k); ++mask) {
            Rational p(1);
            int ties = 0;
            for (int j = 0; j < k; ++j) {
                if (mask & (1 << j)) {
                    p *= g[static_cast<std::size_t>(j)];
                    ++ties;
                } else {
                    p *= G[static_cast<std::size_t>(j)];
                }
            }
            share += p / Rational(ties + 1);
        }
        CHECK(tie_share(g, G) == share);
        CHECK(no_higher_prob(g, G) == none_above);
    }
}

TEST_CASE("dynamic program matches outcome enumeration") {
    oracle::Rng rng(2024);
    for (int t = 0; t < 40; ++t) {
        auto inst = oracle::random_dfpa(rng, 3, 4, 3);
        auto prof = oracle::random_mixed(rng, inst.prior.value_spaces, inst.bids.size());
        for (int i = 0; i < inst.prior.n; ++i) {
            auto f = marginal(inst.prior, i);
            const auto& space = inst.prior.value_spaces[static_cast<std::size_t>(i)];
            for (std::size_t k = 0; k < space.size(); ++k) {
                if (f[k].is_zero()) continue;
                for (const auto& b : inst.bids.bids) {
                    CHECK(win_prob_dfpa(inst, i, space[k], b, prof) == oracle::enum_win_prob(inst, i, space[k], b, prof));
                    CHECK(utility_dfpa(inst, i, space[k], b, prof, Normalization::Raw) ==
                          f[k] * oracle::enum_utility(inst, i, space[k], b, prof));
                }
            }
        }
    }
}

TEST_CASE("symmetric succinct utilities equal the expanded computation") {
    oracle::Rng rng(99);
    const std::vector<std::vector<int>> shapes = {{2}, {3}, {1, 2}, {2, 2}};
    for (const auto& groups : shapes) {
        for (int t = 0; t < 5; ++t) {
            auto sym = oracle::random_sym_dfpa(rng, groups, 3, 3);
            auto full = expand_symmetric(sym);
            auto gp = oracle::random_mixed(rng, sym.prior.value_spaces, sym.bids.size());
            gp.symmetric = true;
            auto bp = per_bidder(gp, groups);
            for (int i = 0; i < full.prior.n; ++i) {
                auto f = marginal(full.prior, i);
                const auto& space = full.prior.value_spaces[static_cast<std::size_t>(i)];
                for (std::size_t k = 0; k < space.size(); ++k) {
                    if (f[k].is_zero()) continue;
                    for (const auto& b : sym.bids.bids)
                        CHECK(utility_dfpa_symmetric(sym, i, space[k], b, gp) == utility_dfpa(full, i, space[k], b, bp));
                }
            }
        }
    }
}

TEST_CASE("continuous utilities: geometric example and rectangle oracle") {
    BoxInstance uni{BidSpace{Rs({"0", "1/2"})}, support::unit_cube(2)};
    JumpProfile jp{{JumpStrategy{Rs({"0", "1/2", "1"})}, JumpStrategy{Rs({"0", "1/2", "1"})}}};
    CHECK(win_prob_cfpa(uni, 0, R("3/4"), R("1/2"), jp) == R("3/4"));
    CHECK(utility_cfpa(uni, 0, R("3/4"), R("1/2"), jp) == R("3/16"));
    JumpProfile zero{{JumpStrategy{Rs({"0", "1", "1"})}, JumpStrategy{Rs({"0", "1", "1"})}}};
    CHECK(utility_cfpa(uni, 0, R("2/3"), R("1/2"), zero) == R("1/6"));

    oracle::Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        int n = oracle::uniform_int(rng, 2, 3);
        auto d = oracle::random_apv_boxes(rng, n, oracle::uniform_int(rng, 1, 2), t % 2 == 0);
        BoxInstance inst{oracle::random_bids(rng, 4), d};
        JumpProfile p;
        for (int i = 0; i < n; ++i) p.strategies.push_back(oracle::random_jump(rng, inst.bids));
        for (int i = 0; i < n; ++i) {
            for (int s = 0; s < 6; ++s) {
                Rational v(oracle::uniform_int(rng, 0, 31), 32);
                for (const auto& b : inst.bids.bids)
                    CHECK(win_prob_cfpa(inst, i, v, b, p) == oracle::rect_win_prob(d, inst.bids, i, v, b, p));
            }
        }
        if (d.symmetric()) {
            JumpProfile gp{{oracle::random_jump(rng, inst.bids)}, true};
            auto bp = per_bidder(gp, d.groups);
            for (int s = 0; s < 6; ++s) {
                Rational v(oracle::uniform_int(rng, 0, 31), 32);
                for (const auto& b : inst.bids.bids) {
                    CHECK(utility_cfpa_symmetric(inst, 0, v, b, gp) == utility_cfpa(inst, 0, v, b, bp));
                    CHECK(win_prob_cfpa(inst, 0, v, b, bp) == oracle::rect_win_prob(d, inst.bids, 0, v, b, gp));
                }
            }
        }
    }
}

TEST_CASE("best responses") {
    auto out = isolated_gadget(Gadget::Out);
    auto b = reduction_bids();
    // OR2 bidder plays s_0, l bids b_2 at value 1; k's value 1 response.
    PureProfile p{{encoding(false), PureStrategy{{0, 0, 1}}, PureStrategy{{0, 0, 2}}}};
    auto br = best_response(out.instance, 1, R("1"), mixed_of(p, 4), Normalization::Raw);
    CHECK(br.argmax == std::vector<int>{3});
    REQUIRE(br.margin.has_value());
    CHECK(*br.margin * out.scale == R("1/56"));

    DfpaInstance solo;
    solo.bids = BidSpace{Rs({"0", "1/7", "2/7", "3/7"})};
    solo.prior.n = 2;
    solo.prior.value_spaces = {Rs({"0", "1"}), Rs({"0"})};
    solo.prior.support = {{Rs({"1", "0"}), R("1/2")}, {Rs({"0", "0"}), R("1/2")}};
    PureProfile zero{{PureStrategy{{0, 0}}, PureStrategy{{0}}}};
    auto br1 = best_response(solo, 0, R("1"), mixed_of(zero, 4));
    CHECK(br1.argmax == std::vector<int>{1});
    CHECK(br1.best_utility == R("6/7"));
    auto br0 = best_response(solo, 0, R("0"), mixed_of(zero, 4), Normalization::Interim, true);
    CHECK(br0.argmax == std::vector<int>{0});
    CHECK_THROWS_AS(utility_dfpa(solo, 0, R("1"), R("1"), mixed_of(zero, 4)), Error);
}

TEST_CASE("pure equilibrium verification on the three-point prior") {
    auto inst = support::three_point();
    PureProfile nonmono{{PureStrategy{{0, 3, 1}}, PureStrategy{{0, 3, 1}}}};
    auto rep = verify_pbne(inst, nonmono, R("0"));
    CHECK(rep.ok);
    CHECK(rep.worst_gain == 0);
    CHECK_FALSE(check_monotone(nonmono.strategies[0]));

    PureProfile zero{{PureStrategy{{0, 0, 0}}, PureStrategy{{0, 0, 0}}}};
    auto bad = verify_pbne(inst, zero, R("0"));
    CHECK_FALSE(bad.ok);
    REQUIRE_FALSE(bad.violations.empty());
    // Value 1 faces value 0 and wins outright with the smallest positive bid.
    bool found = false;
    for (const auto& v : bad.violations)
        if (v.value == 1 && v.deviation == 1) found = found || v.gain == R("9/10") - R("1/2");
    CHECK(found);
    auto serial = verify_pbne(inst, zero, R("0"), Exec::Serial);
    CHECK(serial.worst_gain == bad.worst_gain);
    CHECK(serial.violations.size() == bad.violations.size());
}

TEST_CASE("mixed verification") {
    auto inst = support::three_point();
    PureProfile nonmono{{PureStrategy{{0, 3, 1}}, PureStrategy{{0, 3, 1}}}};
    CHECK(verify_mbne(inst, mixed_of(nonmono, 11), R("0")).ok);

    // At value 1 against a zero bid, 1/10 wins for 9/10 while 1 wins for 0.
    auto m = mixed_of(nonmono, 11);
    m.strategies[0].dist[2] = std::vector<Rational>(11, Rational(0));
    m.strategies[0].dist[2][1] = R("1/2");
    m.strategies[0].dist[2][10] = R("1/2");
    auto rep = verify_mbne(inst, m, R("0"));
    CHECK_FALSE(rep.ok);
    CHECK(rep.worst_gain == R("9/10") - R("9/20"));
    CHECK(verify_mbne(inst, m, R("9/20")).ok);

    oracle::Rng rng(6);
    for (int t = 0; t < 10; ++t) {
        auto d = oracle::random_dfpa(rng, 3, 3, 2);
        auto p = oracle::random_mixed(rng, d.prior.value_spaces, d.bids.size());
        auto a = verify_mbne(d, p, R("0"), Exec::Serial);
        auto c = verify_mbne(d, p, R("0"), Exec::Parallel);
        CHECK(a.worst_gain == c.worst_gain);
        CHECK(a.ok == c.ok);
    }
}

TEST_CASE("affiliation checks") {
    auto inst = support::three_point();
    auto rep = check_affiliation(inst.prior);
    CHECK_FALSE(rep.affiliated);
    // The witness is a violating pair: its join and meet carry less mass.
    auto mass = [&](const std::vector<Rational>& x) {
        for (const auto& pt : inst.prior.support)
            if (pt.values == x) return pt.mass;
        return Rational(0);
    };
    std::vector<Rational> join, meet;
    for (std::size_t k = 0; k < 2; ++k) {
        join.push_back(std::max(rep.v[k], rep.w[k]));
        meet.push_back(std::min(rep.v[k], rep.w[k]));
    }
    CHECK(mass(join) * mass(meet) < mass(rep.v) * mass(rep.w));

    DiscretePrior product;
    product.n = 2;
    product.value_spaces = {Rs({"0", "1"}), Rs({"0", "1"})};
    product.support = {{Rs({"0", "0"}), R("1/6")}, {Rs({"0", "1"}), R("1/3")}, {Rs({"1", "0"}), R("1/6")},
                       {Rs({"1", "1"}), R("1/3")}};
    CHECK(check_affiliation(product).affiliated);
    DiscretePrior single{1, {Rs({"1/2"})}, {{Rs({"1/2"}), R("1")}}};
    CHECK(check_affiliation(single).affiliated);

    oracle::Rng rng(12);
    for (int t = 0; t < 10; ++t) {
        CHECK(check_affiliation(oracle::random_apv_dfpa(rng, 3, 3, 3).prior).affiliated);
        CHECK(check_affiliation(oracle::random_apv_boxes(rng, 2, 2, t % 2 == 1)).affiliated);
    }
    BoxDensity anti;
    anti.n = 2;
    anti.boxes = {{Rs({"0", "1/2"}), Rs({"1/2", "1"}), R("2")}, {Rs({"1/2", "0"}), Rs({"1", "1/2"}), R("2")}};
    CHECK_FALSE(check_affiliation(anti).affiliated);
}

TEST_CASE("monotonicity and overbidding checks") {
    CHECK(check_monotone(PureStrategy{{0, 1, 1}}));
    CHECK_FALSE(check_monotone(PureStrategy{{0, 2, 1}}));
    MixedStrategy overlap{{Rs({"1/2", "1/2", "0"}), Rs({"0", "1", "0"})}};
    CHECK(check_monotone(overlap));
    MixedStrategy crossing{{Rs({"0", "1/2", "1/2"}), Rs({"0", "1", "0"})}};
    CHECK_FALSE(check_monotone(crossing));
    BidSpace bids{Rs({"0", "1/4", "1/2"})};
    CHECK(check_no_overbidding(PureStrategy{{0, 1}}, Rs({"0", "1/4"}), bids));
    CHECK_FALSE(check_no_overbidding(PureStrategy{{1, 1}}, Rs({"0", "1/4"}), bids));
}
