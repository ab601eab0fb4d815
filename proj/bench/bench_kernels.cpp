#include <benchmark/benchmark.h>

#include "fpa/densify.hpp"
#include "fpa/engine.hpp"
#include "fpa/reduce.hpp"
#include "fpa/search.hpp"

using namespace fpa;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

DfpaInstance three_point() {
    DfpaInstance inst;
    for (int k = 0; k <= 10; ++k) inst.bids.bids.push_back(Rational(k, 10));
    std::vector<Rational> vs = {Rational(0), Rational(1, 2), Rational(1)};
    inst.prior.n = 2;
    inst.prior.value_spaces = {vs, vs};
    inst.prior.support = {{{vs[0], vs[2]}, Rational(1, 3)}, {{vs[1], vs[1]}, Rational(1, 3)}, {{vs[2], vs[0]}, Rational(1, 3)}};
    return inst;
}

void BM_VerifyReduction(benchmark::State& state) {
    SatFormula f = parse_sat("p cnf 3 2\n1 -2 0\n2 3 -1 0\n");
    auto red = build_auction(f);
    auto prof = encode_profile({true, true, false}, f, red.map);
    for (auto _ : state) {
        benchmark::DoNotOptimize(verify_pbne(red.instance, prof, red.map.chain.eps_threshold, exec_of(state)));
    }
}
BENCHMARK(BM_VerifyReduction)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MonotoneSearch(benchmark::State& state) {
    auto inst = three_point();
    SearchConfig cfg;
    cfg.eps = Rational(1, 100);
    cfg.monotone_only = true;
    cfg.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_pure_equilibria(inst, cfg));
}
BENCHMARK(BM_MonotoneSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Densify(benchmark::State& state) {
    IidInstance inst;
    for (int k = 0; k <= 50; ++k) inst.bids.bids.push_back(Rational(k, 50));
    inst.n = 3;
    inst.marginal = IIDMarginal{{Rational(0), Rational(1)}, {Rational(1)}};
    for (auto _ : state) benchmark::DoNotOptimize(densify_solve(inst, default_densify_eps(), exec_of(state)));
}
BENCHMARK(BM_Densify)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
