#include <benchmark/benchmark.h>

#include <cmath>

#include "hamfin/evolution.hpp"
#include "hamfin/operators.hpp"
#include "hamfin/simulate.hpp"

using namespace hamfin;

static void BM_AssembleBS(benchmark::State& state) {
    const GridSpec g = GridSpec::make_1d(-4.0, 4.0, std::size_t(state.range(0)));
    const BSParams p{0.05, 0.2};
    for (auto _ : state) {
        auto H = build_bs_hamiltonian(g, p);
        benchmark::DoNotOptimize(H);
    }
}
BENCHMARK(BM_AssembleBS)->Arg(1025)->Arg(4097);

static void BM_ApplyMG(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    const GridSpec g = GridSpec::make_2d(-2.0, 2.0, n, -1.0, 1.0, n);
    MGParams p;
    p.r = 0.05;
    p.zeta = 0.3;
    p.rho = -0.4;
    p.alpha = 0.5;
    p.lambda = -0.045;
    p.mu = 0.12;
    const OperatorMatrix H = build_mg_hamiltonian(g, p);
    const ValueField f =
        sample_xy(g, [](double x, double y) { return std::exp(x + y); }, "e^{x+y}");
    for (auto _ : state) {
        auto out = H.apply(f);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(g.size()));
}
BENCHMARK(BM_ApplyMG)->Arg(65)->Arg(129)->Arg(257);

static void BM_CrankNicolsonCall(benchmark::State& state) {
    const GridSpec g = default_pricing_grid(100.0, 0.2, 1.0, std::size_t(state.range(0)));
    EvolutionConfig cfg;
    cfg.T = 1.0;
    cfg.n_steps = 128;
    const BSParams p{0.05, 0.2};
    for (auto _ : state) {
        auto res = price_bs_vanilla(g, p, PayoffSpec::call(100.0), cfg, {100.0});
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_CrankNicolsonCall)->Arg(513)->Arg(2049);

static void BM_SimulateGBM(benchmark::State& state) {
    SDEParams p;
    p.model = SDEModel::gbm;
    p.phi = 0.05;
    p.S0 = 100.0;
    p.sigma = 0.2;
    const std::size_t paths = std::size_t(state.range(0));
    for (auto _ : state) {
        auto e = simulate(p, 1.0, 16, paths, 42);
        benchmark::DoNotOptimize(e);
    }
    state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(paths) * 16);
}
BENCHMARK(BM_SimulateGBM)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
