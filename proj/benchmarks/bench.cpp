#include <benchmark/benchmark.h>

#include "adversketch/attack.hpp"
#include "adversketch/verification.hpp"

using namespace adversketch;

namespace {

SparseVector random_vector(std::uint64_t n, int support, std::uint64_t seed) {
    Rng rng(seed);
    SparseVector v;
    while (static_cast<int>(v.support_size()) < support) {
        v.set(rng.below(n), rng.uniform(-2.0, 2.0));
    }
    return v;
}

void BM_sketch_update(benchmark::State& state) {
    const SketchParams params{1ull << 40, 9, 32};
    const SketchRandomness rho(params, 1);
    const SparseVector v = random_vector(params.n, static_cast<int>(state.range(0)), 2);
    SketchMatrix sk(params);
    for (auto _ : state) {
        add_scaled(sk, rho, v, 1.0);
        benchmark::DoNotOptimize(sk.at(0, 0));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_sketch_update)->Arg(64)->Arg(1024)->Arg(8192);

void BM_adjusted_direct(benchmark::State& state) {
    const SketchParams params{1ull << 40, 9, 32};
    const SketchRandomness rho(params, 1);
    const SparseVector v = random_vector(params.n, static_cast<int>(state.range(0)), 2);
    const std::uint64_t key = 12345;
    for (auto _ : state) {
        benchmark::DoNotOptimize(adjusted_measurements_direct(rho, v, key));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * params.ell);
}
BENCHMARK(BM_adjusted_direct)->Arg(64)->Arg(1024)->Arg(8192);

void BM_attack_query_loop(benchmark::State& state) {
    const SketchParams params{1ull << 40, 9, 32};
    const SketchRandomness rho(params, 1);
    AttackConfig cfg{params, static_cast<int>(state.range(0)), 256, 0.2, 1.2, 0.2, 1e-3, 7};
    CorrectnessParams est{0.178, cfg.a, cfg.c, params.ell, cfg.sigma()};
    auto f = median_threshold_estimator(est);
    for (auto _ : state) {
        const AttackTrace trace = universal_attack(
            rho, [&](int) -> ReportingFunction& { return *f; }, cfg, false);
        benchmark::DoNotOptimize(trace.adversarial.support_size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_attack_query_loop)->Arg(16)->Arg(64);

void BM_mean_est_attack(benchmark::State& state) {
    MeanAttackConfig cfg{0.3, 1.3, 0.3, 1.0, 9, static_cast<int>(state.range(0)), 3};
    CorrectnessParams est{0.178, cfg.a, cfg.c, cfg.ell, cfg.sigma};
    auto f = median_threshold_estimator(est);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            mean_est_attack([&](int) -> ReportingFunction& { return *f; }, cfg).attack_mean());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_mean_est_attack)->Arg(100)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
