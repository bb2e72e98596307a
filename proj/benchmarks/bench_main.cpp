#include <benchmark/benchmark.h>

#include "fedmf/datagen.hpp"
#include "fedmf/federation.hpp"
#include "fedmf/flops.hpp"
#include "fedmf/linalg.hpp"
#include "fedmf/solver.hpp"

namespace {

using namespace fedmf;

void BM_Matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = gaussian(n, n, 1);
    const Matrix b = gaussian(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
    state.counters["flops"] = benchmark::Counter(2.0 * n * n * n, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256);

void BM_MatmulTallSkinny(benchmark::State& state) {
    // The shape of a client's S^T (S V) product: n_i x d times d x r.
    const Matrix s = gaussian(200, 300, 1);
    const Matrix v = gaussian(300, static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(matmul_tn(s, matmul(s, v)));
}
BENCHMARK(BM_MatmulTallSkinny)->Arg(5)->Arg(20);

void BM_SymEig(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix g = gram(gaussian(2 * n, n, 3));
    for (auto _ : state) benchmark::DoNotOptimize(sym_eig(g));
}
BENCHMARK(BM_SymEig)->Arg(20)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

FederatedDataset bench_dataset() {
    SyntheticSpec spec;  // 25 clients x 200 rows, d = 200
    spec.noise_std = 1e-3;
    spec.seed = 4;
    return generate_synthetic(spec);
}

void BM_PowerInit(benchmark::State& state) {
    const auto clients = make_clients(bench_dataset(), 0);
    const auto alpha = static_cast<unsigned>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(power_init(clients, alpha, 5, seed++));
}
BENCHMARK(BM_PowerInit)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_LocalDescent(benchmark::State& state) {
    const auto ds = bench_dataset();
    const auto clients = make_clients(ds, 0);
    const Matrix v = power_init(clients, 0, 5, 1).v;
    SolverConfig cfg;
    cfg.iterations = 100;
    cfg.momentum = state.range(0) == 0 ? Momentum::none : Momentum::nesterov;
    cfg.record_trajectory = false;
    for (auto _ : state) benchmark::DoNotOptimize(local_descent(ds.shards[0], v, cfg, 7));
}
BENCHMARK(BM_LocalDescent)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
