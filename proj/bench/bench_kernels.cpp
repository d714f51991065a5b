#include <benchmark/benchmark.h>

#include <random>

#include "qpt/kernels.hpp"
#include "qpt/tomo.hpp"

namespace {

struct Workload {
  qpt::Matrix vectors;
  qpt::Matrix rho;
  qpt::RealVector weights;
};

const Workload& workload(int d) {
  static std::map<int, Workload> cache;
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;
  std::mt19937_64 rng(static_cast<std::uint64_t>(d));
  std::normal_distribution<double> g;
  const int n = d * d;
  qpt::Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = qpt::cplx(g(rng), g(rng));
  Workload w;
  w.vectors = qpt::tomography_vectors(qpt::generate_mubs(d));
  w.rho = a * a.adjoint();
  w.rho /= w.rho.trace().real();
  w.weights = qpt::kernels::born_probabilities_serial(w.vectors, w.rho).cwiseInverse();
  return cache.emplace(d, std::move(w)).first->second;
}

void BM_BornSerial(benchmark::State& state) {
  const Workload& w = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qpt::kernels::born_probabilities_serial(w.vectors, w.rho));
}

void BM_BornParallel(benchmark::State& state) {
  const Workload& w = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qpt::kernels::born_probabilities(w.vectors, w.rho));
}

void BM_AccumulateSerial(benchmark::State& state) {
  const Workload& w = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qpt::kernels::accumulate_operator_serial(w.vectors, w.weights));
}

void BM_AccumulateParallel(benchmark::State& state) {
  const Workload& w = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qpt::kernels::accumulate_operator(w.vectors, w.weights));
}

void BM_Reconstruct(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const bool parallel = state.range(1) != 0;
  const qpt::MubFamily mubs = qpt::generate_mubs(d);
  const auto table = qpt::forward_probabilities(qpt::optimal_cloning_channel(d), mubs);
  const auto data = qpt::sample_counts(table, qpt::SamplingModel::poisson(1e5), 1);
  qpt::MleOptions opts;
  opts.parallel = parallel;
  opts.record_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(qpt::mle_reconstruct(data, mubs, opts));
  state.SetLabel(parallel ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_BornSerial)->DenseRange(2, 5);
BENCHMARK(BM_BornParallel)->DenseRange(2, 5);
BENCHMARK(BM_AccumulateSerial)->DenseRange(2, 5);
BENCHMARK(BM_AccumulateParallel)->DenseRange(2, 5);
BENCHMARK(BM_Reconstruct)->ArgsProduct({{3, 5}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
