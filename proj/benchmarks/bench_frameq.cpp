#include <benchmark/benchmark.h>

#include <memory>

#include "frameq/bounds.hpp"
#include "frameq/constructions.hpp"
#include "frameq/frame.hpp"
#include "frameq/quantizers.hpp"
#include "frameq/rng.hpp"

using namespace frameq;

namespace {

Frame onb(int n) {
  Frame f;
  f.synthesis = Eigen::MatrixXd::Identity(n, n);
  f.analysis = f.synthesis;
  return f;
}

void BM_FrameBounds(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  Frame f;
  f.synthesis.resize(n, 3 * n);
  for (int j = 0; j < 3 * n; ++j) f.synthesis.col(j) = rng.gaussian_vector(n);
  f.analysis = f.synthesis;
  for (auto _ : state) {
    benchmark::DoNotOptimize(frame_bounds(f));
  }
}
BENCHMARK(BM_FrameBounds)->Arg(8)->Arg(32)->Arg(128);

void BM_ZNormIntervalMax(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  Rng rng(2);
  Frame f;
  f.synthesis.resize(8, N);
  for (int j = 0; j < N; ++j) f.synthesis.col(j) = rng.gaussian_vector(8);
  f.analysis = f.synthesis;
  const Eigen::VectorXd a = rng.uniform_vector(N, -1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(z_norm(f, a, ZNormVariant::interval_max).value);
  }
  state.SetComplexityN(N);
}
BENCHMARK(BM_ZNormIntervalMax)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_DyadicQuantize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = 7;
  const DyadicFrame dy = dyadic_frame(onb(n), m);
  Rng rng(3);
  const Eigen::VectorXd a = rng.uniform_vector(2 * n * m, -1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dyadic_quantize(dy, a));
  }
}
BENCHMARK(BM_DyadicQuantize)->Arg(8)->Arg(32);

void BM_KashinRepresent(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const KashinFrame kf = kashin_frame(n, 3 * n, 4, 8);
  Rng rng(5);
  const Eigen::VectorXd x = sample_sphere(NormSpec::l2(), n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kashin_represent(kf, x));
  }
}
BENCHMARK(BM_KashinRepresent)->Arg(16)->Arg(64);

void BM_SigmaDelta(benchmark::State& state) {
  Rng rng(6);
  std::vector<double> y(static_cast<std::size_t>(state.range(0)));
  for (auto& v : y) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sigma_delta(y));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SigmaDelta)->Arg(1 << 10)->Arg(1 << 16);

void BM_EnumerateQuantizedSet(benchmark::State& state) {
  const Frame f = onb(2);
  const auto zf = std::make_shared<Frame>(f);
  const NormSpec z = NormSpec::z_interval_max(zf);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        enumerate_quantized_set(f, 0.25, 2.0, z, 8, 30.0));
  }
}
BENCHMARK(BM_EnumerateQuantizedSet);

}  // namespace

BENCHMARK_MAIN();
