#include <benchmark/benchmark.h>

#include <random>

#include "gaugeopt/bodies.hpp"
#include "gaugeopt/gauge.hpp"
#include "gaugeopt/reductions.hpp"
#include "gaugeopt/spectral.hpp"

using namespace gaugeopt;

namespace {

Vec random_vec(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec v(d);
  for (auto& x : v) x = n(rng);
  return v;
}

ConvexBody body_by_index(int which, int size) {
  switch (which) {
    case 0: return make_l2_ball(size);
    case 1: return make_simplex_body(size).body;
    case 2: return make_birkhoff_body(size).body;
    default: return make_psd_unit_trace_body(size).body;
  }
}

void BM_GaugeApprox(benchmark::State& state) {
  const ConvexBody body = body_by_index(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  std::mt19937_64 rng(1);
  const Vec w = random_vec(rng, body.dim()).normalized() * body.outer_radius();
  for (auto _ : state) benchmark::DoNotOptimize(gauge_approx(body, w, 1e-3).gamma_tilde);
  state.SetLabel(body.name());
}
BENCHMARK(BM_GaugeApprox)->Args({0, 16})->Args({1, 16})->Args({2, 4})->Args({3, 4});

void BM_PolarLO(benchmark::State& state) {
  const ConvexBody body = with_outer_radius(body_by_index(static_cast<int>(state.range(0)), 8), 2.0);
  const LOVariant variant = state.range(1) ? LOVariant::full : LOVariant::one_dim;
  std::mt19937_64 prng(2);
  Rng rng(3);
  const Vec w = random_vec(prng, body.dim()).normalized() * 1.5;
  for (auto _ : state) benchmark::DoNotOptimize(polar_lo(body, w, 0.05, rng, variant).s_tilde.data());
  state.SetLabel(body.name() + (state.range(1) ? "/full" : "/one_dim"));
}
BENCHMARK(BM_PolarLO)->Args({0, 0})->Args({0, 1})->Args({1, 0})->Args({1, 1});

void BM_LargestSingularValue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  const Mat M = Eigen::Map<const Mat>(random_vec(rng, n * n).data(), n, n);
  for (auto _ : state) benchmark::DoNotOptimize(largest_singular_value(M, 1e-6).value);
}
BENCHMARK(BM_LargestSingularValue)->Arg(4)->Arg(16)->Arg(32);

void BM_Svd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  const Mat M = Eigen::Map<const Mat>(random_vec(rng, n * n).data(), n, n);
  for (auto _ : state) benchmark::DoNotOptimize(svd(M).sigma.data());
}
BENCHMARK(BM_Svd)->Arg(4)->Arg(16)->Arg(32);

void BM_WrapperRound(benchmark::State& state) {
  const ConvexBody body = body_by_index(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  auto alg = make_wrapper_ftrl(body, ToleranceSchedule::parse("quad", 0.1), LOVariant::one_dim, 6);
  std::mt19937_64 rng(7);
  for (auto _ : state) {
    const Vec x = alg->predict();
    alg->update(random_vec(rng, body.dim()) + x);
  }
  state.SetLabel(body.name());
}
BENCHMARK(BM_WrapperRound)->Args({0, 16})->Args({1, 16})->Args({2, 4})->Args({3, 4});

}  // namespace

BENCHMARK_MAIN();
