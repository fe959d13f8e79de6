#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rnp/cho.hpp"
#include "rnp/potential.hpp"

using namespace rnp;

namespace {

std::vector<Vec2> sample_points(int n, double lo, double hi, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vec2> out(static_cast<size_t>(n));
  for (auto& v : out) v = Vec2{u(rng), u(rng)};
  return out;
}

}  // namespace

static void ResolventCold(benchmark::State& state) {
  const auto pts = sample_points(1024, -0.2, 0.7, 1);
  const double lambda = 1e-3;
  for (auto _ : state) {
    for (const Vec2& r : pts)
      benchmark::DoNotOptimize(resolvent(r, lambda, PotentialVariant::flory_huggins));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pts.size()));
}
BENCHMARK(ResolventCold);

static void ResolventWarmSweep(benchmark::State& state) {
  // smooth neighboring inputs, as seen by the stepper
  const int n = 4096;
  std::vector<double> r1(n), r2(n);
  for (int k = 0; k < n; ++k) {
    r1[k] = 0.2 + 0.05 * std::sin(0.01 * k);
    r2[k] = 0.25 + 0.05 * std::cos(0.01 * k);
  }
  std::vector<double> p1(n), p2(n), w1(n), w2(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolvent_sweep(n, r1.data(), r2.data(), 1e-3,
                                             PotentialVariant::flory_huggins, p1.data(),
                                             p2.data(), w1.data(), w2.data()));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(ResolventWarmSweep);

static void ResolventTilde(benchmark::State& state) {
  const auto pts = sample_points(1024, -0.2, 0.7, 2);
  for (auto _ : state) {
    for (const Vec2& r : pts)
      benchmark::DoNotOptimize(resolvent(r, 1e-3, PotentialVariant::tilde));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pts.size()));
}
BENCHMARK(ResolventTilde);

static void YosidaValue(benchmark::State& state) {
  const auto pts = sample_points(1024, -0.5, 1.2, 3);
  for (auto _ : state) {
    for (const Vec2& r : pts)
      benchmark::DoNotOptimize(yosida_value(r, 1e-2, PotentialVariant::flory_huggins));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pts.size()));
}
BENCHMARK(YosidaValue);

static void Psi1Conjugate(benchmark::State& state) {
  const auto pts = sample_points(4096, -6.0, 6.0, 4);
  for (auto _ : state) {
    for (const Vec2& z : pts) benchmark::DoNotOptimize(psi1_conjugate(z));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pts.size()));
}
BENCHMARK(Psi1Conjugate);

static void ScalarLogResolvent(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  std::vector<double> rs(4096);
  for (auto& r : rs) r = u(rng);
  for (auto _ : state) {
    for (double r : rs) benchmark::DoNotOptimize(scalar_resolvent(r, 1e-3));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rs.size()));
}
BENCHMARK(ScalarLogResolvent);

BENCHMARK_MAIN();
