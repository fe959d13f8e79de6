#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "rnp/dct.hpp"
#include "rnp/grid.hpp"

using namespace rnp;

namespace {

Field random_field(const Grid& g, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g);
  for (int k = 0; k < g.size(); ++k) f.data()[k] = u(rng);
  return f;
}

}  // namespace

static void Laplacian64(benchmark::State& state) {
  const Grid g(64, 64);
  const Field f = random_field(g, 1);
  Field out(g);
  for (auto _ : state) {
    laplacian_into(f, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(Laplacian64);

static void DirichletForm64(benchmark::State& state) {
  const Grid g(64, 64);
  const Field f = random_field(g, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dirichlet_form(f));
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(DirichletForm64);

static void ModalSolve64(benchmark::State& state) {
  const Grid g(64, 64);
  const DctWorkspace dct(g);
  const Field b = random_field(g, 3);
  Field x(g);
  const double tau = 3.05e-5;
  for (auto _ : state) {
    dct.solve_modal(b, x, 1.0 / tau, -100.0, 1.0);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(ModalSolve64);

static void Mean64(benchmark::State& state) {
  const Grid g(64, 64);
  const Field f = random_field(g, 4);
  for (auto _ : state) benchmark::DoNotOptimize(mean(f));
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(Mean64);

BENCHMARK_MAIN();
