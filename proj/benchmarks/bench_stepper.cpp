#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "rnp/cho.hpp"
#include "rnp/diagnostics.hpp"
#include "rnp/stepper.hpp"

using namespace rnp;

namespace {

Field smooth_field(const Grid& g, double base, double amp, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mode(1, 3);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Field f(g, base);
  for (int m = 0; m < 3; ++m) {
    const int mx = mode(rng), my = mode(rng);
    const double a = coef(rng) * amp / 3.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        f(i, j) += a * std::cos(M_PI * mx * g.x_center(i) / g.lx) *
                   std::cos(M_PI * my * g.y_center(j) / g.ly);
  }
  return f;
}

SolverConfig baseline() {
  SolverConfig cfg;
  cfg.grid = Grid(64, 64);
  return cfg.resolved();
}

SimState rough_state(const Stepper& st) {
  const Grid& g = st.config().grid;
  return st.make_state(smooth_field(g, 0.2, 0.08, 1), smooth_field(g, 0.2, 0.08, 2),
                       smooth_field(g, 0.5, 0.02, 3), smooth_field(g, 0.25, 0.01, 4),
                       smooth_field(g, 0.25, 0.01, 5));
}

}  // namespace

static void FullStepBaseline(benchmark::State& state) {
  const Stepper st(baseline());
  SimState s = st.make_initial_state();
  for (auto _ : state) {
    st.step(s);
    benchmark::DoNotOptimize(s.phi1.data());
  }
}
BENCHMARK(FullStepBaseline);

static void FullStepStructured(benchmark::State& state) {
  const Stepper st(baseline());
  SimState s = rough_state(st);
  for (auto _ : state) {
    st.step(s);
    benchmark::DoNotOptimize(s.phi1.data());
  }
}
BENCHMARK(FullStepStructured);

static void SourceEvaluation(benchmark::State& state) {
  const Stepper st(baseline());
  const SimState s = rough_state(st);
  for (auto _ : state) benchmark::DoNotOptimize(st.eval_sources(s));
}
BENCHMARK(SourceEvaluation);

static void DiffusionReactionStep(benchmark::State& state) {
  const Stepper st(baseline());
  SimState s = rough_state(st);
  const SourceEval src = st.eval_sources(s);
  for (auto _ : state) {
    st.rd_step(s, src);
    benchmark::DoNotOptimize(s.P.data());
  }
}
BENCHMARK(DiffusionReactionStep);

static void RecordEvaluation(benchmark::State& state) {
  const SolverConfig cfg = baseline();
  const Stepper st(cfg);
  const SimState s = rough_state(st);
  for (auto _ : state) benchmark::DoNotOptimize(record(s, cfg));
}
BENCHMARK(RecordEvaluation);

static void ScalarModelStep(benchmark::State& state) {
  ChoConfig cfg;
  cfg.grid = Grid(64, 64);
  cfg.tau = 1e-3;
  const ChoStepper st(cfg);
  ChoState s = st.make_initial_state();
  for (auto _ : state) {
    st.step(s);
    benchmark::DoNotOptimize(s.phi.data());
  }
}
BENCHMARK(ScalarModelStep);

BENCHMARK_MAIN();
