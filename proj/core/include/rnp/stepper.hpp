#pragma once

#include <cstdint>
#include <memory>

#include "rnp/dct.hpp"
#include "rnp/grid.hpp"
#include "rnp/meanfield.hpp"
#include "rnp/potential.hpp"
#include "rnp/reactions.hpp"

namespace rnp {

struct DiagnosticsRecord;

struct SolverConfig {
  Grid grid;
  ReactionCoeffs coeffs;
  PotentialParams pot;
  double tau = 0.0;  // <= 0 selects the default min(hx, hy)^2 / 8
  double T_final = 0.05;
  // Absolute discrete-L2 residual target of the implicit step. The floor
  // attainable in double is ~eps/lambda * 8/h^2 (Yosida-gradient rounding
  // through the Laplacian), about 1e-8 at the 64x64 / lambda = 1e-3 defaults.
  double newton_tol = 1e-7;
  int newton_max_iter = 30;
  int output_every = 16;
  double alpha_weight = 0.5;  // alpha of the t^{3/2 - alpha} mu probe
  double P0_const = 0.5;
  double P0_perturb_amp = 0.0;
  uint64_t seed = 1;
  bool zero_sources = false;  // diagnostic switch: forces S == 0, skips rate validation

  double resolved_tau() const;
  /// Fills the dependent fields (coeffs.T_final, coeffs.area) and checks bounds.
  SolverConfig resolved() const;
  void validate() const;
};

struct SimState {
  double t = 0.0;
  long long step_index = 0;
  Field phi1, phi2, mu1, mu2, P, R1, R2;

  // Spatial means carried in extended precision. The implicit solves preserve
  // cell means exactly in exact arithmetic; after each solve the fields are
  // shifted by a constant (of the order of the solver tolerance) so their
  // means match these accumulators, which keeps every mass balance at
  // roundoff over arbitrarily many steps.
  long double m_phi1 = 0.0L, m_phi2 = 0.0L, m_P = 0.0L, m_R1 = 0.0L, m_R2 = 0.0L;
};

/// Source terms evaluated at one time level, shared by both sub-steps so the
/// antisymmetric cancellations stay bit-exact.
struct SourceEval {
  SourceFields s;
  Field phiJ1, phiJ2;  // resolvent-mapped phases
  double jmean1 = 0.0, jmean2 = 0.0;
  double fmean1 = 0.0, fmean2 = 0.0;  // means of h(P) h(R_i)
  double max_grad_norm = 0.0;         // max-cell |Yosida gradient|
};

struct StepStats {
  MeanSample sample;        // means at the step's departure level
  double newton_residual = 0.0;
  int newton_iterations = 0;
  int krylov_iterations = 0;
};

/// Sink receiving the run outputs. `on_state` fires at the record cadence and
/// can be used for snapshots.
class RunSink {
 public:
  virtual ~RunSink() = default;
  virtual void on_record(const DiagnosticsRecord&) {}
  virtual void on_mean_sample(const MeanSample&) {}
  virtual void on_state(const SimState&) {}
};

/// Semi-implicit integrator for the regularized system: convex-splitting
/// backward Euler for the two-component Cahn-Hilliard block (implicit
/// Laplacian and Yosida gradient, explicit smooth potential part and
/// sources), backward-Euler diffusion with explicit truncated reactions for
/// the protein and RNA block. Owns the spectral workspace; one instance per
/// configuration.
class Stepper {
 public:
  explicit Stepper(const SolverConfig& cfg);

  const SolverConfig& config() const { return cfg_; }

  SimState make_initial_state() const;

  /// Initial state from a caller-supplied protein field (validated as usual).
  SimState make_initial_state(const Field& P0) const;

  /// Assembles a state at t = 0 from caller-supplied fields (no validation):
  /// mu is evaluated from the constitutive relation and the mean accumulators
  /// are initialized from the fields.
  SimState make_state(const Field& phi1, const Field& phi2, const Field& P, const Field& R1,
                      const Field& R2) const;

  /// Sources and resolvent data at the state's time level.
  SourceEval eval_sources(const SimState& s) const;

  /// One Cahn-Hilliard sub-step: Newton on the coupled elliptic system to
  /// newton_tol in the discrete L2 norm. Updates phi and mu.
  StepStats ch_step(SimState& s, const SourceEval& src) const;

  /// One diffusion-reaction sub-step: conjugate gradients on (I - tau lap)
  /// per field. Updates P, R1, R2.
  void rd_step(SimState& s, const SourceEval& src) const;

  /// Full step: sources evaluated once and shared, both sub-steps, time
  /// advanced to (step_index + 1) * tau.
  StepStats step(SimState& s) const;

 private:
  SolverConfig cfg_;
  double tau_;
  std::unique_ptr<DctWorkspace> dct_;
};

SimState init_state(const SolverConfig& cfg);
void ch_step(SimState& s, const SolverConfig& cfg);
void rd_step(SimState& s, const SolverConfig& cfg);
void step(SimState& s, const SolverConfig& cfg);

/// Runs until t >= T_final (ceil(T/tau) full steps of length tau), pushing a
/// MeanSample every step and a DiagnosticsRecord every `output_every` steps
/// plus the initial and final ones. Deterministic for a fixed config.
SimState run(const SolverConfig& cfg, RunSink& sink);

/// Builds the initial protein field: the constant P0_const plus, when
/// P0_perturb_amp > 0, a seeded smooth cosine perturbation normalized to that
/// sup-norm amplitude.
Field make_p0_field(const SolverConfig& cfg);

}  // namespace rnp
