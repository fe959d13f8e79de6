#include "rnp/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "rnp/diagnostics.hpp"
#include "rnp/errors.hpp"

namespace rnp {

namespace {

long double ld_mean_raw(const double* v, int n) {
  long double acc = 0.0L;
  for (int k = 0; k < n; ++k) acc += v[k];
  return acc / n;
}

long double ld_mean(const Field& f) { return ld_mean_raw(f.data(), f.size()); }

void shift_to_mean(Field& f, long double target) {
  const double shift = static_cast<double>(target - ld_mean(f));
  double* v = f.data();
  const int n = f.size();
  for (int k = 0; k < n; ++k) v[k] += shift;
}

double dot_raw(const std::vector<double>& a, const std::vector<double>& b) {
  long double acc = 0.0L;
  for (size_t k = 0; k < a.size(); ++k) acc += static_cast<long double>(a[k]) * b[k];
  return static_cast<double>(acc);
}

double norm_raw(const std::vector<double>& a) { return std::sqrt(dot_raw(a, a)); }

}  // namespace

double SolverConfig::resolved_tau() const {
  if (tau > 0.0) return tau;
  const double h = std::min(grid.hx(), grid.hy());
  return h * h / 8.0;
}

SolverConfig SolverConfig::resolved() const {
  SolverConfig c = *this;
  c.tau = resolved_tau();
  c.coeffs.T_final = c.T_final;
  c.coeffs.area = c.grid.area();
  c.validate();
  return c;
}

void SolverConfig::validate() const {
  pot.validate();
  if (!(resolved_tau() > 0.0)) throw std::invalid_argument("SolverConfig: tau must be positive");
  if (T_final < 0.0) throw std::invalid_argument("SolverConfig: T_final must be nonnegative");
  if (!(newton_tol > 0.0 && newton_tol <= 1e-6))
    throw std::invalid_argument("SolverConfig: newton_tol must lie in (0, 1e-6]");
  if (newton_max_iter < 1) throw std::invalid_argument("SolverConfig: newton_max_iter must be >= 1");
  if (output_every < 1) throw std::invalid_argument("SolverConfig: output_every must be >= 1");
  if (!(alpha_weight > 0.0 && alpha_weight < 1.0))
    throw std::invalid_argument("SolverConfig: alpha_weight must lie in (0, 1)");
}

Field make_p0_field(const SolverConfig& cfg) {
  const Grid& g = cfg.grid;
  Field p0(g, cfg.P0_const);
  if (cfg.P0_perturb_amp <= 0.0) return p0;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> mode(1, 4);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  constexpr int kModes = 4;
  int mx[kModes], my[kModes];
  double a[kModes];
  for (int k = 0; k < kModes; ++k) {
    mx[k] = mode(rng);
    my[k] = mode(rng);
    a[k] = coef(rng);
  }
  Field s(g);
  double maxabs = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double v = 0.0;
      for (int k = 0; k < kModes; ++k)
        v += a[k] * std::cos(M_PI * mx[k] * g.x_center(i) / g.lx) *
             std::cos(M_PI * my[k] * g.y_center(j) / g.ly);
      s(i, j) = v;
      maxabs = std::max(maxabs, std::abs(v));
    }
  if (maxabs < 1e-12) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) s(i, j) = std::cos(M_PI * g.x_center(i) / g.lx);
    maxabs = max_value(s);
  }
  const double scale = cfg.P0_perturb_amp / maxabs;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) p0(i, j) += scale * s(i, j);
  return p0;
}

Stepper::Stepper(const SolverConfig& cfg) : cfg_(cfg.resolved()), tau_(cfg_.tau) {
  dct_ = std::make_unique<DctWorkspace>(cfg_.grid);
}

SimState Stepper::make_initial_state() const { return make_initial_state(make_p0_field(cfg_)); }

SimState Stepper::make_initial_state(const Field& p0) const {
  const Grid& g = cfg_.grid;
  if (!(p0.grid() == g)) throw std::invalid_argument("make_initial_state: P0 grid mismatch");
  if (!cfg_.zero_sources) {
    const CoeffReport cr = validate_coeffs(cfg_.coeffs);
    if (!cr.ok) throw std::invalid_argument("init_state: " + cr.message);
    const InitialReport ir = validate_initial(p0, cfg_.coeffs);
    if (!ir.ok) throw std::invalid_argument("init_state: " + ir.message);
  }

  SimState s;
  s.t = 0.0;
  s.step_index = 0;
  s.phi1 = Field(g, 0.0);
  s.phi2 = Field(g, 0.0);
  s.P = p0;
  s.R1 = Field(g);
  s.R2 = Field(g);
  for (int k = 0; k < g.size(); ++k) {
    const double r = 0.5 * (1.0 - p0.data()[k]);
    s.R1.data()[k] = r;
    s.R2.data()[k] = r;
  }

  const PotentialParams& pot = cfg_.pot;
  const ResolventResult at_zero = resolvent({0.0, 0.0}, pot.lambda, pot.variant);
  const Vec2 g2 = pot.variant == PotentialVariant::flory_huggins
                      ? psi2_eval({0.0, 0.0}, pot).second
                      : tilde_psi2_eval({0.0, 0.0}, pot).second;
  s.mu1 = Field(g, pot.bigA * (at_zero.grad.a + g2.a));
  s.mu2 = Field(g, pot.bigA * (at_zero.grad.b + g2.b));

  s.m_phi1 = ld_mean(s.phi1);
  s.m_phi2 = ld_mean(s.phi2);
  s.m_P = ld_mean(s.P);
  s.m_R1 = ld_mean(s.R1);
  s.m_R2 = ld_mean(s.R2);
  return s;
}

SimState Stepper::make_state(const Field& phi1, const Field& phi2, const Field& P,
                             const Field& R1, const Field& R2) const {
  const Grid& g = cfg_.grid;
  for (const Field* f : {&phi1, &phi2, &P, &R1, &R2})
    if (!(f->grid() == g)) throw std::invalid_argument("make_state: field grid mismatch");

  SimState s;
  s.t = 0.0;
  s.step_index = 0;
  s.phi1 = phi1;
  s.phi2 = phi2;
  s.P = P;
  s.R1 = R1;
  s.R2 = R2;
  s.mu1 = Field(g);
  s.mu2 = Field(g);

  const PotentialParams& pot = cfg_.pot;
  const int n = g.size();
  std::vector<double> w1(static_cast<size_t>(n)), w2(static_cast<size_t>(n)),
      lap1(static_cast<size_t>(n)), lap2(static_cast<size_t>(n));
  resolvent_sweep(n, phi1.data(), phi2.data(), pot.lambda, pot.variant, nullptr, nullptr,
                  w1.data(), w2.data());
  laplacian_raw(g, phi1.data(), lap1.data());
  laplacian_raw(g, phi2.data(), lap2.data());
  const double eps2 = pot.eps * pot.eps;
  for (int k = 0; k < n; ++k) {
    const Vec2 p{phi1.data()[k], phi2.data()[k]};
    const Vec2 g2 = pot.variant == PotentialVariant::flory_huggins
                        ? psi2_eval(p, pot).second
                        : tilde_psi2_eval(p, pot).second;
    s.mu1.data()[k] = -eps2 * lap1[static_cast<size_t>(k)] + pot.bigA * (w1[static_cast<size_t>(k)] + g2.a);
    s.mu2.data()[k] = -eps2 * lap2[static_cast<size_t>(k)] + pot.bigA * (w2[static_cast<size_t>(k)] + g2.b);
  }
  s.m_phi1 = ld_mean(s.phi1);
  s.m_phi2 = ld_mean(s.phi2);
  s.m_P = ld_mean(s.P);
  s.m_R1 = ld_mean(s.R1);
  s.m_R2 = ld_mean(s.R2);
  return s;
}

SourceEval Stepper::eval_sources(const SimState& s) const {
  const Grid& g = cfg_.grid;
  SourceEval ev;
  ev.phiJ1 = Field(g);
  ev.phiJ2 = Field(g);
  Field grad1(g), grad2(g);
  ev.max_grad_norm =
      resolvent_sweep(g.size(), s.phi1.data(), s.phi2.data(), cfg_.pot.lambda, cfg_.pot.variant,
                      ev.phiJ1.data(), ev.phiJ2.data(), grad1.data(), grad2.data());
  ev.jmean1 = static_cast<double>(ld_mean(ev.phiJ1));
  ev.jmean2 = static_cast<double>(ld_mean(ev.phiJ2));

  long double f1 = 0.0L, f2 = 0.0L;
  const int n = g.size();
  for (int k = 0; k < n; ++k) {
    const double hp = truncate(s.P.data()[k]);
    f1 += hp * truncate(s.R1.data()[k]);
    f2 += hp * truncate(s.R2.data()[k]);
  }
  ev.fmean1 = static_cast<double>(f1 / n);
  ev.fmean2 = static_cast<double>(f2 / n);

  if (cfg_.zero_sources) {
    ev.s = SourceFields{Field(g), Field(g), Field(g), Field(g), Field(g)};
  } else {
    ev.s = sources(ev.phiJ1, ev.phiJ2, s.P, s.R1, s.R2, cfg_.coeffs, /*truncated=*/true);
  }
  return ev;
}

StepStats Stepper::ch_step(SimState& s, const SourceEval& src) const {
  const Grid& g = cfg_.grid;
  const int n = g.size();
  const double tau = tau_;
  const PotentialParams& pot = cfg_.pot;
  const double eps2 = pot.eps * pot.eps;
  const double A = pot.bigA;
  const double lambda = pot.lambda;
  const PotentialVariant variant = pot.variant;
  const double cell = g.cell_area();

  // explicit smooth-part gradient at the departure level
  std::vector<double> g1(static_cast<size_t>(n)), g2v(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    const Vec2 p{s.phi1.data()[k], s.phi2.data()[k]};
    const Vec2 gr = variant == PotentialVariant::flory_huggins ? psi2_eval(p, pot).second
                                                               : tilde_psi2_eval(p, pot).second;
    g1[static_cast<size_t>(k)] = A * gr.a;
    g2v[static_cast<size_t>(k)] = A * gr.b;
  }

  const double* un1 = s.phi1.data();
  const double* un2 = s.phi2.data();
  const double* s1 = src.s.sphi1.data();
  const double* s2 = src.s.sphi2.data();

  std::vector<double> u1(un1, un1 + n), u2(un2, un2 + n);
  std::vector<double> p1(src.phiJ1.data(), src.phiJ1.data() + n);
  std::vector<double> p2(src.phiJ2.data(), src.phiJ2.data() + n);
  std::vector<double> w1(static_cast<size_t>(n)), w2(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    w1[static_cast<size_t>(k)] = (un1[k] - p1[static_cast<size_t>(k)]) / lambda;
    w2[static_cast<size_t>(k)] = (un2[k] - p2[static_cast<size_t>(k)]) / lambda;
  }

  std::vector<double> mu1(static_cast<size_t>(n)), mu2(static_cast<size_t>(n));
  std::vector<double> lap1(static_cast<size_t>(n)), lap2(static_cast<size_t>(n));
  std::vector<double> F1(static_cast<size_t>(n)), F2(static_cast<size_t>(n));

  auto eval_residual = [&](const std::vector<double>& v1, const std::vector<double>& v2,
                           const std::vector<double>& ww1,
                           const std::vector<double>& ww2) -> double {
    laplacian_raw(g, v1.data(), lap1.data());
    laplacian_raw(g, v2.data(), lap2.data());
    for (int k = 0; k < n; ++k) {
      mu1[static_cast<size_t>(k)] =
          -eps2 * lap1[static_cast<size_t>(k)] + A * ww1[static_cast<size_t>(k)] + g1[static_cast<size_t>(k)];
      mu2[static_cast<size_t>(k)] =
          -eps2 * lap2[static_cast<size_t>(k)] + A * ww2[static_cast<size_t>(k)] + g2v[static_cast<size_t>(k)];
    }
    laplacian_raw(g, mu1.data(), lap1.data());
    laplacian_raw(g, mu2.data(), lap2.data());
    long double acc = 0.0L;
    for (int k = 0; k < n; ++k) {
      const double f1 = (v1[static_cast<size_t>(k)] - un1[k]) / tau - lap1[static_cast<size_t>(k)] - s1[k];
      const double f2 = (v2[static_cast<size_t>(k)] - un2[k]) / tau - lap2[static_cast<size_t>(k)] - s2[k];
      F1[static_cast<size_t>(k)] = f1;
      F2[static_cast<size_t>(k)] = f2;
      acc += static_cast<long double>(f1) * f1 + static_cast<long double>(f2) * f2;
    }
    return std::sqrt(static_cast<double>(acc * cell));
  };

  double res = eval_residual(u1, u2, w1, w2);
  int newton_it = 0;
  int krylov_total = 0;

  std::vector<double> B11(static_cast<size_t>(n)), B12(static_cast<size_t>(n)),
      B22(static_cast<size_t>(n));
  std::vector<double> rhs(2 * static_cast<size_t>(n)), delta(2 * static_cast<size_t>(n));
  std::vector<double> t1(static_cast<size_t>(n)), t2(static_cast<size_t>(n));
  std::vector<double> q1(static_cast<size_t>(n)), q2(static_cast<size_t>(n));

  auto apply_J = [&](const std::vector<double>& v, std::vector<double>& out) {
    const double* v1 = v.data();
    const double* v2 = v.data() + n;
    laplacian_raw(g, v1, t1.data());
    laplacian_raw(g, v2, t2.data());
    for (int k = 0; k < n; ++k) {
      const size_t sk = static_cast<size_t>(k);
      q1[sk] = -eps2 * t1[sk] + A * (B11[sk] * v1[k] + B12[sk] * v2[k]);
      q2[sk] = -eps2 * t2[sk] + A * (B12[sk] * v1[k] + B22[sk] * v2[k]);
    }
    laplacian_raw(g, q1.data(), t1.data());
    laplacian_raw(g, q2.data(), t2.data());
    for (int k = 0; k < n; ++k) {
      const size_t sk = static_cast<size_t>(k);
      out[sk] = v1[k] / tau - t1[sk];
      out[sk + static_cast<size_t>(n)] = v2[k] / tau - t2[sk];
    }
  };

  double beta1 = 0.0, beta2 = 0.0;
  auto apply_M = [&](const std::vector<double>& v, std::vector<double>& out) {
    dct_->solve_modal(v.data(), out.data(), 1.0 / tau, -beta1, eps2);
    dct_->solve_modal(v.data() + n, out.data() + n, 1.0 / tau, -beta2, eps2);
  };

  std::vector<double> r(2 * static_cast<size_t>(n)), r0(2 * static_cast<size_t>(n)),
      pv(2 * static_cast<size_t>(n)), ph(2 * static_cast<size_t>(n)),
      vv(2 * static_cast<size_t>(n)), sv(2 * static_cast<size_t>(n)),
      sh(2 * static_cast<size_t>(n)), tv(2 * static_cast<size_t>(n));

  auto bicgstab = [&](const std::vector<double>& b, std::vector<double>& x) -> int {
    std::fill(x.begin(), x.end(), 0.0);
    r = b;
    r0 = b;
    const double bnorm = norm_raw(b);
    const double tol = std::max(1e-8 * bnorm, 1e-300);
    if (bnorm <= tol) return 0;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(pv.begin(), pv.end(), 0.0);
    std::fill(vv.begin(), vv.end(), 0.0);
    for (int it = 1; it <= 400; ++it) {
      const double rho1 = dot_raw(r0, r);
      if (std::abs(rho1) < 1e-300)
        throw NumericalError("ch_step: Krylov breakdown", norm_raw(r), it);
      const double beta = (rho1 / rho) * (alpha / omega);
      rho = rho1;
      for (size_t k = 0; k < pv.size(); ++k) pv[k] = r[k] + beta * (pv[k] - omega * vv[k]);
      apply_M(pv, ph);
      apply_J(ph, vv);
      alpha = rho / dot_raw(r0, vv);
      for (size_t k = 0; k < sv.size(); ++k) sv[k] = r[k] - alpha * vv[k];
      if (norm_raw(sv) <= tol) {
        for (size_t k = 0; k < x.size(); ++k) x[k] += alpha * ph[k];
        return it;
      }
      apply_M(sv, sh);
      apply_J(sh, tv);
      const double tt = dot_raw(tv, tv);
      if (tt < 1e-300) throw NumericalError("ch_step: Krylov stagnation", norm_raw(sv), it);
      omega = dot_raw(tv, sv) / tt;
      for (size_t k = 0; k < x.size(); ++k) x[k] += alpha * ph[k] + omega * sh[k];
      for (size_t k = 0; k < r.size(); ++k) r[k] = sv[k] - omega * tv[k];
      if (norm_raw(r) <= tol) return it;
    }
    throw NumericalError("ch_step: Krylov solver did not converge", norm_raw(r), 400);
  };

  std::vector<double> u1t(static_cast<size_t>(n)), u2t(static_cast<size_t>(n));
  std::vector<double> w1t(static_cast<size_t>(n)), w2t(static_cast<size_t>(n));
  std::vector<double> p1t(static_cast<size_t>(n)), p2t(static_cast<size_t>(n));

  while (res > cfg_.newton_tol) {
    if (newton_it >= cfg_.newton_max_iter)
      throw NumericalError("ch_step: Newton did not converge", res, newton_it);
    ++newton_it;

    long double acc1 = 0.0L, acc2 = 0.0L;
    for (int k = 0; k < n; ++k) {
      const size_t sk = static_cast<size_t>(k);
      const Mat2 B = yosida_jacobian_at({p1[sk], p2[sk]}, lambda, variant);
      B11[sk] = B.m11;
      B12[sk] = B.m12;
      B22[sk] = B.m22;
      acc1 += B.m11;
      acc2 += B.m22;
    }
    beta1 = A * static_cast<double>(acc1 / n);
    beta2 = A * static_cast<double>(acc2 / n);

    for (int k = 0; k < n; ++k) {
      rhs[static_cast<size_t>(k)] = -F1[static_cast<size_t>(k)];
      rhs[static_cast<size_t>(k) + static_cast<size_t>(n)] = -F2[static_cast<size_t>(k)];
    }
    krylov_total += bicgstab(rhs, delta);

    double alpha_ls = 1.0;
    double res_t = res;
    bool accepted = false;
    for (int ls = 0; ls < 25; ++ls) {
      for (int k = 0; k < n; ++k) {
        const size_t sk = static_cast<size_t>(k);
        u1t[sk] = u1[sk] + alpha_ls * delta[sk];
        u2t[sk] = u2[sk] + alpha_ls * delta[sk + static_cast<size_t>(n)];
      }
      resolvent_sweep(n, u1t.data(), u2t.data(), lambda, variant, p1t.data(), p2t.data(),
                      w1t.data(), w2t.data());
      res_t = eval_residual(u1t, u2t, w1t, w2t);
      if (std::isfinite(res_t) && res_t * res_t <= (1.0 - 1e-4 * alpha_ls) * res * res) {
        accepted = true;
        break;
      }
      alpha_ls *= 0.5;
    }
    if (!accepted) throw NumericalError("ch_step: line search failed", res, newton_it);
    u1.swap(u1t);
    u2.swap(u2t);
    w1.swap(w1t);
    w2.swap(w2t);
    p1.swap(p1t);
    p2.swap(p2t);
    res = res_t;
  }

  // The exact solution's mean is known a priori: the Laplacian fluxes cancel,
  // so mean(phi^{n+1}) = mean(phi^n) + tau * mean(S). Re-impose it so the
  // mass identities hold at roundoff over the whole run.
  const long double target1 = s.m_phi1 + static_cast<long double>(tau) * ld_mean_raw(s1, n);
  const long double target2 = s.m_phi2 + static_cast<long double>(tau) * ld_mean_raw(s2, n);
  std::copy(u1.begin(), u1.end(), s.phi1.data());
  std::copy(u2.begin(), u2.end(), s.phi2.data());
  shift_to_mean(s.phi1, target1);
  shift_to_mean(s.phi2, target2);
  s.m_phi1 = target1;
  s.m_phi2 = target2;

  resolvent_sweep(n, s.phi1.data(), s.phi2.data(), lambda, variant, p1.data(), p2.data(),
                  w1.data(), w2.data());
  laplacian_raw(g, s.phi1.data(), lap1.data());
  laplacian_raw(g, s.phi2.data(), lap2.data());
  for (int k = 0; k < n; ++k) {
    const size_t sk = static_cast<size_t>(k);
    s.mu1.data()[k] = -eps2 * lap1[sk] + A * w1[sk] + g1[sk];
    s.mu2.data()[k] = -eps2 * lap2[sk] + A * w2[sk] + g2v[sk];
  }
  if (!all_finite(s.phi1) || !all_finite(s.phi2) || !all_finite(s.mu1) || !all_finite(s.mu2))
    throw NumericalError("ch_step: non-finite field", res, newton_it);

  StepStats st;
  st.newton_residual = res;
  st.newton_iterations = newton_it;
  st.krylov_iterations = krylov_total;
  return st;
}

void Stepper::rd_step(SimState& s, const SourceEval& src) const {
  const Grid& g = cfg_.grid;
  const int n = g.size();
  const double tau = tau_;

  std::vector<double> b(static_cast<size_t>(n)), x(static_cast<size_t>(n)),
      r(static_cast<size_t>(n)), p(static_cast<size_t>(n)), ap(static_cast<size_t>(n));

  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    laplacian_raw(g, v.data(), out.data());
    for (int k = 0; k < n; ++k)
      out[static_cast<size_t>(k)] = v[static_cast<size_t>(k)] - tau * out[static_cast<size_t>(k)];
  };

  auto solve_one = [&](Field& X, const Field& S, long double& acc) {
    const double* xv = X.data();
    const double* sv = S.data();
    for (int k = 0; k < n; ++k) {
      b[static_cast<size_t>(k)] = xv[k] + tau * sv[k];
      x[static_cast<size_t>(k)] = xv[k];
    }
    apply(x, ap);
    for (int k = 0; k < n; ++k) r[static_cast<size_t>(k)] = b[static_cast<size_t>(k)] - ap[static_cast<size_t>(k)];
    p = r;
    double rs = dot_raw(r, r);
    const double bnorm = norm_raw(b);
    const double tol = std::max(1e-14 * bnorm, 1e-300);
    int it = 0;
    while (std::sqrt(rs) > tol) {
      if (++it > 500)
        throw NumericalError("rd_step: conjugate gradients stagnated", std::sqrt(rs), it);
      apply(p, ap);
      const double alpha = rs / dot_raw(p, ap);
      for (int k = 0; k < n; ++k) {
        x[static_cast<size_t>(k)] += alpha * p[static_cast<size_t>(k)];
        r[static_cast<size_t>(k)] -= alpha * ap[static_cast<size_t>(k)];
      }
      const double rs1 = dot_raw(r, r);
      const double beta = rs1 / rs;
      rs = rs1;
      for (int k = 0; k < n; ++k)
        p[static_cast<size_t>(k)] = r[static_cast<size_t>(k)] + beta * p[static_cast<size_t>(k)];
    }
    std::copy(x.begin(), x.end(), X.data());
    // (I - tau lap) preserves cell means; re-impose the exact one.
    const long double target = acc + static_cast<long double>(tau) * ld_mean(S);
    shift_to_mean(X, target);
    acc = target;
    if (!all_finite(X)) throw NumericalError("rd_step: non-finite field", std::sqrt(rs), it);
  };

  solve_one(s.P, src.s.sp, s.m_P);
  solve_one(s.R1, src.s.sr1, s.m_R1);
  solve_one(s.R2, src.s.sr2, s.m_R2);
}

StepStats Stepper::step(SimState& s) const {
  const SourceEval src = eval_sources(s);

  MeanSample sample;
  sample.t = s.t;
  sample.y1 = static_cast<double>(ld_mean(s.phi1));
  sample.y2 = static_cast<double>(ld_mean(s.phi2));
  sample.f1 = src.fmean1;
  sample.f2 = src.fmean2;
  sample.j1 = src.jmean1;
  sample.j2 = src.jmean2;
  sample.pmean = static_cast<double>(ld_mean(s.P));
  sample.r1mean = static_cast<double>(ld_mean(s.R1));
  sample.r2mean = static_cast<double>(ld_mean(s.R2));
  sample.gap = cfg_.pot.lambda * src.max_grad_norm;

  StepStats st = ch_step(s, src);
  rd_step(s, src);
  s.step_index += 1;
  s.t = static_cast<double>(s.step_index) * tau_;
  st.sample = sample;
  return st;
}

SimState init_state(const SolverConfig& cfg) { return Stepper(cfg).make_initial_state(); }

void ch_step(SimState& s, const SolverConfig& cfg) {
  Stepper st(cfg);
  st.ch_step(s, st.eval_sources(s));
}

void rd_step(SimState& s, const SolverConfig& cfg) {
  Stepper st(cfg);
  st.rd_step(s, st.eval_sources(s));
}

void step(SimState& s, const SolverConfig& cfg) { Stepper(cfg).step(s); }

SimState run(const SolverConfig& cfg_in, RunSink& sink) {
  Stepper st(cfg_in);
  const SolverConfig& cfg = st.config();
  SimState s = st.make_initial_state();

  sink.on_record(record(s, cfg));
  sink.on_state(s);

  long long n_steps = 0;
  if (cfg.T_final > 0.0)
    n_steps = static_cast<long long>(std::ceil(cfg.T_final / cfg.tau - 1e-9));

  for (long long k = 1; k <= n_steps; ++k) {
    const StepStats stats = st.step(s);
    sink.on_mean_sample(stats.sample);
    if (k % cfg.output_every == 0 || k == n_steps) {
      sink.on_record(record(s, cfg));
      sink.on_state(s);
    }
  }

  if (n_steps > 0) {
    // terminal sample so the series covers [0, T]
    const SourceEval src = st.eval_sources(s);
    MeanSample sample;
    sample.t = s.t;
    sample.y1 = static_cast<double>(ld_mean(s.phi1));
    sample.y2 = static_cast<double>(ld_mean(s.phi2));
    sample.f1 = src.fmean1;
    sample.f2 = src.fmean2;
    sample.j1 = src.jmean1;
    sample.j2 = src.jmean2;
    sample.pmean = static_cast<double>(ld_mean(s.P));
    sample.r1mean = static_cast<double>(ld_mean(s.R1));
    sample.r2mean = static_cast<double>(ld_mean(s.R2));
    sample.gap = cfg.pot.lambda * src.max_grad_norm;
    sink.on_mean_sample(sample);
  }
  return s;
}

}  // namespace rnp
