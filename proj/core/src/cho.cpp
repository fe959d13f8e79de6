#include "rnp/cho.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rnp/errors.hpp"
#include "rnp/potential.hpp"

namespace rnp {

void ChoConfig::validate() const {
  if (m_rate < 0.0) throw std::invalid_argument("ChoConfig: m_rate must be nonnegative");
  if (!(std::abs(c_oono) < 1.0)) throw std::invalid_argument("ChoConfig: c_oono must lie in (-1, 1)");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("ChoConfig: lambda must lie in (0, 1)");
  if (theta < 0.0) throw std::invalid_argument("ChoConfig: theta must be nonnegative");
  if (!(tau > 0.0)) throw std::invalid_argument("ChoConfig: tau must be positive");
  if (T_final < 0.0) throw std::invalid_argument("ChoConfig: T_final must be nonnegative");
  if (!(newton_tol > 0.0 && newton_tol <= 1e-6))
    throw std::invalid_argument("ChoConfig: newton_tol must lie in (0, 1e-6]");
  if (output_every < 1) throw std::invalid_argument("ChoConfig: output_every must be >= 1");
  if (!(phi0_const >= -1.0 && phi0_const <= 1.0))
    throw std::invalid_argument("ChoConfig: phi0_const must lie in [-1, 1]");
  if (phi0_const >= 1.0)
    throw std::invalid_argument("ChoConfig: the mean of phi0 must lie in [-1, 1)");
  if (forcing) {
    if (!(forcing->grid() == grid)) throw std::invalid_argument("ChoConfig: forcing grid mismatch");
    if (!all_finite(*forcing)) throw std::invalid_argument("ChoConfig: forcing must be finite");
  }
}

double f_log_prime(double r) {
  if (!(r > -1.0 && r < 1.0)) throw std::domain_error("f_log_prime: argument must lie in (-1, 1)");
  return 0.5 * (std::log1p(r) - std::log1p(-r));
}

double f_log1(double r) {
  if (!(r >= -1.0 && r <= 1.0)) throw std::domain_error("f_log1: argument must lie in [-1, 1]");
  return xlogx(0.5 * (1.0 + r)) + xlogx(0.5 * (1.0 - r));
}

double scalar_resolvent(double r, double lambda, double* grad_out) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scalar_resolvent: lambda must be positive");
  // solve g(u) = tanh(u) + lambda u - r = 0; g is strictly increasing, so a
  // bracket always exists and bisection backs up the Newton steps
  auto eval = [&](double v) { return std::tanh(v) + lambda * v - r; };
  double u;
  if (r > 1.0) {
    u = (r - 1.0) / lambda + 1.0;
  } else if (r < -1.0) {
    u = (r + 1.0) / lambda - 1.0;
  } else {
    u = std::atanh(std::max(-1.0 + 1e-12, std::min(1.0 - 1e-12, r)));
  }
  double lo = u, hi = u;
  double step = 1.0 + std::abs(u);
  while (eval(lo) > 0.0) {
    lo -= step;
    step *= 2.0;
  }
  step = 1.0 + std::abs(u);
  while (eval(hi) < 0.0) {
    hi += step;
    step *= 2.0;
  }

  constexpr double kTol = 1e-13;
  constexpr int kMaxIter = 200;
  double f = eval(u);
  int it = 0;
  for (; it < kMaxIter; ++it) {
    if (std::abs(f) <= kTol) break;
    if (f > 0.0)
      hi = u;
    else
      lo = u;
    const double th = std::tanh(u);
    const double df = (1.0 - th) * (1.0 + th) + lambda;
    double un = u - f / df;
    if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
    u = un;
    f = eval(u);
  }
  if (std::abs(f) > kTol)
    throw NumericalError("scalar_resolvent: iteration did not reach tolerance", std::abs(f), it);
  if (grad_out) *grad_out = u;
  return std::tanh(u);
}

double scalar_yosida_jacobian_at(double p, double lambda) {
  return 1.0 / ((1.0 - p * p) + lambda);
}

namespace {

long double ld_mean_raw(const double* v, int n) {
  long double acc = 0.0L;
  for (int k = 0; k < n; ++k) acc += v[k];
  return acc / n;
}

void shift_to_mean(Field& f, long double target) {
  const double shift = static_cast<double>(target - ld_mean_raw(f.data(), f.size()));
  for (int k = 0; k < f.size(); ++k) f.data()[k] += shift;
}

// sweep of the scalar resolvent; returns max |f'(J)|
double resolve_scalar(int n, const double* r, double lambda, double* p, double* w) {
  double max_abs = 0.0;
  for (int k = 0; k < n; ++k) {
    double g = 0.0;
    p[k] = scalar_resolvent(r[k], lambda, &g);
    if (w) w[k] = g;
    max_abs = std::max(max_abs, std::abs(g));
  }
  return max_abs;
}

double dot_raw(const std::vector<double>& a, const std::vector<double>& b) {
  long double acc = 0.0L;
  for (size_t k = 0; k < a.size(); ++k) acc += static_cast<long double>(a[k]) * b[k];
  return static_cast<double>(acc);
}

double norm_raw(const std::vector<double>& a) { return std::sqrt(dot_raw(a, a)); }

}  // namespace

ChoStepper::ChoStepper(const ChoConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  dct_ = std::make_unique<DctWorkspace>(cfg_.grid);
}

ChoState ChoStepper::make_initial_state() const {
  ChoState s;
  s.phi = Field(cfg_.grid, cfg_.phi0_const);
  s.mu = Field(cfg_.grid);
  const int n = cfg_.grid.size();
  double w0 = 0.0;
  const double p0 = scalar_resolvent(cfg_.phi0_const, cfg_.lambda, &w0);
  (void)p0;
  const double g2 = -2.0 * cfg_.theta * cfg_.phi0_const;
  for (int k = 0; k < n; ++k)
    s.mu.data()[k] = w0 + g2 + (cfg_.forcing ? cfg_.forcing->data()[k] : 0.0);
  s.mean_acc = ld_mean_raw(s.phi.data(), n);
  return s;
}

void ChoStepper::step(ChoState& s) const {
  const Grid& g = cfg_.grid;
  const int n = g.size();
  const double tau = cfg_.tau;
  const double lambda = cfg_.lambda;
  const double m = cfg_.m_rate;
  const double c = cfg_.c_oono;
  const double cell = g.cell_area();

  const double* un = s.phi.data();

  // explicit pieces at the departure level
  std::vector<double> srcv(static_cast<size_t>(n)), gexp(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    srcv[static_cast<size_t>(k)] = -m * un[k] + m * c;
    gexp[static_cast<size_t>(k)] =
        -2.0 * cfg_.theta * un[k] + (cfg_.forcing ? cfg_.forcing->data()[k] : 0.0);
  }

  std::vector<double> u(un, un + n), p(static_cast<size_t>(n)), w(static_cast<size_t>(n));
  resolve_scalar(n, u.data(), lambda, p.data(), w.data());

  std::vector<double> lapv(static_cast<size_t>(n)), muv(static_cast<size_t>(n)),
      F(static_cast<size_t>(n));
  auto eval_residual = [&](const std::vector<double>& v, const std::vector<double>& wv) {
    laplacian_raw(g, v.data(), lapv.data());
    for (int k = 0; k < n; ++k)
      muv[static_cast<size_t>(k)] = -lapv[static_cast<size_t>(k)] + wv[static_cast<size_t>(k)] +
                                    gexp[static_cast<size_t>(k)];
    laplacian_raw(g, muv.data(), lapv.data());
    long double acc = 0.0L;
    for (int k = 0; k < n; ++k) {
      const double f =
          (v[static_cast<size_t>(k)] - un[k]) / tau - lapv[static_cast<size_t>(k)] - srcv[static_cast<size_t>(k)];
      F[static_cast<size_t>(k)] = f;
      acc += static_cast<long double>(f) * f;
    }
    return std::sqrt(static_cast<double>(acc * cell));
  };

  double res = eval_residual(u, w);
  int newton_it = 0;

  std::vector<double> B(static_cast<size_t>(n)), rhs(static_cast<size_t>(n)),
      delta(static_cast<size_t>(n)), t1(static_cast<size_t>(n)), q(static_cast<size_t>(n));
  double beta = 0.0;

  auto apply_J = [&](const std::vector<double>& v, std::vector<double>& out) {
    laplacian_raw(g, v.data(), t1.data());
    for (int k = 0; k < n; ++k)
      q[static_cast<size_t>(k)] = -t1[static_cast<size_t>(k)] +
                                  B[static_cast<size_t>(k)] * v[static_cast<size_t>(k)];
    laplacian_raw(g, q.data(), t1.data());
    for (int k = 0; k < n; ++k)
      out[static_cast<size_t>(k)] = v[static_cast<size_t>(k)] / tau - t1[static_cast<size_t>(k)];
  };
  auto apply_M = [&](const std::vector<double>& v, std::vector<double>& out) {
    dct_->solve_modal(v.data(), out.data(), 1.0 / tau, -beta, 1.0);
  };

  std::vector<double> r(static_cast<size_t>(n)), r0(static_cast<size_t>(n)),
      pv(static_cast<size_t>(n)), ph(static_cast<size_t>(n)), vv(static_cast<size_t>(n)),
      sv(static_cast<size_t>(n)), sh(static_cast<size_t>(n)), tv(static_cast<size_t>(n));
  auto bicgstab = [&](const std::vector<double>& b, std::vector<double>& x) {
    std::fill(x.begin(), x.end(), 0.0);
    r = b;
    r0 = b;
    const double tol = std::max(1e-8 * norm_raw(b), 1e-300);
    if (norm_raw(b) <= tol) return;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(pv.begin(), pv.end(), 0.0);
    std::fill(vv.begin(), vv.end(), 0.0);
    for (int it = 1; it <= 400; ++it) {
      const double rho1 = dot_raw(r0, r);
      if (std::abs(rho1) < 1e-300) throw NumericalError("cho step: Krylov breakdown", norm_raw(r), it);
      const double bfac = (rho1 / rho) * (alpha / omega);
      rho = rho1;
      for (size_t k = 0; k < pv.size(); ++k) pv[k] = r[k] + bfac * (pv[k] - omega * vv[k]);
      apply_M(pv, ph);
      apply_J(ph, vv);
      alpha = rho / dot_raw(r0, vv);
      for (size_t k = 0; k < sv.size(); ++k) sv[k] = r[k] - alpha * vv[k];
      if (norm_raw(sv) <= tol) {
        for (size_t k = 0; k < x.size(); ++k) x[k] += alpha * ph[k];
        return;
      }
      apply_M(sv, sh);
      apply_J(sh, tv);
      const double tt = dot_raw(tv, tv);
      if (tt < 1e-300) throw NumericalError("cho step: Krylov stagnation", norm_raw(sv), it);
      omega = dot_raw(tv, sv) / tt;
      for (size_t k = 0; k < x.size(); ++k) x[k] += alpha * ph[k] + omega * sh[k];
      for (size_t k = 0; k < r.size(); ++k) r[k] = sv[k] - omega * tv[k];
      if (norm_raw(r) <= tol) return;
    }
    throw NumericalError("cho step: Krylov solver did not converge", norm_raw(r), 400);
  };

  std::vector<double> ut(static_cast<size_t>(n)), wt(static_cast<size_t>(n)),
      pt(static_cast<size_t>(n));
  while (res > cfg_.newton_tol) {
    if (newton_it >= cfg_.newton_max_iter)
      throw NumericalError("cho step: Newton did not converge", res, newton_it);
    ++newton_it;

    long double acc = 0.0L;
    for (int k = 0; k < n; ++k) {
      B[static_cast<size_t>(k)] = scalar_yosida_jacobian_at(p[static_cast<size_t>(k)], lambda);
      acc += B[static_cast<size_t>(k)];
    }
    beta = static_cast<double>(acc / n);
    for (int k = 0; k < n; ++k) rhs[static_cast<size_t>(k)] = -F[static_cast<size_t>(k)];
    bicgstab(rhs, delta);

    double alpha_ls = 1.0;
    bool accepted = false;
    double res_t = res;
    for (int ls = 0; ls < 25; ++ls) {
      for (int k = 0; k < n; ++k)
        ut[static_cast<size_t>(k)] = u[static_cast<size_t>(k)] + alpha_ls * delta[static_cast<size_t>(k)];
      resolve_scalar(n, ut.data(), lambda, pt.data(), wt.data());
      res_t = eval_residual(ut, wt);
      if (std::isfinite(res_t) && res_t * res_t <= (1.0 - 1e-4 * alpha_ls) * res * res) {
        accepted = true;
        break;
      }
      alpha_ls *= 0.5;
    }
    if (!accepted) throw NumericalError("cho step: line search failed", res, newton_it);
    u.swap(ut);
    w.swap(wt);
    p.swap(pt);
    res = res_t;
  }

  // exact explicit-source mean recursion, carried in extended precision
  const long double target =
      s.mean_acc + static_cast<long double>(tau) * (-static_cast<long double>(m) * s.mean_acc +
                                                    static_cast<long double>(m) * c);
  std::copy(u.begin(), u.end(), s.phi.data());
  shift_to_mean(s.phi, target);
  s.mean_acc = target;

  resolve_scalar(n, s.phi.data(), lambda, p.data(), w.data());
  laplacian_raw(g, s.phi.data(), lapv.data());
  for (int k = 0; k < n; ++k)
    s.mu.data()[k] = -lapv[static_cast<size_t>(k)] + w[static_cast<size_t>(k)] +
                     gexp[static_cast<size_t>(k)];
  if (!all_finite(s.phi) || !all_finite(s.mu))
    throw NumericalError("cho step: non-finite field", res, newton_it);

  s.step_index += 1;
  s.t = static_cast<double>(s.step_index) * tau;
}

ChoRecord ChoStepper::make_record(const ChoState& s) const {
  const int n = cfg_.grid.size();
  ChoRecord r;
  r.t = s.t;
  r.phi_mean = mean(s.phi);
  r.phi_min = min_value(s.phi);
  r.phi_max = max_value(s.phi);
  std::vector<double> p(static_cast<size_t>(n)), w(static_cast<size_t>(n));
  const double max_abs = resolve_scalar(n, s.phi.data(), cfg_.lambda, p.data(), w.data());
  r.gap = cfg_.lambda * max_abs;
  long double acc = 0.0L;
  for (int k = 0; k < n; ++k) {
    const double d = s.phi.data()[k] - p[static_cast<size_t>(k)];
    acc += d * d / (2.0 * cfg_.lambda) + f_log1(std::max(-1.0, std::min(1.0, p[static_cast<size_t>(k)]))) -
           cfg_.theta * s.phi.data()[k] * s.phi.data()[k];
  }
  r.energy = 0.5 * dirichlet_form(s.phi) + static_cast<double>(acc) * cfg_.grid.cell_area();
  r.grad_mu_l2 = std::sqrt(dirichlet_form(s.mu));
  return r;
}

ChoTrajectory cho_run(const ChoConfig& cfg) {
  ChoStepper st(cfg);
  ChoState s = st.make_initial_state();
  ChoTrajectory tr;
  tr.t.push_back(0.0);
  tr.mean.push_back(mean(s.phi));
  tr.records.push_back(st.make_record(s));

  long long n_steps = 0;
  if (cfg.T_final > 0.0)
    n_steps = static_cast<long long>(std::ceil(cfg.T_final / cfg.tau - 1e-9));
  for (long long k = 1; k <= n_steps; ++k) {
    st.step(s);
    tr.t.push_back(s.t);
    tr.mean.push_back(mean(s.phi));
    if (k % cfg.output_every == 0 || k == n_steps) tr.records.push_back(st.make_record(s));
  }
  return tr;
}

}  // namespace rnp
