#include "rnp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rnp/errors.hpp"

namespace rnp {

double norm(Vec2 v) { return std::hypot(v.a, v.b); }
double dot(Vec2 u, Vec2 v) { return u.a * v.a + u.b * v.b; }

Vec2 apply(const Mat2& m, Vec2 v) {
  return {m.m11 * v.a + m.m12 * v.b, m.m12 * v.a + m.m22 * v.b};
}

void PotentialParams::validate() const {
  if (chi12 < 0.0 || chi1S < 0.0 || chi2S < 0.0)
    throw std::invalid_argument("PotentialParams: chi coefficients must be nonnegative");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("PotentialParams: lambda must lie in (0, 1)");
  if (!(eps > 0.0) || !(bigA > 0.0))
    throw std::invalid_argument("PotentialParams: eps and A must be positive");
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double psi1(SimplexPoint p) {
  if (!p.in_closed()) throw std::domain_error("psi1: point outside the closed simplex");
  // p1 + p2 <= 1 can leave S at -eps after rounding; clamp to the boundary.
  const double s = std::max(0.0, p.solvent());
  return xlogx(p.p1) + xlogx(p.p2) + xlogx(s);
}

Vec2 grad_psi1(SimplexPoint p) {
  if (!p.in_open()) throw std::domain_error("grad_psi1: gradient is singular outside the open simplex");
  const double ls = std::log(p.solvent());
  return {std::log(p.p1) - ls, std::log(p.p2) - ls};
}

Mat2 hess_psi1(SimplexPoint p) {
  if (!p.in_open()) throw std::domain_error("hess_psi1: Hessian is singular outside the open simplex");
  const double is = 1.0 / p.solvent();
  return {1.0 / p.p1 + is, is, 1.0 / p.p2 + is};
}

std::pair<double, Vec2> psi2_eval(Vec2 p, const PotentialParams& params) {
  const double s = 1.0 - p.a - p.b;
  const double value = params.chi12 * p.a * p.b + params.chi1S * p.a * s + params.chi2S * p.b * s;
  Vec2 grad{params.chi12 * p.b + params.chi1S * (s - p.a) - params.chi2S * p.b,
            params.chi12 * p.a - params.chi1S * p.a + params.chi2S * (s - p.b)};
  return {value, grad};
}

double psi1_conjugate(Vec2 z) {
  const double m = std::max({0.0, z.a, z.b});
  return m + std::log(std::exp(-m) + std::exp(z.a - m) + std::exp(z.b - m));
}

namespace {

// softmax over the logits (0, w1, w2); returns (p1, p2), with p0 = solvent
SimplexPoint softmax2(Vec2 w) {
  const double m = std::max({0.0, w.a, w.b});
  const double e0 = std::exp(-m);
  const double e1 = std::exp(w.a - m);
  const double e2 = std::exp(w.b - m);
  const double den = e0 + e1 + e2;
  return {e1 / den, e2 / den};
}

// Euclidean-ish projection of r onto {p1 >= d, p2 >= d, p1 + p2 <= 1 - d};
// a few alternating rounds are enough for a Newton start point.
SimplexPoint project_shrunk(Vec2 r, double d) {
  double p1 = r.a, p2 = r.b;
  for (int k = 0; k < 4; ++k) {
    p1 = std::max(p1, d);
    p2 = std::max(p2, d);
    const double excess = p1 + p2 - (1.0 - d);
    if (excess > 0.0) {
      p1 -= 0.5 * excess;
      p2 -= 0.5 * excess;
    }
  }
  p1 = std::min(std::max(p1, d), 1.0 - 2.0 * d);
  p2 = std::min(std::max(p2, d), 1.0 - 2.0 * d);
  return {p1, p2};
}

constexpr double kResolventTol = 1e-13;
constexpr int kResolventMaxIter = 100;

ResolventResult resolvent_fh(Vec2 r, double lambda, const Vec2* w_start) {
  Vec2 w;
  if (w_start) {
    w = *w_start;
  } else {
    const double d = std::min(lambda, 1e-3);
    const SimplexPoint p0 = project_shrunk(r, d);
    const double ls = std::log(p0.solvent());
    w = Vec2{std::log(p0.p1) - ls, std::log(p0.p2) - ls};
  }

  SimplexPoint p = softmax2(w);
  Vec2 f{p.p1 + lambda * w.a - r.a, p.p2 + lambda * w.b - r.b};
  double fn2 = dot(f, f);

  int it = 0;
  for (; it < kResolventMaxIter; ++it) {
    if (std::sqrt(fn2) <= kResolventTol) break;
    // Jacobian of f in w: diag(p) - p p^T + lambda I, SPD with spectrum >= lambda
    const double j11 = p.p1 * (1.0 - p.p1) + lambda;
    const double j12 = -p.p1 * p.p2;
    const double j22 = p.p2 * (1.0 - p.p2) + lambda;
    const double det = j11 * j22 - j12 * j12;
    Vec2 step{-(j22 * f.a - j12 * f.b) / det, -(j11 * f.b - j12 * f.a) / det};

    double alpha = 1.0;
    Vec2 wt;
    SimplexPoint pt;
    Vec2 ft;
    double ft2 = fn2;
    for (int ls_it = 0; ls_it < 60; ++ls_it) {
      wt = w + alpha * step;
      pt = softmax2(wt);
      ft = Vec2{pt.p1 + lambda * wt.a - r.a, pt.p2 + lambda * wt.b - r.b};
      ft2 = dot(ft, ft);
      if (ft2 <= (1.0 - 1e-4 * alpha) * fn2) break;
      alpha *= 0.5;
    }
    w = wt;
    p = pt;
    f = ft;
    fn2 = ft2;
  }
  const double res = std::sqrt(fn2);
  if (res > kResolventTol)
    throw NumericalError("resolvent: Newton did not reach tolerance", res, it);
  // polish toward the floating-point floor: full Newton steps improve the
  // residual quadratically until rounding takes over
  for (int polish = 0; polish < 4 && fn2 > 0.0; ++polish) {
    const double j11 = p.p1 * (1.0 - p.p1) + lambda;
    const double j12 = -p.p1 * p.p2;
    const double j22 = p.p2 * (1.0 - p.p2) + lambda;
    const double det = j11 * j22 - j12 * j12;
    const Vec2 step{-(j22 * f.a - j12 * f.b) / det, -(j11 * f.b - j12 * f.a) / det};
    const Vec2 wt = w + step;
    const SimplexPoint pt = softmax2(wt);
    const Vec2 ft{pt.p1 + lambda * wt.a - r.a, pt.p2 + lambda * wt.b - r.b};
    if (dot(ft, ft) >= fn2) break;
    w = wt;
    p = pt;
    f = ft;
    fn2 = dot(ft, ft);
  }
  return {p, w, std::sqrt(fn2), it};
}

ResolventResult resolvent_tilde(Vec2 r, double lambda) {
  double g1 = 0.0, g2 = 0.0;
  const double p1 = scalar_entropy_resolvent(r.a, lambda, &g1);
  const double p2 = scalar_entropy_resolvent(r.b, lambda, &g2);
  const Vec2 f{p1 + lambda * g1 - r.a, p2 + lambda * g2 - r.b};
  return {{p1, p2}, {g1, g2}, norm(f), 0};
}

}  // namespace

double scalar_entropy_resolvent(double r, double lambda, double* grad_out) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("scalar_entropy_resolvent: lambda must be positive");
  // solve g(u) = e^u + lambda (u + 1) - r = 0 in u = ln p; g is strictly
  // increasing, so a bracket always exists and bisection backs up Newton
  auto eval = [&](double v) { return std::exp(std::min(v, 700.0)) + lambda * (v + 1.0) - r; };
  double u = r > lambda + 1e-3 ? std::log(std::min(r, 1e3)) : r / lambda - 1.0;
  u = std::min(u, 700.0);
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

  constexpr int kMaxIter = 200;
  double f = eval(u);
  int it = 0;
  for (; it < kMaxIter; ++it) {
    if (std::abs(f) <= kResolventTol) break;
    if (f > 0.0)
      hi = u;
    else
      lo = u;
    const double df = std::exp(std::min(u, 700.0)) + lambda;
    double un = u - f / df;
    if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
    u = un;
    f = eval(u);
  }
  if (std::abs(f) > kResolventTol)
    throw NumericalError("scalar_entropy_resolvent: iteration did not reach tolerance",
                         std::abs(f), it);
  if (grad_out) *grad_out = u + 1.0;
  return std::exp(u);
}

ResolventResult resolvent(Vec2 r, double lambda, PotentialVariant variant) {
  return resolvent(r, lambda, variant, nullptr);
}

ResolventResult resolvent(Vec2 r, double lambda, PotentialVariant variant,
                          const Vec2* grad_start) {
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent: lambda must be positive");
  return variant == PotentialVariant::flory_huggins ? resolvent_fh(r, lambda, grad_start)
                                                    : resolvent_tilde(r, lambda);
}

Vec2 yosida_grad(Vec2 r, double lambda, PotentialVariant variant) {
  return resolvent(r, lambda, variant).grad;
}

double yosida_value(Vec2 r, double lambda, PotentialVariant variant) {
  const ResolventResult res = resolvent(r, lambda, variant);
  const Vec2 d{r.a - res.p.p1, r.b - res.p.p2};
  // entropy evaluated directly: for extreme r the resolvent's solvent sits at
  // the edge of representability and can round past the simplex by one ulp
  const double entropy =
      variant == PotentialVariant::flory_huggins
          ? xlogx(res.p.p1) + xlogx(res.p.p2) + xlogx(std::max(0.0, res.p.solvent()))
          : xlogx(res.p.p1) + xlogx(res.p.p2);
  return dot(d, d) / (2.0 * lambda) + entropy;
}

Mat2 yosida_jacobian_at(SimplexPoint p, double lambda, PotentialVariant variant) {
  if (variant == PotentialVariant::tilde) {
    // decoupled: d/dr of the scalar Yosida map is 1 / (p + lambda)
    return {1.0 / (p.p1 + lambda), 0.0, 1.0 / (p.p2 + lambda)};
  }
  constexpr double kHessCap = 1e12;
  const double s = p.solvent();
  const double is = std::min(1.0 / s, kHessCap);
  const double h11 = std::min(1.0 / p.p1, kHessCap) + is;
  const double h22 = std::min(1.0 / p.p2, kHessCap) + is;
  const double h12 = is;
  // B = (1/lambda) (I - M^{-1}) with M = I + lambda H
  const double m11 = 1.0 + lambda * h11;
  const double m12 = lambda * h12;
  const double m22 = 1.0 + lambda * h22;
  const double det = m11 * m22 - m12 * m12;
  const double i11 = m22 / det, i12 = -m12 / det, i22 = m11 / det;
  return {(1.0 - i11) / lambda, -i12 / lambda, (1.0 - i22) / lambda};
}

Mat2 yosida_jacobian(Vec2 r, double lambda, PotentialVariant variant) {
  return yosida_jacobian_at(resolvent(r, lambda, variant).p, lambda, variant);
}

double resolvent_sweep(int n, const double* r1, const double* r2, double lambda,
                       PotentialVariant variant, double* p1, double* p2, double* g1, double* g2) {
  double max_norm = 0.0;
  Vec2 hint{};
  bool have_hint = false;
  for (int k = 0; k < n; ++k) {
    const ResolventResult res =
        resolvent({r1[k], r2[k]}, lambda, variant, have_hint ? &hint : nullptr);
    if (p1) p1[k] = res.p.p1;
    if (p2) p2[k] = res.p.p2;
    if (g1) g1[k] = res.grad.a;
    if (g2) g2[k] = res.grad.b;
    hint = res.grad;
    have_hint = variant == PotentialVariant::flory_huggins;
    max_norm = std::max(max_norm, norm(res.grad));
  }
  return max_norm;
}

double tilde_psi1(Vec2 p) {
  if (p.a < 0.0 || p.a > 1.0 || p.b < 0.0 || p.b > 1.0)
    throw std::domain_error("tilde_psi1: point outside the closed unit box");
  return xlogx(p.a) + xlogx(p.b);
}

Vec2 tilde_psi1_grad(Vec2 p) {
  if (!(p.a > 0.0 && p.a < 1.0 && p.b > 0.0 && p.b < 1.0))
    throw std::domain_error("tilde_psi1_grad: gradient needs the open unit box");
  return {std::log(p.a) + 1.0, std::log(p.b) + 1.0};
}

std::pair<double, Vec2> tilde_psi2_eval(Vec2 p, const PotentialParams& params) {
  auto [value, grad] = psi2_eval(p, params);
  const double sum = p.a + p.b;
  value += (1.0 - sum) * (-sum);
  const double dsum = 2.0 * sum - 1.0;
  grad.a += dsum;
  grad.b += dsum;
  return {value, grad};
}

std::pair<double, Vec2> tilde_psi_eval(Vec2 p, const PotentialParams& params) {
  const double v1 = tilde_psi1(p);
  const Vec2 g1 = tilde_psi1_grad(p);
  auto [v2, g2] = tilde_psi2_eval(p, params);
  return {v1 + v2, g1 + g2};
}

}  // namespace rnp
