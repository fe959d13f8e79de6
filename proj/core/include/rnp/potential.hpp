#pragma once

#include <utility>

namespace rnp {

struct Vec2 {
  double a = 0.0;
  double b = 0.0;
};

inline Vec2 operator+(Vec2 u, Vec2 v) { return {u.a + v.a, u.b + v.b}; }
inline Vec2 operator-(Vec2 u, Vec2 v) { return {u.a - v.a, u.b - v.b}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.a, s * v.b}; }
double norm(Vec2 v);
double dot(Vec2 u, Vec2 v);

/// Symmetric 2x2 matrix (m12 stored once).
struct Mat2 {
  double m11 = 0.0;
  double m12 = 0.0;
  double m22 = 0.0;
};

Vec2 apply(const Mat2& m, Vec2 v);

enum class PotentialVariant {
  flory_huggins,  // mixing entropy over the Gibbs simplex, solvent included
  tilde,          // componentwise entropy with the solvent term moved into the smooth part
};

/// Volume fractions (p1, p2) of the two complexes; solvent() = 1 - p1 - p2.
struct SimplexPoint {
  double p1 = 0.0;
  double p2 = 0.0;

  double solvent() const { return 1.0 - p1 - p2; }
  bool in_closed() const { return p1 >= 0.0 && p2 >= 0.0 && p1 + p2 <= 1.0; }
  bool in_open() const { return p1 > 0.0 && p2 > 0.0 && p1 + p2 < 1.0; }
};

struct PotentialParams {
  double chi12 = 1.0;
  double chi1S = 1.0;
  double chi2S = 1.0;
  double lambda = 1e-3;  // Moreau-Yosida parameter, in (0, 1)
  PotentialVariant variant = PotentialVariant::flory_huggins;
  double eps = 1.0;   // interface thickness coefficient
  double bigA = 1.0;  // potential scaling

  /// Throws std::invalid_argument on any violated bound.
  void validate() const;
};

/// Clamp to [0, 1]; the truncation applied to concentrations inside the
/// regularized source terms.
inline double truncate(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

/// x * ln(x) extended by continuity with 0 at x = 0.
double xlogx(double x);

/// Mixing entropy p1 ln p1 + p2 ln p2 + S ln S on the closed simplex.
/// Throws std::domain_error outside.
double psi1(SimplexPoint p);

/// Gradient (ln(p1/S), ln(p2/S)); requires the strict interior.
Vec2 grad_psi1(SimplexPoint p);

/// Hessian [[1/p1 + 1/S, 1/S], [1/S, 1/p2 + 1/S]]; requires the strict interior.
Mat2 hess_psi1(SimplexPoint p);

/// Demixing energy chi12 p1 p2 + chi1S p1 S + chi2S p2 S with S = 1 - p1 - p2,
/// defined on all of R^2, together with its (globally Lipschitz) gradient.
std::pair<double, Vec2> psi2_eval(Vec2 p, const PotentialParams& params);

/// Convex conjugate of the mixing entropy: sup over the closed simplex of
/// z.r - psi1(r), which evaluates in closed form to ln(1 + e^z1 + e^z2).
double psi1_conjugate(Vec2 z);

struct ResolventResult {
  SimplexPoint p;  // J_lambda(r)
  Vec2 grad;       // gradient of the entropy at p; equals (r - p) / lambda
  double residual = 0.0;
  int iterations = 0;
};

/// Resolvent (I + lambda * grad)^{-1} of the entropy gradient, solved by
/// damped Newton to residual |p + lambda*grad(p) - r| <= 1e-13. The iteration
/// runs in the log variables w_i = ln(p_i / S) (softmax parametrization), so
/// every iterate maps into the open simplex and inputs far outside the
/// simplex stay well conditioned. The start point is the gradient at the
/// projection of r onto the delta-shrunk simplex, delta = min(lambda, 1e-3).
/// For the tilde variant the two components decouple and are solved by a
/// safeguarded scalar Newton on p + lambda*(ln p + 1) = r over p in (0, inf).
/// Throws NumericalError when the residual target is not met.
ResolventResult resolvent(Vec2 r, double lambda, PotentialVariant variant);

/// Warm-started variant: `grad_start`, when non-null, seeds the Newton
/// iteration in gradient space (useful across neighboring cells of a smooth
/// field, where one or two iterations suffice).
ResolventResult resolvent(Vec2 r, double lambda, PotentialVariant variant,
                          const Vec2* grad_start);

/// Yosida gradient (r - J_lambda(r)) / lambda = grad at the resolvent.
Vec2 yosida_grad(Vec2 r, double lambda, PotentialVariant variant);

/// Moreau envelope |r - J|^2 / (2 lambda) + entropy(J).
double yosida_value(Vec2 r, double lambda, PotentialVariant variant);

/// Derivative of the Yosida gradient, H (I + lambda H)^{-1} evaluated at the
/// resolvent; symmetric positive definite with spectrum in (0, 1/lambda).
/// Entries of the entropy Hessian are capped at 1e12 before inversion; the
/// cap only binds when the resolvent sits closer than ~1e-12 to the boundary,
/// far outside the range any simulation reaches.
Mat2 yosida_jacobian(Vec2 r, double lambda, PotentialVariant variant);

/// Same derivative evaluated from an already-computed resolvent point.
Mat2 yosida_jacobian_at(SimplexPoint p, double lambda, PotentialVariant variant);

/// Componentwise entropy p1 ln p1 + p2 ln p2 on the closed unit box.
/// Throws std::domain_error outside; the gradient (ln p_i + 1) additionally
/// requires the open box.
double tilde_psi1(Vec2 p);
Vec2 tilde_psi1_grad(Vec2 p);

/// Smooth part of the modified potential: psi2 + (1 - p1 - p2)(-p1 - p2),
/// defined on all of R^2, with gradient.
std::pair<double, Vec2> tilde_psi2_eval(Vec2 p, const PotentialParams& params);

/// Full modified potential tilde_psi1 + tilde_psi2 with gradient; the value
/// needs p in the closed unit box, the gradient the open box.
std::pair<double, Vec2> tilde_psi_eval(Vec2 p, const PotentialParams& params);

/// Scalar resolvent of p -> ln(p) + 1 over (0, inf): solves
/// p + lambda (ln p + 1) = r. Returns p; `grad_out`, when non-null, receives
/// ln(p) + 1 in a form consistent with (r - p) / lambda at the solution.
double scalar_entropy_resolvent(double r, double lambda, double* grad_out = nullptr);

/// Resolvent sweep over n points (r1[k], r2[k]), warm-started from the
/// previous point. Any output pointer may be null. Returns the maximal
/// Euclidean norm of the Yosida gradient over the sweep.
double resolvent_sweep(int n, const double* r1, const double* r2, double lambda,
                       PotentialVariant variant, double* p1, double* p2, double* g1, double* g2);

}  // namespace rnp
