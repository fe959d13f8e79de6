#include "rnp/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rnp {

MeanOdeResiduals mean_ode_residual(const MeanSeries& series, const ReactionCoeffs& c) {
  if (series.size() < 2)
    throw std::invalid_argument("mean_ode_residual: need at least two samples");
  MeanOdeResiduals out;
  const auto& s = series.samples;
  out.r1.reserve(s.size() - 1);
  out.r2.reserve(s.size() - 1);
  for (size_t n = 0; n + 1 < s.size(); ++n) {
    const double dt = s[n + 1].t - s[n].t;
    if (!(dt > 0.0)) throw std::invalid_argument("mean_ode_residual: times must be increasing");
    const double r1 = (s[n + 1].y1 - s[n].y1) / dt + c.c2 * s[n].j1 - c.c1 * s[n].f1;
    const double r2 = (s[n + 1].y2 - s[n].y2) / dt + c.c4 * s[n].j2 - c.c3 * s[n].f2;
    out.r1.push_back(r1);
    out.r2.push_back(r2);
    out.max_abs = std::max({out.max_abs, std::abs(r1), std::abs(r2)});
  }
  return out;
}

Lemma2Report lemma2_bounds_check(const MeanSeries& series, const ReactionCoeffs& c,
                                 double lambda) {
  if (series.size() < 1) throw std::invalid_argument("lemma2_bounds_check: empty series");
  (void)lambda;
  Lemma2Report rep;
  const auto& s = series.samples;
  const double alpha0 = s.front().pmean;
  const double cs = c_star(c);
  const double cap = std::min(alpha0 - cs, 1.0 - alpha0 - 2.0 * cs);

  double max_gap = 0.0;
  for (const auto& sample : s) max_gap = std::max(max_gap, sample.gap);
  rep.lambda_correction = max_gap;

  constexpr double kUpperTol = 1e-9;
  constexpr double kSandwichTol = 1e-6;
  constexpr double kCapTol = 1e-9;

  bool upper = true, positive = true, sandwich = true, capok = true;
  double runmin1 = s.front().pmean * s.front().r1mean;
  double runmin2 = s.front().pmean * s.front().r2mean;
  double worst_upper = -1e300, worst_sand = -1e300, worst_cap = -1e300;
  for (const auto& sample : s) {
    runmin1 = std::min(runmin1, sample.pmean * sample.r1mean);
    runmin2 = std::min(runmin2, sample.pmean * sample.r2mean);
    const double t = sample.t;

    worst_upper = std::max({worst_upper, sample.y1 - c.c1 * t, sample.y2 - c.c3 * t});
    if (sample.y1 > c.c1 * t + kUpperTol || sample.y2 > c.c3 * t + kUpperTol) upper = false;

    if (t > 0.0 && (sample.y1 <= 0.0 || sample.y2 <= 0.0)) positive = false;

    const double k1 = (c.c1 / c.c2) * runmin1 - max_gap;
    const double k2 = (c.c3 / c.c4) * runmin2 - max_gap;
    const double low1 = k1 * (1.0 - std::exp(-c.c2 * t));
    const double low2 = k2 * (1.0 - std::exp(-c.c4 * t));
    worst_sand = std::max({worst_sand, low1 - sample.y1, low2 - sample.y2});
    if (sample.y1 < low1 - kSandwichTol || sample.y2 < low2 - kSandwichTol) sandwich = false;

    const double total = sample.y1 + sample.y2;
    worst_cap = std::max(worst_cap, total - cap);
    if (total > cap + kCapTol) capok = false;

    if (&sample == &s.back()) {
      rep.kappa1 = k1;
      rep.kappa2 = k2;
    }
  }
  rep.upper_ok = upper;
  rep.positivity_ok = positive;
  rep.sandwich_ok = sandwich;
  rep.cap_ok = capok;
  rep.worst_upper_slack = worst_upper;
  rep.worst_sandwich_slack = worst_sand;
  rep.worst_cap_slack = worst_cap;

  std::ostringstream os;
  os << "upper=" << (upper ? "pass" : "FAIL") << " positivity=" << (positive ? "pass" : "FAIL")
     << " sandwich=" << (sandwich ? "pass" : "FAIL") << " cap=" << (capok ? "pass" : "FAIL")
     << " kappa=(" << rep.kappa1 << ", " << rep.kappa2 << ") gap=" << max_gap;
  rep.summary = os.str();
  return rep;
}

double analytic_cho_mean(double y0, double m, double c_oono, double t) {
  if (m < 0.0) throw std::domain_error("analytic_cho_mean: relaxation rate must be nonnegative");
  return c_oono + (y0 - c_oono) * std::exp(-m * t);
}

}  // namespace rnp
