#pragma once

#include <string>
#include <vector>

#include "rnp/reactions.hpp"

namespace rnp {

/// Per-step spatial means recorded by the stepper. f_i is the mean of the
/// (truncated) product h(P) h(R_i) entering the source, j_i the mean of the
/// resolvent-mapped phase, gap = lambda * max-cell |Yosida gradient|.
struct MeanSample {
  double t = 0.0;
  double y1 = 0.0, y2 = 0.0;
  double f1 = 0.0, f2 = 0.0;
  double j1 = 0.0, j2 = 0.0;
  double pmean = 0.0, r1mean = 0.0, r2mean = 0.0;
  double gap = 0.0;
};

struct MeanSeries {
  std::vector<MeanSample> samples;

  void push(const MeanSample& s) { samples.push_back(s); }
  size_t size() const { return samples.size(); }
};

struct MeanOdeResiduals {
  std::vector<double> r1, r2;  // one entry per interval
  double max_abs = 0.0;
};

/// Residual of the discrete mean balance over each sampling interval:
///   (y_i(t_{n+1}) - y_i(t_n)) / dt + c_{2i} j_i(t_n) - c_{2i-1} f_i(t_n).
/// Throws std::invalid_argument for series shorter than two samples.
MeanOdeResiduals mean_ode_residual(const MeanSeries& series, const ReactionCoeffs& c);

struct Lemma2Report {
  bool upper_ok = false;      // y_i(t) <= c_{2i-1} t + 1e-9
  bool positivity_ok = false; // y_i(t) > 0 for t > 0
  bool sandwich_ok = false;   // y_i(t) >= kappa_i (1 - e^{-c_{2i} t}) - 1e-6
  bool cap_ok = false;        // y1 + y2 <= min(alpha0 - c*, 1 - alpha0 - 2 c*) + 1e-9
  bool all_ok() const { return upper_ok && positivity_ok && sandwich_ok && cap_ok; }

  double kappa1 = 0.0, kappa2 = 0.0;  // terminal values of the lower-bound prefactor
  double lambda_correction = 0.0;     // max observed gap, subtracted from kappa
  double worst_upper_slack = 0.0;     // max over samples of y_i - c_{2i-1} t
  double worst_sandwich_slack = 0.0;  // max over samples of bound - y_i
  double worst_cap_slack = 0.0;
  std::string summary;
};

/// Checks the mean-value sandwich on a recorded trajectory. The lower-bound
/// prefactor uses the running minimum of pmean * r_i_mean as the computable
/// stand-in for the squared separation threshold, corrected by the largest
/// observed Yosida gap.
Lemma2Report lemma2_bounds_check(const MeanSeries& series, const ReactionCoeffs& c, double lambda);

/// Closed-form mean of the scalar relaxation source -m(phi - c):
/// c + (y0 - c) e^{-m t}. Rejects m < 0.
double analytic_cho_mean(double y0, double m, double c_oono, double t);

}  // namespace rnp
