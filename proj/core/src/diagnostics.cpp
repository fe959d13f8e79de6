#include "rnp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rnp {

namespace {

long double ld_mean_combo(const SimState& s, double cphi, double cr, double cp) {
  const int n = s.P.size();
  long double acc = 0.0L;
  for (int k = 0; k < n; ++k) {
    acc += cphi * (s.phi1.data()[k] + s.phi2.data()[k]) +
           cr * (s.R1.data()[k] + s.R2.data()[k]) + cp * s.P.data()[k];
  }
  return acc / n;
}

long double ld_mean_pair(const Field& a, const Field& b) {
  const int n = a.size();
  long double acc = 0.0L;
  for (int k = 0; k < n; ++k) acc += a.data()[k] + b.data()[k];
  return acc / n;
}

double field_mean(const Field& f) { return mean(f); }

double pair_l2(const Field& a1, const Field& a2, const Field& b1, const Field& b2) {
  const int n = a1.size();
  long double acc = 0.0L;
  for (int k = 0; k < n; ++k) {
    const double d1 = a1.data()[k] - b1.data()[k];
    const double d2 = a2.data()[k] - b2.data()[k];
    acc += static_cast<long double>(d1) * d1 + static_cast<long double>(d2) * d2;
  }
  return std::sqrt(static_cast<double>(acc * a1.grid().cell_area()));
}

double single_l2(const Field& a, const Field& b) {
  const int n = a.size();
  long double acc = 0.0L;
  for (int k = 0; k < n; ++k) {
    const double d = a.data()[k] - b.data()[k];
    acc += static_cast<long double>(d) * d;
  }
  return std::sqrt(static_cast<double>(acc * a.grid().cell_area()));
}

Field smooth_bump(const Grid& g, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mode(1, 4);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Field s(g);
  double maxabs = 0.0;
  int mx[4], my[4];
  double a[4];
  for (int k = 0; k < 4; ++k) {
    mx[k] = mode(rng);
    my[k] = mode(rng);
    a[k] = coef(rng);
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double v = 0.0;
      for (int k = 0; k < 4; ++k)
        v += a[k] * std::cos(M_PI * mx[k] * g.x_center(i) / g.lx) *
             std::cos(M_PI * my[k] * g.y_center(j) / g.ly);
      s(i, j) = v;
      maxabs = std::max(maxabs, std::abs(v));
    }
  if (maxabs < 1e-12) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) s(i, j) = std::cos(M_PI * g.x_center(i) / g.lx);
    maxabs = 1.0;
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s(i, j) /= maxabs;
  return s;
}

}  // namespace

DiagnosticsRecord record(const SimState& s, const SolverConfig& cfg) {
  const Grid& g = cfg.grid;
  const int n = g.size();
  const PotentialParams& pot = cfg.pot;
  DiagnosticsRecord r;
  r.t = s.t;

  r.mass_total = static_cast<double>(ld_mean_combo(s, 2.0, 1.0, 1.0));
  r.mass_phiR1 = static_cast<double>(ld_mean_pair(s.phi1, s.R1));
  r.mass_phiR2 = static_cast<double>(ld_mean_pair(s.phi2, s.R2));
  r.mass_phiP = static_cast<double>(ld_mean_combo(s, 1.0, 0.0, 1.0));
  r.mass_RminusP = static_cast<double>(ld_mean_combo(s, 0.0, 1.0, -1.0));

  r.Pmin = min_value(s.P);
  r.Pmax = max_value(s.P);
  r.R1min = min_value(s.R1);
  r.R1max = max_value(s.R1);
  r.R2min = min_value(s.R2);
  r.R2max = max_value(s.R2);
  r.phi1mean = field_mean(s.phi1);
  r.phi2mean = field_mean(s.phi2);

  double sep = 1e300;
  if (pot.variant == PotentialVariant::flory_huggins) {
    for (int k = 0; k < n; ++k) {
      const double p1 = s.phi1.data()[k], p2 = s.phi2.data()[k];
      sep = std::min({sep, p1, p2, 1.0 - p1 - p2});
    }
  } else {
    for (int k = 0; k < n; ++k) {
      const double p1 = s.phi1.data()[k], p2 = s.phi2.data()[k];
      sep = std::min({sep, p1, 1.0 - p1, p2, 1.0 - p2});
    }
  }
  r.sep = sep;

  // regularized potential along the resolvent sweep
  {
    std::vector<double> p1(static_cast<size_t>(n)), p2(static_cast<size_t>(n)),
        w1(static_cast<size_t>(n)), w2(static_cast<size_t>(n));
    const double max_norm = resolvent_sweep(n, s.phi1.data(), s.phi2.data(), pot.lambda,
                                            pot.variant, p1.data(), p2.data(), w1.data(),
                                            w2.data());
    r.yosida_gap = pot.lambda * max_norm;
    long double acc = 0.0L;
    for (int k = 0; k < n; ++k) {
      const size_t sk = static_cast<size_t>(k);
      const double d1 = s.phi1.data()[k] - p1[sk];
      const double d2 = s.phi2.data()[k] - p2[sk];
      double entropy;
      double smooth;
      if (pot.variant == PotentialVariant::flory_huggins) {
        entropy = xlogx(p1[sk]) + xlogx(p2[sk]) + xlogx(std::max(0.0, 1.0 - p1[sk] - p2[sk]));
        smooth = psi2_eval({s.phi1.data()[k], s.phi2.data()[k]}, pot).first;
      } else {
        entropy = xlogx(p1[sk]) + xlogx(p2[sk]);
        smooth = tilde_psi2_eval({s.phi1.data()[k], s.phi2.data()[k]}, pot).first;
      }
      acc += (d1 * d1 + d2 * d2) / (2.0 * pot.lambda) + entropy + smooth;
    }
    const double eps2 = pot.eps * pot.eps;
    r.energy = 0.5 * eps2 * (dirichlet_form(s.phi1) + dirichlet_form(s.phi2)) +
               pot.bigA * static_cast<double>(acc) * g.cell_area();
  }

  r.grad_mu_l2 = std::sqrt(dirichlet_form(s.mu1) + dirichlet_form(s.mu2));
  r.mu1_mean = field_mean(s.mu1);
  r.mu2_mean = field_mean(s.mu2);

  const double proxy = std::sqrt(r.grad_mu_l2 * r.grad_mu_l2 +
                                 g.area() * (r.mu1_mean * r.mu1_mean + r.mu2_mean * r.mu2_mean));
  r.w_half_gradmu = std::sqrt(std::max(0.0, s.t)) * r.grad_mu_l2;
  r.w_alpha_mu = std::pow(std::max(0.0, s.t), 1.5 - cfg.alpha_weight) * proxy;
  return r;
}

double mz_required_constant(const Field& phi1, const Field& phi2, double c_psi) {
  require_same_grid(phi1, phi2);
  const Grid& g = phi1.grid();
  const int n = g.size();
  const double mean1 = mean(phi1);
  const double mean2 = mean(phi2);
  const double m = std::min(mean1, mean2);
  const double M = mean1 + mean2;
  if (!(m > 0.0) || M > 0.125) return -1.0;

  long double l1 = 0.0L;      // integral of |grad psi1|
  long double centered = 0.0L;
  for (int k = 0; k < n; ++k) {
    const Vec2 grad = grad_psi1({phi1.data()[k], phi2.data()[k]});
    l1 += norm(grad);
    centered += grad.a * (phi1.data()[k] - mean1) + grad.b * (phi2.data()[k] - mean2);
  }
  const double cell = g.cell_area();
  const double lhs = c_psi * m * static_cast<double>(l1) * cell;
  const double rhs0 = static_cast<double>(centered) * cell;
  const double denom = M * (1.0 + std::abs(std::log(0.5 * m)));
  return std::max(0.0, (lhs - rhs0) / denom);
}

namespace {

bool default_mz_sampler(std::mt19937_64& rng, Field& f1, Field& f2) {
  const Grid& g = f1.grid();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double m1 = std::pow(10.0, -5.0 + 3.7 * unif(rng));
  const double m2 = std::pow(10.0, -5.0 + 3.7 * unif(rng));
  f1.fill(m1 * (0.3 + 0.6 * unif(rng)));
  f2.fill(m2 * (0.3 + 0.6 * unif(rng)));

  const int npatch = 1 + static_cast<int>(unif(rng) * 7.0);
  const double budget = 0.3 * std::max(m1, m2) / npatch;
  const int n_cells = g.size();
  for (int p = 0; p < npatch; ++p) {
    const double d = std::pow(10.0, -12.0 + 11.0 * unif(rng));
    const int type = static_cast<int>(unif(rng) * 4.0);
    double v1, v2;
    switch (type) {
      case 0: v1 = d; v2 = d; break;                    // near the origin vertex
      case 1: v1 = 1.0 - 2.0 * d; v2 = d; break;        // near (1, 0)
      case 2: v1 = d; v2 = 1.0 - 2.0 * d; break;        // near (0, 1)
      default: {                                        // near the hypotenuse
        const double u = unif(rng);
        v1 = d + u * (1.0 - 3.0 * d);
        v2 = 1.0 - d - v1;
        break;
      }
    }
    const double vmax = std::max(v1, v2);
    const int max_cells = std::max(1, static_cast<int>(budget * n_cells / vmax));
    int w = 1 + static_cast<int>(unif(rng) * std::min(g.nx - 1.0, std::sqrt((double)max_cells)));
    int h = std::max(1, std::min(g.ny, max_cells / w));
    h = 1 + static_cast<int>(unif(rng) * (h - 1 + 1e-9));
    w = std::min(w, g.nx);
    h = std::min(h, g.ny);
    const int i0 = static_cast<int>(unif(rng) * (g.nx - w + 1));
    const int j0 = static_cast<int>(unif(rng) * (g.ny - h + 1));
    for (int j = j0; j < j0 + h; ++j)
      for (int i = i0; i < i0 + w; ++i) {
        f1(i, j) = v1;
        f2(i, j) = v2;
      }
  }
  return true;
}

}  // namespace

MzReport verify_mz_with(const Grid& g, const MzSampler& sampler, int n_trials, uint64_t seed,
                        double ceiling, double c_psi) {
  MzReport rep;
  std::mt19937_64 rng(seed);
  Field f1(g), f2(g);
  for (int t = 0; t < n_trials; ++t) {
    if (!sampler(rng, f1, f2)) {
      ++rep.skipped;
      continue;
    }
    const double req = mz_required_constant(f1, f2, c_psi);
    if (req < 0.0) {
      ++rep.skipped;
      continue;
    }
    ++rep.trials;
    if (req > rep.min_admissible_C) {
      rep.min_admissible_C = req;
      rep.worst_m = std::min(mean(f1), mean(f2));
      rep.worst_M = mean(f1) + mean(f2);
    }
    if (req > ceiling) ++rep.violations;
  }
  std::ostringstream os;
  os << "trials=" << rep.trials << " skipped=" << rep.skipped << " violations=" << rep.violations
     << " min_admissible_C=" << rep.min_admissible_C << " (worst trial means: m=" << rep.worst_m
     << ", M=" << rep.worst_M << ")";
  rep.summary = os.str();
  return rep;
}

MzReport verify_mz(const Grid& g, int n_trials, uint64_t seed, double ceiling, double c_psi) {
  return verify_mz_with(g, default_mz_sampler, n_trials, seed, ceiling, c_psi);
}

TwinRunReport twin_run_stability(const SolverConfig& cfg_in, double sigma, double perturb_eps) {
  const SolverConfig cfg = cfg_in.resolved();
  if (cfg.pot.variant != PotentialVariant::tilde)
    throw std::invalid_argument("twin_run_stability: requires the tilde variant");
  if (!(sigma >= 0.0) || sigma > cfg.T_final)
    throw std::invalid_argument("twin_run_stability: sigma outside [0, T_final]");

  Stepper st(cfg);
  const Field p0a = make_p0_field(cfg);
  Field p0b = p0a;
  if (perturb_eps != 0.0) {
    const Field bump = smooth_bump(cfg.grid, cfg.seed ^ 0x517cc1b727220a95ULL);
    for (int k = 0; k < p0b.size(); ++k) p0b.data()[k] += perturb_eps * bump.data()[k];
    const InitialReport ir = validate_initial(p0b, cfg.coeffs);
    if (!ir.ok)
      throw std::invalid_argument("twin_run_stability: perturbed initial data rejected: " +
                                  ir.message);
  }

  SimState a = st.make_initial_state(p0a);
  SimState b = st.make_initial_state(p0b);

  TwinRunReport rep;
  auto push_distance = [&](double t) {
    const double d = pair_l2(a.phi1, a.phi2, b.phi1, b.phi2) + single_l2(a.P, b.P) +
                     pair_l2(a.R1, a.R2, b.R1, b.R2);
    rep.times.push_back(t);
    rep.distance.push_back(d);
  };
  push_distance(0.0);

  long long n_steps = 0;
  if (cfg.T_final > 0.0)
    n_steps = static_cast<long long>(std::ceil(cfg.T_final / cfg.tau - 1e-9));
  for (long long k = 1; k <= n_steps; ++k) {
    st.step(a);
    st.step(b);
    if (k % cfg.output_every == 0 || k == n_steps) push_distance(a.t);
  }

  size_t i_sigma = rep.times.size();
  for (size_t i = 0; i < rep.times.size(); ++i)
    if (rep.times[i] >= sigma) {
      i_sigma = i;
      break;
    }
  if (i_sigma == rep.times.size())
    throw std::invalid_argument("twin_run_stability: no output time at or past sigma");
  rep.sigma_eff = rep.times[i_sigma];
  rep.d_sigma = rep.distance[i_sigma];

  double sup = 0.0;
  bool any_positive = false;
  for (size_t i = i_sigma; i < rep.distance.size(); ++i) {
    if (rep.distance[i] > 0.0) any_positive = true;
    if (rep.d_sigma > 0.0) sup = std::max(sup, rep.distance[i] / rep.d_sigma);
  }
  if (rep.d_sigma == 0.0) {
    rep.sup_ratio = any_positive ? std::numeric_limits<double>::infinity() : 1.0;
  } else {
    rep.sup_ratio = sup;
  }
  return rep;
}

WeightedProbeSummary weighted_probes(const std::vector<DiagnosticsRecord>& records, double alpha,
                                     double area) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("weighted_probes: alpha must lie in (0, 1)");
  WeightedProbeSummary out;
  for (const auto& r : records) {
    const double t = std::max(0.0, r.t);
    out.sup_w_half_gradmu = std::max(out.sup_w_half_gradmu, std::sqrt(t) * r.grad_mu_l2);
    const double proxy = std::sqrt(r.grad_mu_l2 * r.grad_mu_l2 +
                                   area * (r.mu1_mean * r.mu1_mean + r.mu2_mean * r.mu2_mean));
    out.sup_w_alpha_mu = std::max(out.sup_w_alpha_mu, std::pow(t, 1.5 - alpha) * proxy);
  }
  return out;
}

}  // namespace rnp
