#include "rnp/reactions.hpp"

#include <algorithm>
#include <cmath>

#include "rnp/potential.hpp"

namespace rnp {

CoeffReport validate_coeffs(const ReactionCoeffs& c) {
  CoeffReport rep;
  const double cmin = std::min(c.c1, c.c3);
  rep.threshold = (c.c2 + c.c4) / cmin;
  const double rates[4] = {c.c1, c.c2, c.c3, c.c4};
  const char* names[4] = {"c1", "c2", "c3", "c4"};
  for (int k = 0; k < 4; ++k) {
    if (!(rates[k] > 0.0)) {
      rep.message = std::string("positivity violated: ") + names[k] + " <= 0";
      return rep;
    }
  }
  if (!(cmin > c.c2 + c.c4)) {
    rep.message = "rate condition violated: min(c1, c3) = " + std::to_string(cmin) +
                  " <= c2 + c4 = " + std::to_string(c.c2 + c.c4);
    return rep;
  }
  rep.ok = true;
  rep.message = "ok";
  return rep;
}

InitialReport validate_initial(const Field& P0, const ReactionCoeffs& c) {
  InitialReport rep;
  rep.bound = 0.5 * (1.0 - (c.c2 + c.c4) / std::min(c.c1, c.c3));
  const double* v = P0.data();
  const int n = P0.size();
  double dev = 0.0;
  for (int k = 0; k < n; ++k) {
    if (v[k] < 0.0) {
      rep.message = "nonnegativity violated: min P0 = " + std::to_string(min_value(P0));
      return rep;
    }
    if (v[k] > 1.0) {
      rep.message = "upper bound violated: max P0 = " + std::to_string(max_value(P0));
      return rep;
    }
    dev = std::max(dev, std::abs(v[k] - 0.5));
  }
  rep.deviation = dev;
  if (dev > rep.bound) {
    rep.message = "deviation bound violated: max |P0 - 1/2| = " + std::to_string(dev) + " > " +
                  std::to_string(rep.bound);
    return rep;
  }
  rep.ok = true;
  rep.message = "ok";
  return rep;
}

SourceFields sources(const Field& phiJ1, const Field& phiJ2, const Field& P, const Field& R1,
                     const Field& R2, const ReactionCoeffs& c, bool truncated) {
  require_same_grid(phiJ1, phiJ2);
  require_same_grid(phiJ1, P);
  require_same_grid(phiJ1, R1);
  require_same_grid(phiJ1, R2);
  const Grid& g = phiJ1.grid();
  SourceFields s{Field(g), Field(g), Field(g), Field(g), Field(g)};
  const int n = g.size();
  const double* j1 = phiJ1.data();
  const double* j2 = phiJ2.data();
  const double* p = P.data();
  const double* r1 = R1.data();
  const double* r2 = R2.data();
  double* s1 = s.sphi1.data();
  double* s2 = s.sphi2.data();
  double* sp = s.sp.data();
  double* t1 = s.sr1.data();
  double* t2 = s.sr2.data();
  for (int k = 0; k < n; ++k) {
    const double hp = truncated ? truncate(p[k]) : p[k];
    const double h1 = truncated ? truncate(r1[k]) : r1[k];
    const double h2 = truncated ? truncate(r2[k]) : r2[k];
    const double a = c.c1 * hp * h1 - c.c2 * j1[k];
    const double b = c.c3 * hp * h2 - c.c4 * j2[k];
    s1[k] = a;
    s2[k] = b;
    t1[k] = -a;
    t2[k] = -b;
    sp[k] = -(a + b);
  }
  return s;
}

double c_star(const ReactionCoeffs& c) {
  const double denom = std::max(4.0, std::exp((c.c1 + c.c3) * c.T_final) * std::sqrt(c.area));
  return (c.c2 + c.c4) / (2.0 * std::min(c.c1, c.c3)) / denom;
}

}  // namespace rnp
