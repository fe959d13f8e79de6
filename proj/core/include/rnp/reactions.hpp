#pragma once

#include <string>

#include "rnp/grid.hpp"

namespace rnp {

/// Rate constants of the complex formation / dissociation reactions plus the
/// run horizon and domain measure that enter the separation threshold.
struct ReactionCoeffs {
  double c1 = 1.0;
  double c2 = 0.01;
  double c3 = 1.0;
  double c4 = 0.01;
  double T_final = 0.05;
  double area = 1.0;
};

struct CoeffReport {
  bool ok = false;
  double threshold = 0.0;  // (c2 + c4) / min(c1, c3)
  std::string message;
};

/// Admissibility of the rates: positivity and min(c1, c3) > c2 + c4. The
/// report names the violated inequality.
CoeffReport validate_coeffs(const ReactionCoeffs& c);

struct InitialReport {
  bool ok = false;
  double deviation = 0.0;  // max |P0 - 1/2|
  double bound = 0.0;      // (1/2) (1 - threshold)
  std::string message;
};

/// Checks 0 <= P0 <= 1 cell-wise and that P0 keeps the distance from 1/2
/// required for the min/max principles to hold.
InitialReport validate_initial(const Field& P0, const ReactionCoeffs& c);

/// Source fields. By construction sr_i = -sphi_i and sp = -(sphi1 + sphi2)
/// bit-exactly, which is what makes the discrete mass balances exact.
struct SourceFields {
  Field sphi1, sphi2, sp, sr1, sr2;
};

/// sphi_i = c_{2i-1} h(P) h(R_i) - c_{2i} phiJ_i, with the [0,1] truncation h
/// applied only when `truncated` is set. phiJ carries the resolvent-mapped
/// phases.
SourceFields sources(const Field& phiJ1, const Field& phiJ2, const Field& P, const Field& R1,
                     const Field& R2, const ReactionCoeffs& c, bool truncated);

/// Separation threshold
///   c* = (c2 + c4) / (2 min(c1, c3)) / max(4, e^{(c1+c3) T} sqrt(area)),
/// which always lands in (0, (c2 + c4) / (8 min(c1, c3))].
double c_star(const ReactionCoeffs& c);

}  // namespace rnp
