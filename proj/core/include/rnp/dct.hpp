#pragma once

#include <memory>
#include <vector>

#include "rnp/grid.hpp"

namespace rnp {

/// Cosine-transform workspace diagonalizing the mirrored-ghost Neumann
/// Laplacian on a Grid. Eigenvectors are the DCT-II modes
/// cos(pi k (i + 1/2) / n); the eigenvalue of -lap for mode (kx, ky) is
/// zeta(kx) + zeta(ky) with zeta(k) = (4/h^2) sin^2(pi k / (2n)).
///
/// Plans are created with FFTW_ESTIMATE so the chosen algorithm depends only
/// on the problem size, keeping runs bit-reproducible.
class DctWorkspace {
 public:
  explicit DctWorkspace(const Grid& g);
  ~DctWorkspace();

  DctWorkspace(const DctWorkspace&) = delete;
  DctWorkspace& operator=(const DctWorkspace&) = delete;

  const Grid& grid() const { return grid_; }

  /// Solves (a I + b lap + c lap^2) y = x in the cosine basis. The symbol
  /// a + b*(-zeta) + c*zeta^2 must stay positive; no check is performed.
  void solve_modal(const Field& x, Field& y, double a, double b, double c) const;

  /// Raw-array variant over a field-shaped buffer.
  void solve_modal(const double* x, double* y, double a, double b, double c) const;

 private:
  Grid grid_;
  std::vector<double> zeta_x_;
  std::vector<double> zeta_y_;
  mutable std::vector<double> buf_;
  void* plan_fwd_ = nullptr;  // fftw_plan, kept opaque here
  void* plan_bwd_ = nullptr;
};

}  // namespace rnp
