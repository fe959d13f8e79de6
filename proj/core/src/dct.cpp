#include "rnp/dct.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>

namespace rnp {

DctWorkspace::DctWorkspace(const Grid& g)
    : grid_(g),
      zeta_x_(static_cast<size_t>(g.nx)),
      zeta_y_(static_cast<size_t>(g.ny)),
      buf_(static_cast<size_t>(g.size())) {
  const double ihx2 = 1.0 / (g.hx() * g.hx());
  const double ihy2 = 1.0 / (g.hy() * g.hy());
  for (int k = 0; k < g.nx; ++k) {
    const double s = std::sin(0.5 * M_PI * k / g.nx);
    zeta_x_[static_cast<size_t>(k)] = 4.0 * ihx2 * s * s;
  }
  for (int k = 0; k < g.ny; ++k) {
    const double s = std::sin(0.5 * M_PI * k / g.ny);
    zeta_y_[static_cast<size_t>(k)] = 4.0 * ihy2 * s * s;
  }
  // in-place 2D DCT-II / DCT-III pair on the internal buffer
  plan_fwd_ = fftw_plan_r2r_2d(g.ny, g.nx, buf_.data(), buf_.data(), FFTW_REDFT10, FFTW_REDFT10,
                               FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_r2r_2d(g.ny, g.nx, buf_.data(), buf_.data(), FFTW_REDFT01, FFTW_REDFT01,
                               FFTW_ESTIMATE);
}

DctWorkspace::~DctWorkspace() {
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void DctWorkspace::solve_modal(const double* x, double* y, double a, double b, double c) const {
  const int nx = grid_.nx, ny = grid_.ny;
  std::memcpy(buf_.data(), x, sizeof(double) * static_cast<size_t>(nx) * ny);
  fftw_execute_r2r(static_cast<fftw_plan>(plan_fwd_), buf_.data(), buf_.data());
  const double scale = 1.0 / (4.0 * nx * ny);  // REDFT10 + REDFT01 normalization
  for (int ky = 0; ky < ny; ++ky) {
    const double zy = zeta_y_[static_cast<size_t>(ky)];
    double* row = buf_.data() + static_cast<size_t>(ky) * nx;
    for (int kx = 0; kx < nx; ++kx) {
      const double zeta = zeta_x_[static_cast<size_t>(kx)] + zy;
      row[kx] *= scale / (a - b * zeta + c * zeta * zeta);
    }
  }
  fftw_execute_r2r(static_cast<fftw_plan>(plan_bwd_), buf_.data(), buf_.data());
  std::memcpy(y, buf_.data(), sizeof(double) * static_cast<size_t>(nx) * ny);
}

void DctWorkspace::solve_modal(const Field& x, Field& y, double a, double b, double c) const {
  require_same_grid(x, y);
  solve_modal(x.data(), y.data(), a, b, c);
}

}  // namespace rnp
