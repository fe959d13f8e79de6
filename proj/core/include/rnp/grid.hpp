#pragma once

#include <string>
#include <vector>

namespace rnp {

/// Uniform cell-centered rectangular grid. Homogeneous Neumann boundaries are
/// realized by mirrored ghost cells in every stencil that touches the border,
/// which makes the discrete Laplacian conservative: its entries sum to zero
/// by telescoping of the face fluxes.
struct Grid {
  int nx = 64;
  int ny = 64;
  double lx = 1.0;
  double ly = 1.0;

  Grid() = default;
  Grid(int nx_, int ny_, double lx_ = 1.0, double ly_ = 1.0);

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double area() const { return lx * ly; }
  double cell_area() const { return hx() * hy(); }
  int size() const { return nx * ny; }

  double x_center(int i) const { return (i + 0.5) * hx(); }
  double y_center(int j) const { return (j + 0.5) * hy(); }

  bool operator==(const Grid&) const = default;
};

/// Scalar grid function, stored row-major (j * nx + i).
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0)
      : grid_(g), values_(static_cast<size_t>(g.size()), fill) {}

  const Grid& grid() const { return grid_; }

  double& operator()(int i, int j) { return values_[static_cast<size_t>(j) * grid_.nx + i]; }
  double operator()(int i, int j) const { return values_[static_cast<size_t>(j) * grid_.nx + i]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  int size() const { return grid_.size(); }

  void fill(double v) { values_.assign(values_.size(), v); }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Throws std::invalid_argument unless the two fields live on the same grid.
void require_same_grid(const Field& a, const Field& b);

/// Five-point Neumann Laplacian with mirrored ghost cells.
Field laplacian(const Field& f);

/// In-place form writing into `out` (must share the grid of `f`).
void laplacian_into(const Field& f, Field& out);

/// Raw-array form over field-shaped buffers (no aliasing between src and dst).
void laplacian_raw(const Grid& g, const double* src, double* dst);

/// Arithmetic average of the cell values (uniform cells).
double mean(const Field& f);

/// Quadrature of |grad f|^2 over the domain from face differences. The two
/// faces adjacent to each boundary carry weight 3/2 so that the half cells
/// next to the border are covered; linear profiles integrate exactly.
double dirichlet_energy(const Field& f);

/// Dirichlet form of the Neumann stencil, <f, -lap f> * cell_area, evaluated
/// as the plain interior-face sum. This is the quadratic form whose gradient
/// flow the semi-implicit stepper discretizes, so per-step energy dissipation
/// holds for it at roundoff.
double dirichlet_form(const Field& f);

/// sqrt( sum f^2 * cell_area ), the discrete L2 norm.
double l2_norm(const Field& f);

double min_value(const Field& f);
double max_value(const Field& f);

/// True when no entry is NaN or infinite.
bool all_finite(const Field& f);

/// 8-bit binary PGM (P5) snapshot. Values are mapped linearly from [lo, hi]
/// to [0, 255] and clamped; rows are written top-down with the top row at
/// maximal y. Requires hi > lo.
void write_pgm(const Field& f, const std::string& path, double lo, double hi);

}  // namespace rnp
