#include "rnp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rnp {

Grid::Grid(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
  if (nx < 4 || ny < 4) throw std::invalid_argument("Grid: nx and ny must be >= 4");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("Grid: side lengths must be positive");
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
}

void laplacian_into(const Field& f, Field& out) {
  require_same_grid(f, out);
  laplacian_raw(f.grid(), f.data(), out.data());
}

void laplacian_raw(const Grid& g, const double* src, double* dst) {
  const int nx = g.nx, ny = g.ny;
  const double ihx2 = 1.0 / (g.hx() * g.hx());
  const double ihy2 = 1.0 / (g.hy() * g.hy());
  for (int j = 0; j < ny; ++j) {
    const double* row = src + static_cast<size_t>(j) * nx;
    const double* rowS = (j > 0) ? row - nx : row;       // mirrored ghost below
    const double* rowN = (j < ny - 1) ? row + nx : row;  // mirrored ghost above
    double* orow = dst + static_cast<size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) {
      const double c = row[i];
      const double w = (i > 0) ? row[i - 1] : c;
      const double e = (i < nx - 1) ? row[i + 1] : c;
      orow[i] = ((w - c) + (e - c)) * ihx2 + ((rowS[i] - c) + (rowN[i] - c)) * ihy2;
    }
  }
}

Field laplacian(const Field& f) {
  Field out(f.grid());
  laplacian_raw(f.grid(), f.data(), out.data());
  return out;
}

double mean(const Field& f) {
  long double acc = 0.0L;
  const double* v = f.data();
  const int n = f.size();
  for (int k = 0; k < n; ++k) acc += v[k];
  return static_cast<double>(acc / n);
}

double dirichlet_energy(const Field& f) {
  const Grid& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  const double hx = g.hx(), hy = g.hy();
  long double acc = 0.0L;
  // x faces: weight 1.5 on the two faces next to the boundary columns
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double d = (f(i + 1, j) - f(i, j)) / hx;
      const double w = (i == 0 || i == nx - 2) ? 1.5 : 1.0;
      acc += static_cast<long double>(d * d) * w;
    }
  }
  long double ex = acc * hx * hy;
  acc = 0.0L;
  for (int j = 0; j + 1 < ny; ++j) {
    const double w = (j == 0 || j == ny - 2) ? 1.5 : 1.0;
    for (int i = 0; i < nx; ++i) {
      const double d = (f(i, j + 1) - f(i, j)) / hy;
      acc += static_cast<long double>(d * d) * w;
    }
  }
  return static_cast<double>(ex + acc * hx * hy);
}

double dirichlet_form(const Field& f) {
  const Grid& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  const double hx = g.hx(), hy = g.hy();
  long double acc = 0.0L;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const double d = (f(i + 1, j) - f(i, j)) / hx;
      acc += static_cast<long double>(d * d);
    }
  long double ex = acc * hx * hy;
  acc = 0.0L;
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double d = (f(i, j + 1) - f(i, j)) / hy;
      acc += static_cast<long double>(d * d);
    }
  return static_cast<double>(ex + acc * hx * hy);
}

double l2_norm(const Field& f) {
  long double acc = 0.0L;
  const double* v = f.data();
  const int n = f.size();
  for (int k = 0; k < n; ++k) acc += static_cast<long double>(v[k]) * v[k];
  return std::sqrt(static_cast<double>(acc * f.grid().cell_area()));
}

double min_value(const Field& f) {
  const double* v = f.data();
  return *std::min_element(v, v + f.size());
}

double max_value(const Field& f) {
  const double* v = f.data();
  return *std::max_element(v, v + f.size());
}

bool all_finite(const Field& f) {
  const double* v = f.data();
  const int n = f.size();
  for (int k = 0; k < n; ++k)
    if (!std::isfinite(v[k])) return false;
  return true;
}

void write_pgm(const Field& f, const std::string& path, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("write_pgm: requires hi > lo");
  const Grid& g = f.grid();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_pgm: cannot open '" + path + "'");
  os << "P5\n" << g.nx << " " << g.ny << "\n255\n";
  std::vector<uint8_t> row(static_cast<size_t>(g.nx));
  const double scale = 255.0 / (hi - lo);
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i) {
      double s = (f(i, j) - lo) * scale;
      s = std::min(255.0, std::max(0.0, s));
      row[static_cast<size_t>(i)] = static_cast<uint8_t>(std::lround(s));
    }
    os.write(reinterpret_cast<const char*>(row.data()), g.nx);
  }
  if (!os) throw std::runtime_error("write_pgm: write failed for '" + path + "'");
}

}  // namespace rnp
