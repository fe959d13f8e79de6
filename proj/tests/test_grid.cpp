#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "rnp/grid.hpp"

using namespace rnp;

namespace {

Field random_field(const Grid& g, uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(g);
  for (int k = 0; k < g.size(); ++k) f.data()[k] = dist(rng);
  return f;
}

Field flip_x(const Field& f) {
  const Grid& g = f.grid();
  Field out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.nx - 1 - i, j);
  return out;
}

}  // namespace

TEST_CASE("grid constructor enforces bounds") {
  CHECK_THROWS_AS(Grid(3, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid(8, 3), std::invalid_argument);
  CHECK_THROWS_AS(Grid(8, 8, -1.0, 1.0), std::invalid_argument);
  const Grid g(64, 32, 2.0, 1.0);
  CHECK(g.hx() == doctest::Approx(2.0 / 64));
  CHECK(g.area() == doctest::Approx(2.0));
}

TEST_CASE("laplacian of a constant vanishes identically") {
  const Grid g(16, 16);
  const Field f(g, 0.7315);
  const Field lap = laplacian(f);
  for (int k = 0; k < g.size(); ++k) CHECK(lap.data()[k] == 0.0);
}

TEST_CASE("laplacian is conservative") {
  const Grid g(32, 24, 1.0, 0.7);
  for (uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const Field f = random_field(g, seed);
    const Field lap = laplacian(f);
    long double sum = 0.0L;
    double maxabs = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      sum += lap.data()[k];
      maxabs = std::max(maxabs, std::abs(f.data()[k]));
    }
    const double hmin = std::min(g.hx(), g.hy());
    CHECK(std::abs(double(sum)) <= 1e-12 * g.nx * g.ny * maxabs / (hmin * hmin));
  }
}

TEST_CASE("laplacian of a 1D quadratic is exactly 2 in the interior") {
  // integer-spaced grid: the stencil arithmetic on (i + 1/2)^2 is exact
  const Grid g(16, 8, 16.0, 8.0);
  Field f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) = g.x_center(i) * g.x_center(i);
  const Field lap = laplacian(f);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) CHECK(lap(i, j) == 2.0);

  // unit square: same up to roundoff amplified by 1/h^2
  const Grid u(64, 64);
  Field fu(u);
  for (int j = 0; j < u.ny; ++j)
    for (int i = 0; i < u.nx; ++i) fu(i, j) = u.x_center(i) * u.x_center(i);
  const Field lapu = laplacian(fu);
  for (int j = 0; j < u.ny; ++j)
    for (int i = 1; i + 1 < u.nx; ++i) CHECK(lapu(i, j) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("laplacian commutes with grid reflection") {
  const Grid g(16, 12);
  const Field f = random_field(g, 99);
  const Field a = flip_x(laplacian(f));
  const Field b = laplacian(flip_x(f));
  for (int k = 0; k < g.size(); ++k) CHECK(a.data()[k] == b.data()[k]);
}

TEST_CASE("mean of constants and symmetric fields") {
  const Grid g(64, 64);
  CHECK(mean(Field(g, 0.37)) == 0.37);

  Field alt(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) alt(i, j) = ((i + j) % 2 == 0) ? 1.0 : -1.0;
  CHECK(mean(alt) == 0.0);

  const Field f = random_field(g, 7);
  Field centered = f;
  const double m = mean(f);
  for (int k = 0; k < g.size(); ++k) centered.data()[k] -= m;
  CHECK(std::abs(mean(centered)) <= 1e-14);

  // mean is reflection invariant (up to accumulation-order rounding)
  CHECK(mean(flip_x(f)) == doctest::Approx(mean(f)).epsilon(1e-15));
}

TEST_CASE("dirichlet_energy: constants, unit slope, positivity, shifts") {
  const Grid g(64, 64);
  CHECK(dirichlet_energy(Field(g, 3.25)) == 0.0);

  Field slope(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) slope(i, j) = g.x_center(i);
  CHECK(dirichlet_energy(slope) == doctest::Approx(1.0).epsilon(1e-10));

  const Field f = random_field(g, 3);
  const double e = dirichlet_energy(f);
  CHECK(e >= 0.0);

  Field shifted = f;
  for (int k = 0; k < g.size(); ++k) shifted.data()[k] += 17.5;
  CHECK(dirichlet_energy(shifted) == doctest::Approx(e).epsilon(1e-9));
}

TEST_CASE("dirichlet_form agrees with the stencil quadratic form") {
  const Grid g(24, 16, 1.0, 0.5);
  const Field f = random_field(g, 12);
  const Field lap = laplacian(f);
  long double acc = 0.0L;
  for (int k = 0; k < g.size(); ++k) acc += -f.data()[k] * lap.data()[k];
  const double quad = double(acc) * g.cell_area();
  CHECK(dirichlet_form(f) == doctest::Approx(quad).epsilon(1e-12));
  CHECK(dirichlet_form(Field(g, 1.0)) == 0.0);
}

TEST_CASE("field utilities") {
  const Grid g(8, 8);
  Field f(g, 1.0);
  f(3, 4) = -2.0;
  CHECK(min_value(f) == -2.0);
  CHECK(max_value(f) == 1.0);
  CHECK(l2_norm(Field(g, 2.0)) == doctest::Approx(2.0));
  CHECK(all_finite(f));
  f(0, 0) = std::nan("");
  CHECK(!all_finite(f));

  const Field other{Grid(16, 16)};
  CHECK_THROWS_AS(require_same_grid(f, other), std::invalid_argument);
}

TEST_CASE("pgm writer: mapping, clamping, row order") {
  const Grid g(4, 5);
  Field f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) = j / 4.0;  // 0, .25, .5, .75, 1 by row
  f(0, 0) = -3.0;  // clamps to 0
  f(1, 0) = 3.0;   // clamps to 255
  const std::string path = "/tmp/rnp_test_grid.pgm";
  write_pgm(f, path, 0.0, 1.0);

  std::ifstream is(path, std::ios::binary);
  std::string header;
  std::getline(is, header);
  CHECK(header == "P5");
  int w = 0, h = 0, maxval = 0;
  is >> w >> h >> maxval;
  CHECK(w == 4);
  CHECK(h == 5);
  CHECK(maxval == 255);
  is.get();  // single whitespace after maxval
  std::vector<unsigned char> bytes(20);
  is.read(reinterpret_cast<char*>(bytes.data()), 20);
  CHECK(is.gcount() == 20);
  // top row is j = 4 -> value 1.0 -> 255
  CHECK(bytes[0] == 255);
  // bottom row is j = 0: clamped entries first
  CHECK(bytes[16] == 0);
  CHECK(bytes[17] == 255);
  CHECK(bytes[18] == 0);
  // middle row j = 2 -> 0.5 -> 128 (round-half-away)
  CHECK(bytes[8 + 2] == 128);

  CHECK_THROWS_AS(write_pgm(f, path, 1.0, 1.0), std::invalid_argument);
  std::remove(path.c_str());
}
