#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "rnp/reactions.hpp"

using namespace rnp;

namespace {

Field random_field(const Grid& g, uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(g);
  for (int k = 0; k < g.size(); ++k) f.data()[k] = dist(rng);
  return f;
}

}  // namespace

TEST_CASE("validate_coeffs: threshold and violations") {
  ReactionCoeffs c;  // (1, 0.01, 1, 0.01)
  const CoeffReport ok = validate_coeffs(c);
  CHECK(ok.ok);
  CHECK(ok.threshold == doctest::Approx(0.02).epsilon(1e-15));

  ReactionCoeffs bad = c;
  bad.c2 = 0.6;
  bad.c4 = 0.5;
  const CoeffReport r1 = validate_coeffs(bad);
  CHECK(!r1.ok);
  CHECK(r1.message.find("min(c1, c3)") != std::string::npos);

  ReactionCoeffs zero = c;
  zero.c2 = 0.0;
  const CoeffReport r2 = validate_coeffs(zero);
  CHECK(!r2.ok);
  CHECK(r2.message.find("c2") != std::string::npos);
}

TEST_CASE("validate_initial: deviation bound and range") {
  const Grid g(8, 8);
  ReactionCoeffs c;
  CHECK(validate_initial(Field(g, 0.5), c).ok);

  const InitialReport too_far = validate_initial(Field(g, 0.999), c);
  CHECK(!too_far.ok);
  CHECK(too_far.bound == doctest::Approx(0.49).epsilon(1e-14));

  Field neg(g, 0.5);
  neg(3, 3) = -0.1;
  CHECK(!validate_initial(neg, c).ok);
  Field over(g, 0.5);
  over(2, 1) = 1.1;
  CHECK(!validate_initial(over, c).ok);
}

TEST_CASE("sources: formula, bit-exact identities, truncation") {
  const Grid g(8, 8);
  ReactionCoeffs c;

  SUBCASE("formula substitution") {
    const SourceFields s = sources(Field(g, 0.0), Field(g, 0.0), Field(g, 0.5), Field(g, 0.25),
                                   Field(g, 0.25), c, true);
    for (int k = 0; k < g.size(); ++k) {
      CHECK(s.sphi1.data()[k] == 0.125);
      CHECK(s.sphi2.data()[k] == 0.125);
    }
  }

  SUBCASE("antisymmetric structure holds bit-exactly on random inputs") {
    const Field j1 = random_field(g, 1, 0.0, 0.4);
    const Field j2 = random_field(g, 2, 0.0, 0.4);
    const Field P = random_field(g, 3, -0.5, 1.5);
    const Field R1 = random_field(g, 4, -0.5, 1.5);
    const Field R2 = random_field(g, 5, -0.5, 1.5);
    for (bool truncated : {false, true}) {
      const SourceFields s = sources(j1, j2, P, R1, R2, c, truncated);
      for (int k = 0; k < g.size(); ++k) {
        CHECK(s.sr1.data()[k] == -s.sphi1.data()[k]);
        CHECK(s.sr2.data()[k] == -s.sphi2.data()[k]);
        CHECK(s.sp.data()[k] == -(s.sphi1.data()[k] + s.sphi2.data()[k]));
      }
    }
  }

  SUBCASE("truncation clamps out-of-range concentrations") {
    const Field j1 = random_field(g, 6, 0.0, 0.4);
    const SourceFields s =
        sources(j1, Field(g, 0.1), Field(g, 2.0), Field(g, -1.0), Field(g, 0.5), c, true);
    for (int k = 0; k < g.size(); ++k) {
      // h(2) h(-1) = 1 * 0 = 0, so only the decay term remains
      CHECK(s.sphi1.data()[k] == -c.c2 * j1.data()[k]);
    }
  }

  SUBCASE("truncated and plain sources coincide on in-range inputs") {
    const Field j1 = random_field(g, 7, 0.0, 0.4);
    const Field j2 = random_field(g, 8, 0.0, 0.4);
    const Field P = random_field(g, 9, 0.0, 1.0);
    const Field R1 = random_field(g, 10, 0.0, 1.0);
    const Field R2 = random_field(g, 11, 0.0, 1.0);
    const SourceFields a = sources(j1, j2, P, R1, R2, c, true);
    const SourceFields b = sources(j1, j2, P, R1, R2, c, false);
    for (int k = 0; k < g.size(); ++k) {
      CHECK(a.sphi1.data()[k] == b.sphi1.data()[k]);
      CHECK(a.sphi2.data()[k] == b.sphi2.data()[k]);
      CHECK(a.sp.data()[k] == b.sp.data()[k]);
    }
  }

  SUBCASE("shape mismatch is rejected") {
    const Grid g2(16, 16);
    CHECK_THROWS_AS(sources(Field(g2), Field(g), Field(g), Field(g), Field(g), c, true),
                    std::invalid_argument);
  }
}

TEST_CASE("c_star: closed formula, bounds, limits, monotonicity") {
  ReactionCoeffs c;
  c.T_final = 1.0;
  c.area = 1.0;
  // hand evaluation: e^2 > 4, so c* = 0.01 / e^2
  CHECK(c_star(c) == doctest::Approx(0.01 / std::exp(2.0)).epsilon(1e-14));
  CHECK(c_star(c) == doctest::Approx(1.3533528323661270e-3).epsilon(1e-12));

  // always within (0, (c2 + c4) / (8 min(c1, c3))]
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 4.0);
  for (int k = 0; k < 200; ++k) {
    ReactionCoeffs rc;
    rc.c1 = u(rng);
    rc.c3 = u(rng);
    rc.c2 = 0.1 * std::min(rc.c1, rc.c3) * 0.5;
    rc.c4 = 0.1 * std::min(rc.c1, rc.c3) * 0.4;
    rc.T_final = u(rng);
    rc.area = u(rng);
    const double cs = c_star(rc);
    CHECK(cs > 0.0);
    CHECK(cs <= (rc.c2 + rc.c4) / (8.0 * std::min(rc.c1, rc.c3)) + 1e-18);
  }

  // T -> 0 with unit area: the max saturates at 4
  ReactionCoeffs t0;
  t0.T_final = 0.0;
  t0.area = 1.0;
  CHECK(c_star(t0) == (t0.c2 + t0.c4) / (8.0 * std::min(t0.c1, t0.c3)));

  // decreasing in T_final, and in area once e^{(c1+c3)T} sqrt(area) >= 4
  double prev = 1e300;
  for (double T : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    ReactionCoeffs rc;
    rc.T_final = T;
    const double cs = c_star(rc);
    CHECK(cs <= prev + 1e-18);
    prev = cs;
  }
  prev = 1e300;
  for (double area : {1.0, 2.0, 4.0, 16.0}) {
    ReactionCoeffs rc;
    rc.T_final = 1.0;  // 16 e^{-2(c1+c3)T} = 16 e^{-4} < 1, bound active
    rc.area = area;
    const double cs = c_star(rc);
    CHECK(cs <= prev + 1e-18);
    prev = cs;
  }
}
