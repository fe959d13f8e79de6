#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "rnp/config.hpp"
#include "rnp/csv.hpp"

using namespace rnp;

TEST_CASE("parse_config: minimal section with defaults") {
  const ParsedConfig p = parse_config("[rnp]\nP0_const = 0.5\n");
  CHECK(p.model == ParsedConfig::Model::rnp);
  CHECK(p.solver.grid.nx == 64);
  CHECK(p.solver.tau == doctest::Approx((1.0 / 64) * (1.0 / 64) / 8.0).epsilon(1e-15));
  CHECK(p.solver.coeffs.c2 == 0.01);
  CHECK(p.solver.coeffs.area == doctest::Approx(1.0));
  CHECK(p.solver.coeffs.T_final == p.solver.T_final);
}

TEST_CASE("parse_config: comments, whitespace, cho section") {
  const ParsedConfig p = parse_config(
      "# scalar model\n"
      "[cho]\n"
      "m_rate = 2.0   # relaxation\n"
      "c_oono = -0.5\n");
  CHECK(p.model == ParsedConfig::Model::cho);
  CHECK(p.cho.m_rate == 2.0);
  CHECK(p.cho.c_oono == -0.5);
  CHECK(p.cho.phi0_const == -1.0);
}

TEST_CASE("parse_config: rate condition rejected through validation") {
  // c2 + c4 must stay below min(c1, c3); with the default c4 = 0.01 a lone
  // c2 = 0.6 still satisfies the condition and parses fine
  CHECK_NOTHROW(parse_config("[rnp]\nc2 = 0.6\n"));
  try {
    parse_config("[rnp]\nc2 = 0.6\nc4 = 0.5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("min(c1, c3)") != std::string::npos);
  }
}

TEST_CASE("parse_config: duplicate keys name both lines") {
  try {
    parse_config("[rnp]\nnx = 64\n# comment\nnx = 32\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
}

TEST_CASE("parse_config: unknown keys and malformed input carry line numbers") {
  try {
    parse_config("[rnp]\nnx = 64\nbogus_key = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("nx = 64\n"), ConfigError);          // missing section
  CHECK_THROWS_AS(parse_config("[rnp]\nnx\n"), ConfigError);        // missing '='
  CHECK_THROWS_AS(parse_config("[rnp]\nnx = abc\n"), ConfigError);  // junk value
  CHECK_THROWS_AS(parse_config("[fluid]\n"), ConfigError);          // unknown model
  CHECK_THROWS_AS(parse_config(""), ConfigError);
}

TEST_CASE("parse_config: cho forcing loaded from file and checked") {
  const std::string path = "/tmp/rnp_test_forcing.txt";
  {
    std::ofstream os(path);
    for (int k = 0; k < 8 * 8; ++k) os << 0.25 * (k % 3) << "\n";
  }
  const ParsedConfig p =
      parse_config("[cho]\nnx = 8\nny = 8\ng_path = " + path + "\n");
  REQUIRE(p.cho.forcing.has_value());
  CHECK((*p.cho.forcing)(1, 0) == 0.25);
  CHECK((*p.cho.forcing)(0, 0) == 0.0);

  {
    std::ofstream os(path);
    os << "1.0 2.0\n";  // far too few values
  }
  CHECK_THROWS_AS(parse_config("[cho]\nnx = 8\nny = 8\ng_path = " + path + "\n"), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("manifest: round trips to the identical resolved config") {
  const ParsedConfig p = parse_config("[rnp]\nvariant = tilde\nT_final = 0.01\nseed = 9\n");
  const std::string echoed = p.manifest.to_string();
  const ParsedConfig q = parse_config(echoed);
  CHECK(q.manifest.to_string() == echoed);
  CHECK(q.solver.pot.variant == PotentialVariant::tilde);
  CHECK(q.solver.seed == 9);
}

TEST_CASE("format_double: shortest round-trip representation") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  const double v = 0.1 + 0.2;
  CHECK(parse_double(format_double(v)) == v);
  CHECK(parse_double(format_double(-1.2345678912345678e-300)) == -1.2345678912345678e-300);
  CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
}

TEST_CASE("csv writer: header-only, single row, bit-exact round trip") {
  const std::string path = "/tmp/rnp_test_io.csv";

  write_csv({}, path);
  {
    std::ifstream is(path);
    std::string line;
    std::getline(is, line);
    CHECK(line == kCsvHeader);
    CHECK(!std::getline(is, line));
  }

  DiagnosticsRecord r;
  r.t = 0.0030000000000000001;
  r.mass_total = 1.0;
  r.sep = 1e-7;
  r.energy = -0.03859;
  r.w_alpha_mu = 3.0 / 7.0;
  write_csv({r}, path);
  {
    std::ifstream is(path);
    std::string line;
    std::getline(is, line);
    std::getline(is, line);
    CHECK(std::count(line.begin(), line.end(), ',') == 21);  // 22 columns
  }
  const auto back = read_csv(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].t == r.t);
  CHECK(back[0].sep == r.sep);
  CHECK(back[0].energy == r.energy);
  CHECK(back[0].w_alpha_mu == r.w_alpha_mu);
  std::remove(path.c_str());
}

TEST_CASE("csv reader rejects foreign files") {
  const std::string path = "/tmp/rnp_test_bad.csv";
  {
    std::ofstream os(path);
    os << "a,b,c\n1,2,3\n";
  }
  CHECK_THROWS(read_csv(path));
  std::remove(path.c_str());
}
