#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

const std::string kCli = RNPSIM_CLI_PATH;

int run_cli(const std::string& args, std::string* stdout_text = nullptr) {
  const std::string out = "/tmp/rnp_cli_out.txt";
  const std::string cmd = kCli + " " + args + " > " + out + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  if (stdout_text) {
    std::ifstream is(out);
    std::ostringstream os;
    os << is.rdbuf();
    *stdout_text = os.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("check-config echoes a resolved manifest and exits 0") {
  write_file("/tmp/rnp_cli_a.conf", "[rnp]\nP0_const = 0.5\nT_final = 0.001\n");
  std::string out;
  CHECK(run_cli("check-config /tmp/rnp_cli_a.conf", &out) == 0);
  CHECK(out.find("[rnp]") != std::string::npos);
  CHECK(out.find("tau = ") != std::string::npos);
  CHECK(out.find("variant = flory_huggins") != std::string::npos);
}

TEST_CASE("config errors exit with code 2") {
  write_file("/tmp/rnp_cli_b.conf", "[rnp]\nc2 = 0.6\nc4 = 0.5\n");
  CHECK(run_cli("check-config /tmp/rnp_cli_b.conf") == 2);
  CHECK(run_cli("run /tmp/rnp_cli_b.conf") == 2);
  CHECK(run_cli("run /tmp/does_not_exist.conf") == 2);
  write_file("/tmp/rnp_cli_c.conf", "[cho]\n");
  CHECK(run_cli("run /tmp/rnp_cli_c.conf") == 2);  // model mismatch
  CHECK(run_cli("bogus-subcommand") == 2);
}

TEST_CASE("short coupled run passes all invariants and is deterministic") {
  write_file("/tmp/rnp_cli_d.conf", "[rnp]\nnx = 16\nny = 16\nT_final = 0.004\n");
  std::string out;
  CHECK(run_cli("run /tmp/rnp_cli_d.conf --csv /tmp/rnp_cli_d1.csv", &out) == 0);
  CHECK(out.find("invariant_conservation = pass") != std::string::npos);
  CHECK(out.find("invariant_minmax = pass") != std::string::npos);
  CHECK(run_cli("run /tmp/rnp_cli_d.conf --csv /tmp/rnp_cli_d2.csv") == 0);
  CHECK(slurp("/tmp/rnp_cli_d1.csv") == slurp("/tmp/rnp_cli_d2.csv"));
  CHECK(!slurp("/tmp/rnp_cli_d1.csv").empty());
}

TEST_CASE("pgm snapshots are written and deterministic") {
  write_file("/tmp/rnp_cli_p.conf",
             "[rnp]\nnx = 16\nny = 16\nT_final = 0.002\noutput_every = 4\n");
  CHECK(run_cli("run /tmp/rnp_cli_p.conf --pgm-prefix /tmp/rnp_cli_p1_") == 0);
  CHECK(run_cli("run /tmp/rnp_cli_p.conf --pgm-prefix /tmp/rnp_cli_p2_") == 0);
  const std::string a = slurp("/tmp/rnp_cli_p1_P_00000.pgm");
  const std::string b = slurp("/tmp/rnp_cli_p2_P_00000.pgm");
  CHECK(!a.empty());
  CHECK(a == b);
  CHECK(a.substr(0, 2) == "P5");
}

TEST_CASE("a wildly oversized time step trips an invariant or numerical failure") {
  write_file("/tmp/rnp_cli_e.conf",
             "[rnp]\nnx = 16\nny = 16\ntau = 500\nT_final = 2500\noutput_every = 1\n");
  std::string out;
  const int rc = run_cli("run /tmp/rnp_cli_e.conf", &out);
  CHECK((rc == 1 || rc == 3));
  if (rc == 1) CHECK(out.find("FAIL") != std::string::npos);
}

TEST_CASE("cho subcommand runs and checks the exact mean recursion") {
  write_file("/tmp/rnp_cli_f.conf", "[cho]\nnx = 16\nny = 16\nT_final = 0.02\n");
  std::string out;
  CHECK(run_cli("cho /tmp/rnp_cli_f.conf --csv /tmp/rnp_cli_f.csv", &out) == 0);
  CHECK(out.find("invariant_mean_recursion = pass") != std::string::npos);
  CHECK(out.find("invariant_open_range = pass") != std::string::npos);
  const std::string csv = slurp("/tmp/rnp_cli_f.csv");
  CHECK(csv.find("t,phi_mean") == 0);
}

TEST_CASE("verify-mz is seeded and reproducible") {
  std::string a, b;
  CHECK(run_cli("verify-mz --trials 200 --seed 7 --nx 16", &a) == 0);
  CHECK(run_cli("verify-mz --trials 200 --seed 7 --nx 16", &b) == 0);
  CHECK(a == b);
  CHECK(a.find("result = pass") != std::string::npos);
}
