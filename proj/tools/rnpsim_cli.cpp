// rnpsim command-line front end: coupled runs, the scalar relaxation model,
// the entropy-inequality harness, and config inspection.
//
// Exit codes: 0 all asserted invariants pass, 1 invariant failure,
// 2 usage/config error, 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <string>
#include <vector>

#include "rnp/cho.hpp"
#include "rnp/config.hpp"
#include "rnp/csv.hpp"
#include "rnp/diagnostics.hpp"
#include "rnp/errors.hpp"
#include "rnp/meanfield.hpp"
#include "rnp/stepper.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string now_iso() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CollectSink : rnp::RunSink {
  std::vector<rnp::DiagnosticsRecord> records;
  rnp::MeanSeries series;
  std::string pgm_prefix;
  double pgm_lo = 0.0, pgm_hi = 1.0;
  int snapshot_index = 0;
  bool admissible = true;

  void on_record(const rnp::DiagnosticsRecord& r) override { records.push_back(r); }
  void on_mean_sample(const rnp::MeanSample& s) override { series.push(s); }
  void on_state(const rnp::SimState& s) override {
    check_admissibility(s);
    if (pgm_prefix.empty()) return;
    char idx[16];
    std::snprintf(idx, sizeof(idx), "%05d", snapshot_index++);
    rnp::write_pgm(s.phi1, pgm_prefix + "phi1_" + idx + ".pgm", pgm_lo, pgm_hi);
    rnp::write_pgm(s.phi2, pgm_prefix + "phi2_" + idx + ".pgm", pgm_lo, pgm_hi);
    rnp::write_pgm(s.P, pgm_prefix + "P_" + idx + ".pgm", pgm_lo, pgm_hi);
  }

  const rnp::SolverConfig* cfg = nullptr;
  void check_admissibility(const rnp::SimState& s) {
    if (!cfg) return;
    const int n = s.phi1.size();
    std::vector<double> p1(n), p2(n);
    rnp::resolvent_sweep(n, s.phi1.data(), s.phi2.data(), cfg->pot.lambda, cfg->pot.variant,
                         p1.data(), p2.data(), nullptr, nullptr);
    for (int k = 0; k < n; ++k) {
      const bool open = cfg->pot.variant == rnp::PotentialVariant::flory_huggins
                            ? (p1[k] > 0.0 && p2[k] > 0.0 && p1[k] + p2[k] < 1.0)
                            : (p1[k] > 0.0 && p2[k] > 0.0);
      if (!open) {
        admissible = false;
        return;
      }
    }
  }
};

void print_manifest(const rnp::RunManifest& manifest,
                    const std::vector<std::pair<std::string, std::string>>& run_info) {
  std::cout << manifest.to_string();
  for (const auto& [k, v] : run_info) std::cout << "# " << k << " = " << v << "\n";
}

int cmd_run(const std::string& config_path, const std::string& csv_path,
            const std::string& pgm_prefix, double pgm_lo, double pgm_hi) {
  rnp::ParsedConfig parsed;
  try {
    parsed = rnp::parse_config_file(config_path);
  } catch (const rnp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (parsed.model != rnp::ParsedConfig::Model::rnp) {
    std::cerr << "config error: `run` expects an [rnp] config\n";
    return kExitConfig;
  }
  const rnp::SolverConfig& cfg = parsed.solver;

  CollectSink sink;
  sink.cfg = &cfg;
  sink.pgm_prefix = pgm_prefix;
  sink.pgm_lo = pgm_lo;
  sink.pgm_hi = pgm_hi;

  std::vector<std::pair<std::string, std::string>> info;
  info.emplace_back("artifact", rnp::kVersionString);
  info.emplace_back("start_time", now_iso());

  int exit_code = kExitOk;
  std::string failure;
  try {
    rnp::run(cfg, sink);
  } catch (const rnp::NumericalError& e) {
    failure = e.what();
    exit_code = kExitNumerical;
  }
  // partial output is still flushed on numerical failure
  if (!csv_path.empty()) rnp::write_csv(sink.records, csv_path);

  info.emplace_back("end_time", now_iso());

  if (exit_code == kExitNumerical) {
    info.emplace_back("numerical_failure", failure);
    print_manifest(parsed.manifest, info);
    std::cerr << "numerical failure: " << failure << "\n";
    return kExitNumerical;
  }

  // invariant families
  const auto& s = sink.series.samples;
  double max_step_drift = 0.0;
  for (size_t k = 0; k + 1 < s.size(); ++k) {
    const auto combo = [](const rnp::MeanSample& m) {
      return std::array<double, 4>{2.0 * (m.y1 + m.y2) + m.r1mean + m.r2mean + m.pmean,
                                   m.y1 + m.r1mean, m.y1 + m.y2 + m.pmean,
                                   m.r1mean + m.r2mean - m.pmean};
    };
    const auto a = combo(s[k]), b = combo(s[k + 1]);
    for (int c = 0; c < 4; ++c) max_step_drift = std::max(max_step_drift, std::abs(b[c] - a[c]));
  }
  const bool conservation_ok = max_step_drift <= 1e-11;
  info.emplace_back("max_per_step_mass_drift", rnp::format_double(max_step_drift));
  info.emplace_back("invariant_conservation", conservation_ok ? "pass" : "FAIL");
  if (!conservation_ok) exit_code = kExitInvariant;

  info.emplace_back("invariant_admissibility", sink.admissible ? "pass" : "FAIL");
  if (!sink.admissible) exit_code = kExitInvariant;

  if (!cfg.zero_sources) {
    const double cs = rnp::c_star(cfg.coeffs);
    bool minmax_ok = true;
    for (const auto& r : sink.records) {
      if (r.Pmin < cs - 1e-3 || r.Pmax > 1.0 + 1e-3 || r.R1min < cs - 1e-3 ||
          r.R1max > 1.0 + 1e-3 || r.R2min < cs - 1e-3 || r.R2max > 1.0 + 1e-3)
        minmax_ok = false;
    }
    info.emplace_back("c_star", rnp::format_double(cs));
    info.emplace_back("invariant_minmax", minmax_ok ? "pass" : "FAIL");
    if (!minmax_ok) exit_code = kExitInvariant;

    if (sink.series.size() >= 2) {
      const rnp::MeanOdeResiduals res = rnp::mean_ode_residual(sink.series, cfg.coeffs);
      const bool ode_ok = res.max_abs <= 1e-10;
      info.emplace_back("mean_ode_max_residual", rnp::format_double(res.max_abs));
      info.emplace_back("invariant_mean_ode", ode_ok ? "pass" : "FAIL");
      if (!ode_ok) exit_code = kExitInvariant;
    }
  } else {
    bool energy_ok = true;
    for (size_t k = 0; k + 1 < sink.records.size(); ++k)
      if (sink.records[k + 1].energy > sink.records[k].energy + 1e-10) energy_ok = false;
    info.emplace_back("invariant_energy_dissipation", energy_ok ? "pass" : "FAIL");
    if (!energy_ok) exit_code = kExitInvariant;
  }

  print_manifest(parsed.manifest, info);
  return exit_code;
}

int cmd_cho(const std::string& config_path, const std::string& csv_path) {
  rnp::ParsedConfig parsed;
  try {
    parsed = rnp::parse_config_file(config_path);
  } catch (const rnp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (parsed.model != rnp::ParsedConfig::Model::cho) {
    std::cerr << "config error: `cho` expects a [cho] config\n";
    return kExitConfig;
  }
  const rnp::ChoConfig& cfg = parsed.cho;

  std::vector<std::pair<std::string, std::string>> info;
  info.emplace_back("artifact", rnp::kVersionString);
  info.emplace_back("start_time", now_iso());

  rnp::ChoTrajectory tr;
  try {
    tr = rnp::cho_run(cfg);
  } catch (const rnp::NumericalError& e) {
    info.emplace_back("numerical_failure", e.what());
    print_manifest(parsed.manifest, info);
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  if (!csv_path.empty()) rnp::write_cho_csv(tr.records, csv_path);
  info.emplace_back("end_time", now_iso());

  int exit_code = kExitOk;

  // exact mean recursion against the closed form
  double worst = 0.0;
  const double y0 = tr.mean.front();
  for (size_t n = 0; n < tr.mean.size(); ++n) {
    const double closed =
        cfg.c_oono + (y0 - cfg.c_oono) * std::pow(1.0 - cfg.m_rate * cfg.tau, double(n));
    worst = std::max(worst, std::abs(tr.mean[n] - closed));
  }
  const bool recursion_ok = worst <= 1e-12;
  info.emplace_back("mean_recursion_max_error", rnp::format_double(worst));
  info.emplace_back("invariant_mean_recursion", recursion_ok ? "pass" : "FAIL");
  if (!recursion_ok) exit_code = kExitInvariant;

  bool range_ok = true;
  for (const auto& r : tr.records)
    if (r.t > 0.0 && (r.phi_min <= -1.0 || r.phi_max >= 1.0)) range_ok = false;
  info.emplace_back("invariant_open_range", range_ok ? "pass" : "FAIL");
  if (!range_ok) exit_code = kExitInvariant;

  if (cfg.m_rate == 0.0) {
    bool energy_ok = true;
    for (size_t k = 0; k + 1 < tr.records.size(); ++k)
      if (tr.records[k + 1].energy > tr.records[k].energy + 1e-10) energy_ok = false;
    info.emplace_back("invariant_energy_dissipation", energy_ok ? "pass" : "FAIL");
    if (!energy_ok) exit_code = kExitInvariant;
  }

  print_manifest(parsed.manifest, info);
  return exit_code;
}

int cmd_verify_mz(int trials, uint64_t seed, int nx, double ceiling) {
  const rnp::Grid grid(nx, nx);
  const rnp::MzReport rep = rnp::verify_mz(grid, trials, seed, ceiling);
  std::cout << "trials = " << rep.trials << "\n"
            << "skipped = " << rep.skipped << "\n"
            << "violations = " << rep.violations << "\n"
            << "min_admissible_C = " << rnp::format_double(rep.min_admissible_C) << "\n"
            << "worst_trial_m = " << rnp::format_double(rep.worst_m) << "\n"
            << "worst_trial_M = " << rnp::format_double(rep.worst_M) << "\n";

  // analytic constant-field subcase: both components equal to m0
  double sweep_worst = 0.0;
  for (int k = 0; k <= 50; ++k) {
    const double m0 = std::pow(10.0, -6.0 + k * (std::log10(1.0 / 16.0) + 6.0) / 50.0);
    rnp::Field f1(grid, m0), f2(grid, m0);
    sweep_worst = std::max(sweep_worst, rnp::mz_required_constant(f1, f2));
  }
  std::cout << "constant_field_sweep_C = " << rnp::format_double(sweep_worst) << "\n";
  const bool ok = rep.violations == 0 && sweep_worst <= 1.0;
  std::cout << "result = " << (ok ? "pass" : "FAIL") << "\n";
  return ok ? kExitOk : kExitInvariant;
}

int cmd_check_config(const std::string& config_path) {
  try {
    const rnp::ParsedConfig parsed = rnp::parse_config_file(config_path);
    std::cout << parsed.manifest.to_string();
    std::cout << "# artifact = " << rnp::kVersionString << "\n";
    return kExitOk;
  } catch (const rnp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled Cahn-Hilliard / reaction-diffusion condensate simulator"};
  app.require_subcommand(1);

  std::string config_path, csv_path, pgm_prefix;
  double pgm_lo = 0.0, pgm_hi = 1.0;

  auto* run_cmd = app.add_subcommand("run", "Integrate the coupled system and check invariants");
  run_cmd->add_option("config", config_path, "Config file ([rnp] section)")->required();
  run_cmd->add_option("--csv", csv_path, "Write the diagnostics CSV here");
  run_cmd->add_option("--pgm-prefix", pgm_prefix, "Write PGM snapshots with this path prefix");
  run_cmd->add_option("--pgm-lo", pgm_lo, "Lower bound of the PGM gray map");
  run_cmd->add_option("--pgm-hi", pgm_hi, "Upper bound of the PGM gray map");

  auto* cho_cmd = app.add_subcommand("cho", "Integrate the scalar relaxation model");
  cho_cmd->add_option("config", config_path, "Config file ([cho] section)")->required();
  cho_cmd->add_option("--csv", csv_path, "Write the trajectory CSV here");

  int trials = 10000;
  uint64_t seed = 1;
  int nx = 64;
  double ceiling = 1e3;
  auto* mz_cmd = app.add_subcommand("verify-mz", "Entropy-gradient inequality harness");
  mz_cmd->add_option("--trials", trials, "Number of random fields");
  mz_cmd->add_option("--seed", seed, "RNG seed");
  mz_cmd->add_option("--nx", nx, "Grid resolution");
  mz_cmd->add_option("--ceiling", ceiling, "Largest admissible constant");

  auto* check_cmd = app.add_subcommand("check-config", "Validate a config and print the manifest");
  check_cmd->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, csv_path, pgm_prefix, pgm_lo, pgm_hi);
    if (cho_cmd->parsed()) return cmd_cho(config_path, csv_path);
    if (mz_cmd->parsed()) return cmd_verify_mz(trials, seed, nx, ceiling);
    if (check_cmd->parsed()) return cmd_check_config(config_path);
  } catch (const rnp::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
