#include "rnp/csv.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rnp {

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::invalid_argument("parse_double: cannot parse '" + s + "'");
  return v;
}

const char* const kCsvHeader =
    "t,mass_total,mass_phiR1,mass_phiR2,mass_phiP,mass_RminusP,Pmin,Pmax,R1min,R1max,R2min,"
    "R2max,phi1mean,phi2mean,sep,energy,grad_mu_l2,mu1_mean,mu2_mean,yosida_gap,w_half_gradmu,"
    "w_alpha_mu";

namespace {

std::vector<double> record_values(const DiagnosticsRecord& r) {
  return {r.t,        r.mass_total, r.mass_phiR1, r.mass_phiR2, r.mass_phiP, r.mass_RminusP,
          r.Pmin,     r.Pmax,       r.R1min,      r.R1max,      r.R2min,     r.R2max,
          r.phi1mean, r.phi2mean,   r.sep,        r.energy,     r.grad_mu_l2, r.mu1_mean,
          r.mu2_mean, r.yosida_gap, r.w_half_gradmu, r.w_alpha_mu};
}

void fill_record(DiagnosticsRecord& r, const std::vector<double>& v) {
  r.t = v[0];
  r.mass_total = v[1];
  r.mass_phiR1 = v[2];
  r.mass_phiR2 = v[3];
  r.mass_phiP = v[4];
  r.mass_RminusP = v[5];
  r.Pmin = v[6];
  r.Pmax = v[7];
  r.R1min = v[8];
  r.R1max = v[9];
  r.R2min = v[10];
  r.R2max = v[11];
  r.phi1mean = v[12];
  r.phi2mean = v[13];
  r.sep = v[14];
  r.energy = v[15];
  r.grad_mu_l2 = v[16];
  r.mu1_mean = v[17];
  r.mu2_mean = v[18];
  r.yosida_gap = v[19];
  r.w_half_gradmu = v[20];
  r.w_alpha_mu = v[21];
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

void write_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_csv: cannot open '" + path + "': " + std::strerror(errno));
  os << kCsvHeader << "\n";
  for (const auto& r : records) {
    const auto vals = record_values(r);
    for (size_t k = 0; k < vals.size(); ++k) {
      if (k) os << ',';
      os << format_double(vals[k]);
    }
    os << "\n";
  }
  if (!os) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

std::vector<DiagnosticsRecord> read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_csv: cannot open '" + path + "': " + std::strerror(errno));
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_csv: empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("read_csv: unexpected header in '" + path + "'");
  std::vector<DiagnosticsRecord> out;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 22)
      throw std::runtime_error("read_csv: expected 22 columns, got " + std::to_string(cells.size()));
    std::vector<double> vals(cells.size());
    for (size_t k = 0; k < cells.size(); ++k) vals[k] = parse_double(cells[k]);
    DiagnosticsRecord r;
    fill_record(r, vals);
    out.push_back(r);
  }
  return out;
}

void write_cho_csv(const std::vector<ChoRecord>& records, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("write_cho_csv: cannot open '" + path + "': " + std::strerror(errno));
  os << "t,phi_mean,phi_min,phi_max,energy,grad_mu_l2,gap\n";
  for (const auto& r : records) {
    os << format_double(r.t) << ',' << format_double(r.phi_mean) << ',' << format_double(r.phi_min)
       << ',' << format_double(r.phi_max) << ',' << format_double(r.energy) << ','
       << format_double(r.grad_mu_l2) << ',' << format_double(r.gap) << "\n";
  }
  if (!os) throw std::runtime_error("write_cho_csv: write failed for '" + path + "'");
}

}  // namespace rnp
