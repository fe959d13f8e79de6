#include "rnp/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rnp/csv.hpp"

namespace rnp {

const char* const kVersionString = "rnpsim 0.1.0";

void RunManifest::add(const std::string& key, double value) {
  entries.emplace_back(key, format_double(value));
}

void RunManifest::add(const std::string& key, long long value) {
  entries.emplace_back(key, std::to_string(value));
}

std::string RunManifest::to_string() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries) {
    if (!k.empty() && k.front() == '[')
      os << k << "\n";
    else
      os << k << " = " << v << "\n";
  }
  return os.str();
}

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
};

struct RawConfig {
  std::string section;
  int section_line = 0;
  std::map<std::string, RawEntry> entries;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (!raw.section.empty()) throw ConfigError(lineno, "duplicate section header");
      if (line.back() != ']') throw ConfigError(lineno, "malformed section header");
      raw.section = line.substr(1, line.size() - 2);
      raw.section_line = lineno;
      continue;
    }
    if (raw.section.empty())
      throw ConfigError(lineno, "expected a section header [rnp] or [cho] first");
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "empty key");
    if (value.empty()) throw ConfigError(lineno, "empty value for key '" + key + "'");
    const auto it = raw.entries.find(key);
    if (it != raw.entries.end())
      throw ConfigError(lineno, "duplicate key '" + key + "' (first set on line " +
                                    std::to_string(it->second.line) + ")");
    raw.entries[key] = {value, lineno};
  }
  if (raw.section.empty()) throw ConfigError(0, "empty config: expected [rnp] or [cho]");
  return raw;
}

class KeyReader {
 public:
  explicit KeyReader(RawConfig raw) : raw_(std::move(raw)) {}

  double number(const std::string& key, double def) {
    const RawEntry* e = take(key);
    if (!e) return def;
    try {
      return parse_double(e->value);
    } catch (const std::invalid_argument&) {
      throw ConfigError(e->line, "cannot parse number for key '" + key + "'");
    }
  }

  long long integer(const std::string& key, long long def) {
    const RawEntry* e = take(key);
    if (!e) return def;
    long long v = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
      throw ConfigError(e->line, "cannot parse integer for key '" + key + "'");
    return v;
  }

  bool boolean(const std::string& key, bool def) {
    const RawEntry* e = take(key);
    if (!e) return def;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    throw ConfigError(e->line, "expected true/false for key '" + key + "'");
  }

  std::string text(const std::string& key, const std::string& def) {
    const RawEntry* e = take(key);
    return e ? e->value : def;
  }

  void reject_unknown() const {
    for (const auto& [key, entry] : raw_.entries)
      if (!consumed_.count(key)) throw ConfigError(entry.line, "unknown key '" + key + "'");
  }

 private:
  const RawEntry* take(const std::string& key) {
    consumed_.insert(key);
    const auto it = raw_.entries.find(key);
    return it == raw_.entries.end() ? nullptr : &it->second;
  }

  RawConfig raw_;
  std::set<std::string> consumed_;
};

Field load_forcing(const std::string& path, const Grid& g) {
  std::ifstream is(path);
  if (!is) throw ConfigError(0, "g_path: cannot open '" + path + "'");
  Field f(g);
  for (int k = 0; k < g.size(); ++k) {
    double v = 0.0;
    if (!(is >> v)) throw ConfigError(0, "g_path: expected " + std::to_string(g.size()) + " values");
    f.data()[k] = v;
  }
  if (!all_finite(f)) throw ConfigError(0, "g_path: forcing must be finite");
  return f;
}

ParsedConfig parse_rnp(KeyReader& keys) {
  ParsedConfig out;
  out.model = ParsedConfig::Model::rnp;
  SolverConfig c;
  const int nx = static_cast<int>(keys.integer("nx", 64));
  const int ny = static_cast<int>(keys.integer("ny", 64));
  const double lx = keys.number("lx", 1.0);
  const double ly = keys.number("ly", 1.0);
  try {
    c.grid = Grid(nx, ny, lx, ly);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  c.coeffs.c1 = keys.number("c1", 1.0);
  c.coeffs.c2 = keys.number("c2", 0.01);
  c.coeffs.c3 = keys.number("c3", 1.0);
  c.coeffs.c4 = keys.number("c4", 0.01);
  c.pot.chi12 = keys.number("chi12", 1.0);
  c.pot.chi1S = keys.number("chi1S", 1.0);
  c.pot.chi2S = keys.number("chi2S", 1.0);
  c.pot.lambda = keys.number("lambda", 1e-3);
  const std::string variant = keys.text("variant", "flory_huggins");
  if (variant == "flory_huggins")
    c.pot.variant = PotentialVariant::flory_huggins;
  else if (variant == "tilde")
    c.pot.variant = PotentialVariant::tilde;
  else
    throw ConfigError(0, "variant must be flory_huggins or tilde, got '" + variant + "'");
  c.pot.eps = keys.number("eps", 1.0);
  c.pot.bigA = keys.number("A", 1.0);
  c.tau = keys.number("tau", 0.0);
  c.T_final = keys.number("T_final", 0.05);
  c.newton_tol = keys.number("newton_tol", 1e-7);
  c.newton_max_iter = static_cast<int>(keys.integer("newton_max_iter", 30));
  c.output_every = static_cast<int>(keys.integer("output_every", 16));
  c.alpha_weight = keys.number("alpha_weight", 0.5);
  c.P0_const = keys.number("P0_const", 0.5);
  c.P0_perturb_amp = keys.number("P0_perturb_amp", 0.0);
  c.seed = static_cast<uint64_t>(keys.integer("seed", 1));
  c.zero_sources = keys.boolean("zero_sources", false);
  keys.reject_unknown();

  try {
    c = c.resolved();
    if (!c.zero_sources) {
      const CoeffReport cr = validate_coeffs(c.coeffs);
      if (!cr.ok) throw std::invalid_argument(cr.message);
      const Field p0 = make_p0_field(c);
      const InitialReport ir = validate_initial(p0, c.coeffs);
      if (!ir.ok) throw std::invalid_argument(ir.message);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  out.solver = c;

  RunManifest& m = out.manifest;
  m.add("[rnp]", "");
  m.add("nx", static_cast<long long>(c.grid.nx));
  m.add("ny", static_cast<long long>(c.grid.ny));
  m.add("lx", c.grid.lx);
  m.add("ly", c.grid.ly);
  m.add("c1", c.coeffs.c1);
  m.add("c2", c.coeffs.c2);
  m.add("c3", c.coeffs.c3);
  m.add("c4", c.coeffs.c4);
  m.add("chi12", c.pot.chi12);
  m.add("chi1S", c.pot.chi1S);
  m.add("chi2S", c.pot.chi2S);
  m.add("lambda", c.pot.lambda);
  m.add("variant", std::string(c.pot.variant == PotentialVariant::flory_huggins ? "flory_huggins"
                                                                                : "tilde"));
  m.add("eps", c.pot.eps);
  m.add("A", c.pot.bigA);
  m.add("tau", c.tau);
  m.add("T_final", c.T_final);
  m.add("newton_tol", c.newton_tol);
  m.add("newton_max_iter", static_cast<long long>(c.newton_max_iter));
  m.add("output_every", static_cast<long long>(c.output_every));
  m.add("alpha_weight", c.alpha_weight);
  m.add("P0_const", c.P0_const);
  m.add("P0_perturb_amp", c.P0_perturb_amp);
  m.add("seed", static_cast<long long>(c.seed));
  m.add("zero_sources", c.zero_sources);
  return out;
}

ParsedConfig parse_cho(KeyReader& keys) {
  ParsedConfig out;
  out.model = ParsedConfig::Model::cho;
  ChoConfig c;
  const int nx = static_cast<int>(keys.integer("nx", 32));
  const int ny = static_cast<int>(keys.integer("ny", 32));
  const double lx = keys.number("lx", 1.0);
  const double ly = keys.number("ly", 1.0);
  try {
    c.grid = Grid(nx, ny, lx, ly);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  c.m_rate = keys.number("m_rate", 1.0);
  c.c_oono = keys.number("c_oono", 0.3);
  c.lambda = keys.number("lambda", 1e-3);
  c.theta = keys.number("theta", 1.0);
  c.tau = keys.number("tau", 1e-3);
  c.T_final = keys.number("T_final", 1.0);
  c.phi0_const = keys.number("phi0_const", -1.0);
  c.newton_tol = keys.number("newton_tol", 1e-7);
  c.newton_max_iter = static_cast<int>(keys.integer("newton_max_iter", 30));
  c.output_every = static_cast<int>(keys.integer("output_every", 16));
  const std::string g_path = keys.text("g_path", "");
  keys.reject_unknown();

  if (!g_path.empty()) c.forcing = load_forcing(g_path, c.grid);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  out.cho = c;

  RunManifest& m = out.manifest;
  m.add("[cho]", "");
  m.add("nx", static_cast<long long>(c.grid.nx));
  m.add("ny", static_cast<long long>(c.grid.ny));
  m.add("lx", c.grid.lx);
  m.add("ly", c.grid.ly);
  m.add("m_rate", c.m_rate);
  m.add("c_oono", c.c_oono);
  m.add("lambda", c.lambda);
  m.add("theta", c.theta);
  m.add("tau", c.tau);
  m.add("T_final", c.T_final);
  m.add("phi0_const", c.phi0_const);
  m.add("newton_tol", c.newton_tol);
  m.add("newton_max_iter", static_cast<long long>(c.newton_max_iter));
  m.add("output_every", static_cast<long long>(c.output_every));
  if (!g_path.empty()) m.add("g_path", g_path);
  return out;
}

}  // namespace

ParsedConfig parse_config(const std::string& text) {
  RawConfig raw = tokenize(text);
  const std::string section = raw.section;
  const int section_line = raw.section_line;
  KeyReader keys(std::move(raw));
  if (section == "rnp") return parse_rnp(keys);
  if (section == "cho") return parse_cho(keys);
  throw ConfigError(section_line, "unknown section [" + section + "], expected [rnp] or [cho]");
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return parse_config(os.str());
}

}  // namespace rnp
