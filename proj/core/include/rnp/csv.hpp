#pragma once

#include <string>
#include <vector>

#include "rnp/cho.hpp"
#include "rnp/diagnostics.hpp"

namespace rnp {

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);

/// Exact inverse of format_double; throws std::invalid_argument on junk.
double parse_double(const std::string& s);

/// The fixed 22-column header of the diagnostics CSV.
extern const char* const kCsvHeader;

/// Writes records under the fixed header, floats in shortest round-trip
/// form, LF line endings. I/O failures surface the path.
void write_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path);

/// Strict reader for the same schema; floats round-trip bit-exactly.
std::vector<DiagnosticsRecord> read_csv(const std::string& path);

/// Scalar-model trajectory rows (t, phi_mean, phi_min, phi_max, energy,
/// grad_mu_l2, gap), written with the same float formatting.
void write_cho_csv(const std::vector<ChoRecord>& records, const std::string& path);

}  // namespace rnp
