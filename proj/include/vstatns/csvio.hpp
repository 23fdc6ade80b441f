#pragma once

#include <string>
#include <vector>

#include "vstatns/pls.hpp"

namespace vstatns {

/// Formats with 17 significant digits so CSV round-trips reproduce the
/// in-memory doubles exactly.
std::string format_full(double x);

/// Writes a series as CSV with header "k,t,x".
std::string series_to_csv(const SeriesPath& series);
SeriesPath series_from_csv_file(const std::string& path);

std::string sample_to_csv(const std::vector<double>& sample, const std::string& column);

/// Atomic file write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// FNV-1a 64-bit digest, hex encoded (manifest integrity field).
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace vstatns
