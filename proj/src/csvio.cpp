#include "vstatns/csvio.hpp"

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vstatns/common.hpp"

namespace vstatns {

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string series_to_csv(const SeriesPath& series) {
  std::string out = "k,t,x\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += format_full(series.t(i));
    out += ',';
    out += format_full(series.values[i]);
    out += '\n';
  }
  return out;
}

SeriesPath series_from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open series CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty series CSV: " + path);

  // Header: find the x column (default: last).
  std::size_t x_col = 0, ncols = 0;
  {
    std::stringstream ss(line);
    std::string field;
    bool found = false;
    while (std::getline(ss, field, ',')) {
      if (field == "x" || field == "value") {
        x_col = ncols;
        found = true;
      }
      ++ncols;
    }
    require(ncols >= 1, "series CSV has no columns: " + path);
    if (!found) x_col = ncols - 1;
  }

  SeriesPath series;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::size_t col = 0;
    bool got = false;
    while (std::getline(ss, field, ',')) {
      if (col == x_col) {
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(field.c_str(), &end);
        if (end == field.c_str() || errno == ERANGE) {
          throw ConfigError("series CSV line " + std::to_string(lineno) + ": bad value '" +
                            field + "'");
        }
        series.values.push_back(v);
        got = true;
      }
      ++col;
    }
    if (!got) {
      throw ConfigError("series CSV line " + std::to_string(lineno) + ": missing x column");
    }
  }
  require(series.size() >= 2, "series CSV must hold at least 2 observations");
  return series;
}

std::string sample_to_csv(const std::vector<double>& sample, const std::string& column) {
  std::string out = "rep," + column + "\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_full(sample[i]);
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ConfigError("rename failed: " + tmp + " -> " + path + " (" + std::strerror(errno) + ")");
  }
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace vstatns
