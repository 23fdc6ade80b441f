#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace vstatns {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad parameters, malformed configs, shape mismatches.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numeric failure: nonfinite values, degenerate systems, non-convergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Requested operation has no implementation for this model/kernel pair.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

/// Neumaier compensated accumulator. Summation order is part of the
/// reproducibility contract, so every reduction that feeds a reported
/// number goes through one of these in a fixed iteration order.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

inline double kahan_total(std::span<const double> xs) {
  KahanSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

}  // namespace vstatns
