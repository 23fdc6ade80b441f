#pragma once

#include <cmath>
#include <string>

#include "vstatns/common.hpp"

namespace vstatns {

/// Univariate smoothing kernels: symmetric densities supported on [-1,1].
struct SmoothKernel {
  enum class Kind { Epanechnikov, Biweight, Triweight, Uniform };

  Kind kind = Kind::Epanechnikov;

  double operator()(double x) const {
    const double ax = std::abs(x);
    if (ax > 1.0) return 0.0;
    const double u = 1.0 - x * x;
    switch (kind) {
      case Kind::Epanechnikov:
        return 0.75 * u;
      case Kind::Biweight:
        return (15.0 / 16.0) * u * u;
      case Kind::Triweight:
        return (35.0 / 32.0) * u * u * u;
      case Kind::Uniform:
        return 0.5;
    }
    return 0.0;
  }

  const char* name() const {
    switch (kind) {
      case Kind::Epanechnikov:
        return "epanechnikov";
      case Kind::Biweight:
        return "biweight";
      case Kind::Triweight:
        return "triweight";
      case Kind::Uniform:
        return "uniform";
    }
    return "?";
  }

  static SmoothKernel from_name(const std::string& name) {
    if (name == "epanechnikov") return {Kind::Epanechnikov};
    if (name == "biweight" || name == "quartic") return {Kind::Biweight};
    if (name == "triweight") return {Kind::Triweight};
    if (name == "uniform") return {Kind::Uniform};
    throw ConfigError("unknown smoothing kernel: " + name);
  }
};

}  // namespace vstatns
