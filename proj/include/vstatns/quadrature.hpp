#pragma once

#include <functional>
#include <vector>

namespace vstatns {

/// Gauss-Legendre nodes and weights on [-1,1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int order);
};

/// Integrates fn over [a,b] with a single Gauss-Legendre panel.
double gl_integrate(const std::function<double(double)>& fn, double a, double b, int order = 32);

}  // namespace vstatns
