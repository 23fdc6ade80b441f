#include "vstatns/quadrature.hpp"

#include <cmath>

#include "vstatns/common.hpp"

namespace vstatns {

GaussLegendre::GaussLegendre(int order) {
  require(order >= 1 && order <= 512, "Gauss-Legendre order must be in [1,512]");
  const int n = order;
  nodes.resize(n);
  weights.resize(n);
  // Newton iteration on P_n with the standard Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double gl_integrate(const std::function<double(double)>& fn, double a, double b, int order) {
  const GaussLegendre gl(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  KahanSum acc;
  for (int i = 0; i < order; ++i) {
    acc.add(gl.weights[i] * fn(mid + half * gl.nodes[i]));
  }
  return half * acc.value();
}

}  // namespace vstatns
