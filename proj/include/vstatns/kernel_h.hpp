#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vstatns/pls.hpp"

namespace vstatns {

/// Symmetric bivariate kernel H with optional oracles:
///   marginal(j, x)  = H_j(x) = E[H(x, X_j)] under the frozen marginal at t_j,
///   pair_mean(k, j) = c_kj = E[H(X_k*, X_j*)] over independent copies.
/// Index arguments are 0-based storage indices (time t = (j+1)/n).
struct KernelH {
  std::string name;
  std::function<double(double, double)> eval;
  std::function<double(std::size_t, double)> marginal;
  std::function<double(std::size_t, std::size_t)> pair_mean;
  std::function<double(double)> tail_weight;  // L(x) for the Wiener-class diagnostic
  bool degenerate = false;                    // claim that H_j == 0

  bool has_oracles() const { return static_cast<bool>(marginal) && static_cast<bool>(pair_mean); }
};

// Plain kernels (evaluation only, no oracles).
KernelH variance_kernel();                                            // (x-y)^2 / 2
KernelH product_kernel();                                             // x y
KernelH mean_kernel(std::function<double(double)> M, std::string m_name);  // (M(x)+M(y))/2

enum class MeanFunc { Square, Identity, Abs };

// Model-bound kernels carrying analytic marginal/pair-mean oracles built
// from the frozen-time second-order structure (zero-mean linear filters).
// The Abs mean function additionally needs Gaussian innovations.
KernelH variance_kernel(const PlsModel& model, std::size_t n);
KernelH product_kernel(const PlsModel& model, std::size_t n);
KernelH mean_kernel(const PlsModel& model, std::size_t n, MeanFunc M);

KernelH kernel_from_name(const std::string& name);
KernelH kernel_from_name(const std::string& name, const PlsModel& model, std::size_t n);

struct DegeneracyReport {
  double max_abs = 0;       // max over the probe grid of |E^[H(x, X_j)]|
  double se_at_max = 0;     // MC standard error at the maximizing point
  double max_z = 0;         // max |estimate| / SE over the grid
  bool degenerate = false;  // every point within 3 MC standard errors of 0
  double t_at_max = 0, x_at_max = 0;
  std::size_t reps = 0, grid_points = 0;
};

/// MC probe of E[H(x, X_j)] over an x-grid and a sample of times. The
/// grid spans +-4 marginal SDs; draws at each time are shared across x.
DegeneracyReport degeneracy_check(const KernelH& kernel, const PlsModel& model, std::size_t reps,
                                  std::size_t grid_points, std::uint64_t seed);

struct WienerClassReport {
  double integral_abs = 0;       // Riemann sum of |g-hat|
  double integral_weighted = 0;  // Riemann sum of |(t,s)|^delta |g-hat|
  double delta = 0;
  double tail_fraction = 0;      // |g-hat| mass with sup-norm frequency in the outer 10%
  double extent = 0;             // grid covers [-extent, extent]^2
  std::size_t points = 0;        // per axis
  double omega_max = 0;          // largest resolved frequency magnitude per axis
};

/// Numerical Wiener-class diagnostic: 2-D DFT of H*(x,y) = H(x,y)/(L(x)L(y))
/// on a symmetric grid. Purely advisory; reports the transform's absolute
/// mass, the |.|^delta weighted mass and the high-frequency tail share.
WienerClassReport check_wiener_class(const KernelH& kernel, const std::function<double(double)>& L,
                                     double grid_extent = 32.0, std::size_t grid_points = 1024,
                                     double delta = 0.5);

}  // namespace vstatns
