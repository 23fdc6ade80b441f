#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "vstatns/kernel_h.hpp"
#include "vstatns/kernels1d.hpp"
#include "vstatns/pls.hpp"

namespace vstatns {

struct ThetaEstimate {
  double theta_hat = 0;
  double slope_t = 0, slope_s = 0;  // eta_1, eta_2
  double t_star = 0;
  double bandwidth = 0;
  std::optional<double> bias_hat;
  std::optional<double> sd_hat;
  std::optional<std::pair<double, double>> ci;
  double ci_level = 0;
};

/// Local linear estimate of theta(t*): weighted least squares of the
/// responses H(X_j, X_k) on (1, t_j - t*, t_k - t*) with weights
/// K((t_j-t*)/b) K((t_k-t*)/b) / (n b), solved through the 3x3 normal
/// equations with a tiny ridge fallback near singularity. Interior t*
/// only; boundary points are rejected.
ThetaEstimate local_linear_theta(const SeriesPath& series, const KernelH& kernel,
                                 SmoothKernel K, double b_n, double t_star);

/// B_n(t*) = b_n^2 d^2theta(t*,t*)/dt^2 int x^2 K(x) dx. The second
/// derivative is taken by central differences (step 1e-3) of the analytic
/// theta surface; the kernel moment by Gauss-Legendre quadrature.
double asymptotic_bias(const PlsModel& model, const std::string& kernel_name, double t_star,
                       double b_n, SmoothKernel K, double fd_step = 1e-3);

/// theta(t, s) = E H(X(t), X(s)) over independent frozen marginals;
/// analytic for the built-in kernels on tvMA/tvAR(1) models.
double theta_surface(const PlsModel& model, const std::string& kernel_name, double t, double s);

struct SdOptions {
  bool monte_carlo = false;
  std::size_t reps = 10000;
  std::size_t block_len = 512;
  std::uint64_t seed = 1;
};

/// Asymptotic standard deviation sqrt(sigma^2(t*) int K^2 / (n b_n)).
/// The analytic route (variance/mean_square kernels on Gaussian models)
/// uses sigma^2(t) = 2 sum_j gamma(t,j)^2; otherwise an MC plug-in
/// estimates the long-run variance of {2 H_{t*}(X_j)} from frozen paths.
double asymptotic_sd(const PlsModel& model, const std::string& kernel_name, double t_star,
                     double b_n, SmoothKernel K, std::size_t n, SdOptions opts = {});

/// Normal interval theta_hat - bias_hat +- z_{1-alpha/2} sd_hat. Requires
/// bias and sd on the estimate; returns a copy with ci filled in.
ThetaEstimate confidence_interval(ThetaEstimate est, double level);

}  // namespace vstatns
