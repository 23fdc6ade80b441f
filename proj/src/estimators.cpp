#include "vstatns/estimators.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "vstatns/common.hpp"
#include "vstatns/quadrature.hpp"
#include "vstatns/rng.hpp"
#include "vstatns/stats.hpp"

namespace vstatns {

ThetaEstimate local_linear_theta(const SeriesPath& series, const KernelH& kernel,
                                 SmoothKernel K, double b_n, double t_star) {
  const std::size_t n = series.size();
  require(n >= 2, "local_linear_theta needs n >= 2");
  require(b_n > 0.0 && b_n <= 0.5, "bandwidth must lie in (0, 1/2]");
  if (t_star < b_n || t_star > 1.0 - b_n) {
    throw ConfigError("t* lies in the boundary region [0,b_n) or (1-b_n,1]; "
                      "boundary correction is out of scope");
  }
  require(b_n * static_cast<double>(n) >= 8.0, "effective sample n*b_n must be >= 8");

  // Active indices and their kernel factors.
  std::vector<std::size_t> idx;
  std::vector<double> kv, dt;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = series.t(j) - t_star;
    const double k = K(d / b_n);
    if (k > 0.0) {
      idx.push_back(j);
      kv.push_back(k);
      dt.push_back(d);
    }
  }
  if (idx.size() < 3) throw NumericError("local linear fit: fewer than 3 active time points");

  const double nb = static_cast<double>(n) * b_n;
  // Moment sums of the kernel factor; the normal matrix is separable.
  KahanSum s0a, s1a, s2a;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    s0a.add(kv[i]);
    s1a.add(kv[i] * dt[i]);
    s2a.add(kv[i] * dt[i] * dt[i]);
  }
  const double s0 = s0a.value(), s1 = s1a.value(), s2 = s2a.value();

  Eigen::Matrix3d M;
  M << s0 * s0, s1 * s0, s0 * s1,
       s1 * s0, s2 * s0, s1 * s1,
       s0 * s1, s1 * s1, s0 * s2;
  M /= nb;

  KahanSum b0a, b1a, b2a;
  const std::vector<double>& x = series.values;
  for (std::size_t ii = 0; ii < idx.size(); ++ii) {
    for (std::size_t jj = 0; jj < idx.size(); ++jj) {
      const double wgt = kv[ii] * kv[jj] / nb;
      const double h = kernel.eval(x[idx[ii]], x[idx[jj]]);
      if (!std::isfinite(h)) throw NumericError("local linear fit: nonfinite kernel response");
      b0a.add(wgt * h);
      b1a.add(wgt * dt[ii] * h);
      b2a.add(wgt * dt[jj] * h);
    }
  }
  Eigen::Vector3d rhs(b0a.value(), b1a.value(), b2a.value());

  Eigen::Vector3d sol;
  {
    Eigen::LDLT<Eigen::Matrix3d> ldlt(M);
    sol = ldlt.solve(rhs);
    const double resid = (M * sol - rhs).norm();
    if (ldlt.info() != Eigen::Success || !sol.allFinite() ||
        resid > 1e-8 * (rhs.norm() + 1.0)) {
      // Ridge fallback for weight mass concentrated on one time point.
      Eigen::Matrix3d Mr = M + 1e-12 * M.trace() * Eigen::Matrix3d::Identity();
      sol = Mr.ldlt().solve(rhs);
      if (!sol.allFinite()) {
        throw NumericError("local linear fit: rank-deficient normal equations");
      }
    }
  }

  ThetaEstimate est;
  est.theta_hat = sol[0];
  est.slope_t = sol[1];
  est.slope_s = sol[2];
  est.t_star = t_star;
  est.bandwidth = b_n;
  return est;
}

double theta_surface(const PlsModel& model, const std::string& kernel_name, double t, double s) {
  require(model.analytic(), "theta surface needs a tvMA/tvAR(1) model");
  auto var_at = [&](double u) { return local_acov(model, u, 0); };
  if (kernel_name == "variance" || kernel_name == "mean_square") {
    return 0.5 * (var_at(t) + var_at(s));
  }
  if (kernel_name == "product" || kernel_name == "mean_identity") {
    return 0.0;  // zero-mean marginals
  }
  if (kernel_name == "mean_abs") {
    require(model.innovation().kind == Innovation::Kind::Normal,
            "mean_abs theta surface needs Gaussian innovations");
    return 0.5 * (std::sqrt(2.0 * var_at(t) / kPi) + std::sqrt(2.0 * var_at(s) / kPi));
  }
  throw UnsupportedError("no analytic theta surface for kernel: " + kernel_name);
}

double asymptotic_bias(const PlsModel& model, const std::string& kernel_name, double t_star,
                       double b_n, SmoothKernel K, double fd_step) {
  require(b_n > 0.0, "bandwidth must be positive");
  for (std::size_t i = 1; i + 1 < model.breaks().size(); ++i) {
    if (std::abs(t_star - model.breaks()[i]) <= 1e-2) {
      throw ConfigError("t* within 1e-2 of a break point; theta is not C^2 there");
    }
  }
  const double h = fd_step;
  require(t_star - h > 0.0 && t_star + h < 1.0, "t* too close to [0,1] boundary for differencing");
  // Second partial in the first argument at (t*, t*).
  const double d2 = (theta_surface(model, kernel_name, t_star + h, t_star) -
                     2.0 * theta_surface(model, kernel_name, t_star, t_star) +
                     theta_surface(model, kernel_name, t_star - h, t_star)) /
                    (h * h);
  const double kmom = gl_integrate([&](double x) { return x * x * K(x); }, -1.0, 1.0, 64);
  return b_n * b_n * d2 * kmom;
}

namespace {

/// Long-run variance of {2 H_{t*}(X_j)} for the frozen process at t.
double long_run_variance_analytic(const PlsModel& model, const std::string& kernel_name,
                                  double t) {
  if (kernel_name != "variance" && kernel_name != "mean_square") {
    throw UnsupportedError("analytic asymptotic sd is available for the variance and "
                           "mean_square kernels only; request the MC plug-in otherwise");
  }
  if (model.innovation().kind != Innovation::Kind::Normal) {
    throw UnsupportedError("analytic asymptotic sd needs Gaussian innovations; "
                           "request the MC plug-in for other innovations");
  }
  // 2 H_t(x) = x^2 + const, so sigma^2 = sum_j cov(X_0^2, X_j^2) = 2 sum gamma^2.
  const double g0 = local_acov(model, t, 0);
  KahanSum acc;
  acc.add(g0 * g0);
  const SegmentFilter& f = model.segment(model.segment_index(t));
  if (f.kind == SegmentFilter::Kind::TvMA) {
    const long q = static_cast<long>(f.ma_coeffs.size()) - 1;
    for (long k = 1; k <= q; ++k) {
      const double g = local_acov(model, t, k);
      acc.add(2.0 * g * g);
    }
  } else {
    const double rho = std::abs(f.ar_coeff(t));
    for (long k = 1;; ++k) {
      const double g = local_acov(model, t, k);
      acc.add(2.0 * g * g);
      if (2.0 * g0 * g0 * std::pow(rho, 2 * (k + 1)) / (1.0 - rho * rho) <= 1e-14 * g0 * g0) break;
      if (k > 2000000) throw NumericError("long-run variance series failed to converge");
    }
  }
  return 2.0 * acc.value();
}

}  // namespace

double asymptotic_sd(const PlsModel& model, const std::string& kernel_name, double t_star,
                     double b_n, SmoothKernel K, std::size_t n, SdOptions opts) {
  require(b_n > 0.0 && n >= 2, "asymptotic sd needs b_n > 0, n >= 2");
  double sigma2 = 0.0;
  if (!opts.monte_carlo) {
    sigma2 = long_run_variance_analytic(model, kernel_name, t_star);
  } else {
    if (kernel_name != "variance" && kernel_name != "mean_square") {
      throw UnsupportedError("MC plug-in sd supports the variance and mean_square kernels");
    }
    // 2 H_{t*}(x) = x^2 + const; estimate the long-run variance of X^2.
    std::vector<double> sums(opts.reps);
    for (std::size_t r = 0; r < opts.reps; ++r) {
      SeriesPath p = simulate_frozen(model, t_star, opts.block_len,
                                     rng::derive(opts.seed, {rng::kMcPlugin, r}));
      KahanSum acc;
      for (double x : p.values) acc.add(x * x);
      sums[r] = acc.value();
    }
    SampleSummary s = SampleSummary::from(sums);
    sigma2 = s.sd * s.sd / static_cast<double>(opts.block_len);
  }
  const double k2 = gl_integrate([&](double x) { return K(x) * K(x); }, -1.0, 1.0, 64);
  return std::sqrt(sigma2 * k2 / (static_cast<double>(n) * b_n));
}

ThetaEstimate confidence_interval(ThetaEstimate est, double level) {
  require(level > 0.0 && level < 1.0, "confidence level must lie in (0,1)");
  require(est.bias_hat.has_value() && est.sd_hat.has_value(),
          "confidence_interval needs bias_hat and sd_hat on the estimate");
  const double z = normal_quantile(0.5 + 0.5 * level);
  const double center = est.theta_hat - *est.bias_hat;
  est.ci = std::make_pair(center - z * *est.sd_hat, center + z * *est.sd_hat);
  est.ci_level = level;
  return est;
}

}  // namespace vstatns
