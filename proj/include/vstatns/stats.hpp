#pragma once

#include <functional>
#include <span>
#include <vector>

namespace vstatns {

double normal_cdf(double x);
double normal_cdf(double x, double mean, double sd);
/// Inverse standard normal CDF; p in (0,1).
double normal_quantile(double p);
double exp1_cdf(double x);
double chisq1_cdf(double x);

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0, sd = 0;
  double min = 0, q01 = 0, q05 = 0, q25 = 0, median = 0, q75 = 0, q95 = 0, q99 = 0, max = 0;

  static SampleSummary from(std::span<const double> xs);
};

struct KsResult {
  double statistic = 0;
  double ref_bar = 0;       // 1.36 / sqrt(effective n)
  std::size_t n_eff = 0;
};

/// One-sample Kolmogorov-Smirnov against an analytic CDF.
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);
/// Two-sample Kolmogorov-Smirnov; effective n is nm/(n+m).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
/// KS distance between the empirical CDF and a point mass at c.
KsResult ks_point_mass(std::span<const double> sample, double c);

/// Ordinary least squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace vstatns
