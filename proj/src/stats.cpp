#include "vstatns/stats.hpp"

#include <algorithm>
#include <cmath>

#include "vstatns/common.hpp"

namespace vstatns {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_cdf(double x, double mean, double sd) { return normal_cdf((x - mean) / sd); }

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal_quantile needs p in (0,1)");
  // Bisection on the CDF; 200 halvings of [-40,40] reach full precision.
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double exp1_cdf(double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); }

double chisq1_cdf(double x) { return x <= 0.0 ? 0.0 : std::erf(std::sqrt(0.5 * x)); }

namespace {

double quantile_sorted(const std::vector<double>& s, double p) {
  if (s.empty()) return 0.0;
  const double idx = p * static_cast<double>(s.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = idx - static_cast<double>(lo);
  return s[lo] * (1.0 - frac) + s[hi] * frac;
}

}  // namespace

SampleSummary SampleSummary::from(std::span<const double> xs) {
  SampleSummary out;
  out.n = xs.size();
  if (xs.empty()) return out;
  KahanSum acc;
  for (double x : xs) acc.add(x);
  out.mean = acc.value() / static_cast<double>(xs.size());
  KahanSum sq;
  for (double x : xs) sq.add((x - out.mean) * (x - out.mean));
  out.sd = xs.size() > 1 ? std::sqrt(sq.value() / static_cast<double>(xs.size() - 1)) : 0.0;
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  out.min = s.front();
  out.max = s.back();
  out.q01 = quantile_sorted(s, 0.01);
  out.q05 = quantile_sorted(s, 0.05);
  out.q25 = quantile_sorted(s, 0.25);
  out.median = quantile_sorted(s, 0.50);
  out.q75 = quantile_sorted(s, 0.75);
  out.q95 = quantile_sorted(s, 0.95);
  out.q99 = quantile_sorted(s, 0.99);
  return out;
}

KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  require(!sample.empty(), "KS: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return {d, 1.36 / std::sqrt(n), s.size()};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "KS: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double n_eff = na * nb / (na + nb);
  return {d, 1.36 / std::sqrt(n_eff), static_cast<std::size_t>(n_eff)};
}

KsResult ks_point_mass(std::span<const double> sample, double c) {
  require(!sample.empty(), "KS: empty sample");
  const double n = static_cast<double>(sample.size());
  double below = 0, at_or_below = 0;
  for (double x : sample) {
    if (x < c) ++below;
    if (x <= c) ++at_or_below;
  }
  // Reference CDF jumps from 0 to 1 at c.
  const double d = std::max(below / n, 1.0 - at_or_below / n);
  return {d, 1.36 / std::sqrt(n), sample.size()};
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "ols_slope: need matched samples, n >= 2");
  const double n = static_cast<double>(x.size());
  KahanSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n, my = sy.value() / n;
  KahanSum sxx, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  require(sxx.value() > 0.0, "ols_slope: degenerate x");
  return sxy.value() / sxx.value();
}

}  // namespace vstatns
