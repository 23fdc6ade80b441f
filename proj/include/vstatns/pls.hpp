#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vstatns/curves.hpp"

namespace vstatns {

/// Innovation distribution of the driving i.i.d. sequence. Centered and,
/// for the built-in kinds, unit variance. Custom samplers map a raw
/// 64-bit counter draw pair to a value and must declare their variance
/// for the analytic operations to be usable.
struct Innovation {
  enum class Kind { Normal, Uniform, Custom };

  Kind kind = Kind::Normal;
  std::function<double(std::uint64_t key, std::uint64_t ctr)> custom;
  double custom_variance = 1.0;

  double draw(std::uint64_t key, std::uint64_t ctr) const;
  double variance() const;
  const char* name() const;
};

/// One per-segment filter. Coefficient curves are functions of rescaled
/// time t. A custom filter receives (t, eps) where eps holds the last
/// truncation_lag innovations oldest-first, i.e. eps.back() is the
/// current one.
struct SegmentFilter {
  enum class Kind { TvMA, TvAR1, Custom };

  Kind kind = Kind::TvMA;
  std::vector<Curve> ma_coeffs;  // c_0 .. c_q
  Curve ar_coeff;                // a(t), sup |a| < 1
  std::function<double(double, std::span<const double>)> custom;

  static SegmentFilter tv_ma(std::vector<Curve> coeffs);
  static SegmentFilter tv_ar1(Curve a);
  static SegmentFilter custom_filter(std::function<double(double, std::span<const double>)> fn);
};

/// Simulated path X_1..X_n on the grid t_k = k/n.
struct SeriesPath {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  /// Rescaled time of storage index i (0-based), i.e. t_{i+1}.
  double t(std::size_t i) const { return static_cast<double>(i + 1) / static_cast<double>(values.size()); }
};

/// Piecewise locally stationary data-generating mechanism: break points
/// 0 = b_0 < b_1 < ... < b_{r+1} = 1 and one filter per interval
/// (b_j, b_{j+1}]. Immutable after construction.
class PlsModel {
 public:
  /// interior_breaks may be empty (r = 0). truncation_lag 0 means auto:
  /// ceil(log(1e-14)/log(rho_max)) for AR segments, q+1 for pure MA,
  /// 128 when a custom filter is present.
  PlsModel(std::vector<double> interior_breaks, std::vector<SegmentFilter> segments,
           Innovation innovation = {}, int truncation_lag = 0);

  const std::vector<double>& breaks() const { return breaks_; }  // includes 0 and 1
  std::size_t segment_count() const { return segments_.size(); }
  const SegmentFilter& segment(std::size_t j) const { return segments_[j]; }
  const Innovation& innovation() const { return innovation_; }
  int truncation_lag() const { return lag_; }
  double ar_rho_max() const { return rho_max_; }
  /// True when every segment is tvMA or tvAR(1); analytic second-order
  /// quantities are available exactly in that case.
  bool analytic() const { return analytic_; }

  /// Segment lookup zeta(t): index j with b_j < t <= b_{j+1}, zeta(0) = 0.
  std::size_t segment_index(double t) const;
  bool is_interior_break(double t) const;

  /// Frozen-time filter value G_{zeta(t)}(t, history). hist is oldest-first
  /// with hist.back() the current innovation; hist.size() == truncation_lag.
  double frozen_eval(double t, std::span<const double> hist) const;

 private:
  std::vector<double> breaks_;
  std::vector<SegmentFilter> segments_;
  Innovation innovation_;
  int lag_ = 0;
  double rho_max_ = 0.0;
  bool analytic_ = true;
};

/// Simulates X_k = G_{zeta(t_k)}(t_k, F_k). Pure in (model, n, seed):
/// identical triples give bit-identical paths. tvAR(1) segments use the
/// exact recursion; a stationary warm start of truncation_lag steps with
/// the coefficient frozen at t = 1/n precedes k = 1 when the first
/// segment is autoregressive.
SeriesPath simulate(const PlsModel& model, std::size_t n, std::uint64_t seed);

/// Monte Carlo estimate of delta(j, p): sup over a time grid of the
/// L^p distance between the frozen filter output and its coupled version
/// with the innovation j steps back replaced by an independent copy.
/// The sup is over grid_per_segment midpoints per segment (a grid
/// approximation of the continuum sup). Base histories are shared
/// across lags so profiles use common random numbers.
std::vector<double> dependence_profile(const PlsModel& model, std::span<const int> lags, double p,
                                       std::size_t reps, std::uint64_t seed,
                                       int grid_per_segment = 64, int threads = 0);
double dependence_measure(const PlsModel& model, int lag, double p, std::size_t reps,
                          std::uint64_t seed, int grid_per_segment = 64);

/// Frozen-time autocovariance gamma(t, k) of the stationary approximation
/// at time t. Analytic models only.
double local_acov(const PlsModel& model, double t, long k);

/// Local spectral density f(t, lambda) = (1/2pi) sum_k gamma(t,k) cos(k lambda).
/// tvAR(1) series are truncated at relative tail tolerance 1e-12.
double local_spectral_density(const PlsModel& model, double t, double lambda);

/// Long-run standard deviation sigma~(t) = sqrt(2 pi f(t, 0)).
double local_long_run_sd(const PlsModel& model, double t);

/// Internal: spectral density with zeta semantics at break points (used
/// where sample times t_k may coincide with a break).
double local_spectral_density_unchecked(const PlsModel& model, double t, double lambda);

/// sigma~(t_j) on the sample grid t_j = j/n, j = 1..n, with the
/// left-segment rule at break points.
std::vector<double> long_run_sd_curve(const PlsModel& model, std::size_t n);

/// Stationary path of length n from the filter frozen at time t.
SeriesPath simulate_frozen(const PlsModel& model, double t, std::size_t n, std::uint64_t seed);

}  // namespace vstatns
