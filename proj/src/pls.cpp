#include "vstatns/pls.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <thread>

#include "vstatns/common.hpp"
#include "vstatns/rng.hpp"

namespace vstatns {

double Innovation::draw(std::uint64_t key, std::uint64_t ctr) const {
  switch (kind) {
    case Kind::Normal:
      return rng::normal(key, ctr);
    case Kind::Uniform:
      // Centered uniform with unit variance: U(-sqrt(3), sqrt(3)).
      return (rng::u01(key, ctr) - 0.5) * 2.0 * std::sqrt(3.0);
    case Kind::Custom:
      return custom(key, ctr);
  }
  return 0.0;
}

double Innovation::variance() const {
  switch (kind) {
    case Kind::Normal:
    case Kind::Uniform:
      return 1.0;
    case Kind::Custom:
      return custom_variance;
  }
  return 1.0;
}

const char* Innovation::name() const {
  switch (kind) {
    case Kind::Normal:
      return "normal";
    case Kind::Uniform:
      return "uniform";
    case Kind::Custom:
      return "custom";
  }
  return "?";
}

SegmentFilter SegmentFilter::tv_ma(std::vector<Curve> coeffs) {
  require(!coeffs.empty(), "tvMA needs at least c_0");
  SegmentFilter f;
  f.kind = Kind::TvMA;
  f.ma_coeffs = std::move(coeffs);
  return f;
}

SegmentFilter SegmentFilter::tv_ar1(Curve a) {
  SegmentFilter f;
  f.kind = Kind::TvAR1;
  f.ar_coeff = std::move(a);
  return f;
}

SegmentFilter SegmentFilter::custom_filter(
    std::function<double(double, std::span<const double>)> fn) {
  require(static_cast<bool>(fn), "custom filter callable required");
  SegmentFilter f;
  f.kind = Kind::Custom;
  f.custom = std::move(fn);
  return f;
}

PlsModel::PlsModel(std::vector<double> interior_breaks, std::vector<SegmentFilter> segments,
                   Innovation innovation, int truncation_lag)
    : segments_(std::move(segments)), innovation_(std::move(innovation)) {
  breaks_.push_back(0.0);
  for (double b : interior_breaks) breaks_.push_back(b);
  breaks_.push_back(1.0);
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    require(breaks_[i] < breaks_[i + 1], "break points must be strictly increasing in (0,1)");
  }
  require(segments_.size() + 1 == breaks_.size(), "need one segment filter per break interval");

  std::size_t q_max = 0;
  bool has_custom = false;
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const SegmentFilter& f = segments_[s];
    switch (f.kind) {
      case SegmentFilter::Kind::TvMA: {
        q_max = std::max(q_max, f.ma_coeffs.size() - 1);
        // Boundedness probe on a dense grid.
        for (int g = 0; g <= 1024; ++g) {
          const double t = breaks_[s] + (breaks_[s + 1] - breaks_[s]) * g / 1024.0;
          for (const Curve& c : f.ma_coeffs) {
            require(std::isfinite(c(t)), "tvMA coefficient curve nonfinite on its segment");
          }
        }
        break;
      }
      case SegmentFilter::Kind::TvAR1: {
        double sup = 0.0;
        for (int g = 0; g <= 1024; ++g) {
          const double t = breaks_[s] + (breaks_[s + 1] - breaks_[s]) * g / 1024.0;
          const double a = f.ar_coeff(t);
          require(std::isfinite(a), "tvAR(1) coefficient nonfinite");
          sup = std::max(sup, std::abs(a));
        }
        require(sup < 1.0 - 1e-9, "tvAR(1) requires sup |a(t)| < 1");
        rho_max_ = std::max(rho_max_, sup);
        break;
      }
      case SegmentFilter::Kind::Custom:
        has_custom = true;
        analytic_ = false;
        break;
    }
  }

  if (truncation_lag > 0) {
    require(static_cast<std::size_t>(truncation_lag) >= q_max + 1,
            "truncation_lag must cover the longest tvMA filter");
    lag_ = truncation_lag;
  } else {
    std::size_t lag = q_max + 1;
    if (rho_max_ > 0.0) {
      const double rho = std::max(rho_max_, 1e-3);
      lag = std::max(lag, static_cast<std::size_t>(
                              std::ceil(std::log(1e-14) / std::log(rho))));
    }
    if (has_custom) lag = std::max<std::size_t>(lag, 128);
    require(lag <= 100000, "auto truncation lag too large; supply one explicitly");
    lag_ = static_cast<int>(lag);
  }
}

std::size_t PlsModel::segment_index(double t) const {
  require(t >= 0.0 && t <= 1.0, "time must lie in [0,1]");
  if (t <= 0.0) return 0;
  // j with b_j < t <= b_{j+1}; samples on a break point fall left.
  const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), t);
  const std::size_t idx = static_cast<std::size_t>(it - breaks_.begin());
  return idx == 0 ? 0 : idx - 1;
}

bool PlsModel::is_interior_break(double t) const {
  for (std::size_t i = 1; i + 1 < breaks_.size(); ++i) {
    if (t == breaks_[i]) return true;
  }
  return false;
}

double PlsModel::frozen_eval(double t, std::span<const double> hist) const {
  const SegmentFilter& f = segments_[segment_index(t)];
  const std::size_t B = hist.size();
  switch (f.kind) {
    case SegmentFilter::Kind::TvMA: {
      double x = 0.0;
      const std::size_t q = f.ma_coeffs.size() - 1;
      for (std::size_t i = 0; i <= q; ++i) x += f.ma_coeffs[i](t) * hist[B - 1 - i];
      return x;
    }
    case SegmentFilter::Kind::TvAR1: {
      const double a = f.ar_coeff(t);
      double x = 0.0;
      for (std::size_t i = 0; i < B; ++i) x = a * x + hist[i];  // Horner over lags
      return x;
    }
    case SegmentFilter::Kind::Custom:
      return f.custom(t, hist);
  }
  return 0.0;
}

SeriesPath simulate(const PlsModel& model, std::size_t n, std::uint64_t seed) {
  require(n >= 2, "simulate needs n >= 2");
  const std::size_t B = static_cast<std::size_t>(model.truncation_lag());
  const std::uint64_t key = rng::derive(seed, {rng::kInnovations});

  // eps[i] is the innovation at time m = i - B + 1, so eps[B-1+k] = eps_k.
  std::vector<double> eps(n + B);
  for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = model.innovation().draw(key, i);

  SeriesPath path;
  path.values.resize(n);

  double x_prev = 0.0;
  if (model.segment(0).kind == SegmentFilter::Kind::TvAR1) {
    // Stationary warm start: run the recursion over the pre-sample
    // innovations with the coefficient frozen at t = 1/n.
    const double a0 = model.segment(0).ar_coeff(1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < B; ++i) x_prev = a0 * x_prev + eps[i];
  }

  for (std::size_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    const SegmentFilter& f = model.segment(model.segment_index(t));
    double x = 0.0;
    switch (f.kind) {
      case SegmentFilter::Kind::TvMA: {
        const std::size_t q = f.ma_coeffs.size() - 1;
        for (std::size_t i = 0; i <= q; ++i) x += f.ma_coeffs[i](t) * eps[B - 1 + k - i];
        break;
      }
      case SegmentFilter::Kind::TvAR1:
        x = f.ar_coeff(t) * x_prev + eps[B - 1 + k];
        break;
      case SegmentFilter::Kind::Custom:
        x = f.custom(t, std::span<const double>(eps.data() + k, B));
        break;
    }
    if (!std::isfinite(x)) {
      throw NumericError("simulation failure: nonfinite filter output at k=" + std::to_string(k));
    }
    path.values[k - 1] = x;
    x_prev = x;
  }
  return path;
}

namespace {

struct GridPoint {
  std::size_t segment;
  double t;
};

std::vector<GridPoint> dependence_grid(const PlsModel& model, int per_segment) {
  std::vector<GridPoint> grid;
  for (std::size_t s = 0; s < model.segment_count(); ++s) {
    const double lo = model.breaks()[s], hi = model.breaks()[s + 1];
    for (int g = 0; g < per_segment; ++g) {
      grid.push_back({s, lo + (hi - lo) * (g + 0.5) / per_segment});
    }
  }
  return grid;
}

}  // namespace

std::vector<double> dependence_profile(const PlsModel& model, std::span<const int> lags, double p,
                                       std::size_t reps, std::uint64_t seed, int grid_per_segment,
                                       int threads) {
  require(p >= 1.0, "dependence measure needs p >= 1");
  require(reps >= 100, "dependence measure needs reps >= 100");
  require(grid_per_segment >= 1, "grid_per_segment >= 1");
  for (int j : lags) require(j >= 0, "lags must be nonnegative");

  const std::size_t B = static_cast<std::size_t>(model.truncation_lag());
  const std::vector<GridPoint> grid = dependence_grid(model, grid_per_segment);
  const std::size_t L = lags.size();
  const bool p_is_two = (p == 2.0);

  // moments[point][lag] = mean |G - G_coupled|^p at that grid point.
  std::vector<std::vector<double>> moments(grid.size());

  auto work = [&](std::size_t gi) {
    const GridPoint& gp = grid[gi];
    const std::uint64_t key_hist = rng::derive(seed, {rng::kDependenceBase, gp.segment, static_cast<std::uint64_t>(gi)});
    const std::uint64_t key_cpl = rng::derive(seed, {rng::kDependenceCoupled, gp.segment, static_cast<std::uint64_t>(gi)});
    std::vector<KahanSum> acc(L);
    std::vector<double> hist(B);
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t i = 0; i < B; ++i) {
        hist[i] = model.innovation().draw(key_hist, r * B + i);
      }
      const double base = model.frozen_eval(gp.t, hist);
      const double eps_cpl = model.innovation().draw(key_cpl, r);
      for (std::size_t li = 0; li < L; ++li) {
        const std::size_t j = static_cast<std::size_t>(lags[li]);
        if (j >= B) continue;  // coupled innovation outside the window
        const std::size_t idx = B - 1 - j;
        const double saved = hist[idx];
        hist[idx] = eps_cpl;
        const double diff = model.frozen_eval(gp.t, hist) - base;
        hist[idx] = saved;
        acc[li].add(p_is_two ? diff * diff : std::pow(std::abs(diff), p));
      }
    }
    std::vector<double> out(L);
    for (std::size_t li = 0; li < L; ++li) out[li] = acc[li].value() / static_cast<double>(reps);
    moments[gi] = std::move(out);
  };

  int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(grid.size())));
  if (nthreads == 1) {
    for (std::size_t gi = 0; gi < grid.size(); ++gi) work(gi);
  } else {
    std::vector<std::future<void>> futs;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < nthreads; ++w) {
      futs.push_back(std::async(std::launch::async, [&]() {
        for (;;) {
          const std::size_t gi = next.fetch_add(1);
          if (gi >= grid.size()) return;
          work(gi);
        }
      }));
    }
    for (auto& f : futs) f.get();
  }

  std::vector<double> delta(L, 0.0);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    for (std::size_t li = 0; li < L; ++li) {
      const double m = moments[gi][li];
      if (!std::isfinite(m)) throw NumericError("dependence measure: nonfinite p-th moment");
      delta[li] = std::max(delta[li], std::pow(m, 1.0 / p));
    }
  }
  return delta;
}

double dependence_measure(const PlsModel& model, int lag, double p, std::size_t reps,
                          std::uint64_t seed, int grid_per_segment) {
  const int lags[1] = {lag};
  return dependence_profile(model, lags, p, reps, seed, grid_per_segment)[0];
}

namespace {

void check_analytic_time(const PlsModel& model, double t) {
  if (!model.analytic()) {
    throw UnsupportedError("analytic second-order quantities need tvMA/tvAR(1) segments");
  }
  if (model.is_interior_break(t)) {
    throw ConfigError("t coincides with a break point; the local law is discontinuous there");
  }
}

double acov_unchecked(const PlsModel& model, double t, long k) {
  const SegmentFilter& f = model.segment(model.segment_index(t));
  const double ve = model.innovation().variance();
  const std::size_t lag = static_cast<std::size_t>(k < 0 ? -k : k);
  switch (f.kind) {
    case SegmentFilter::Kind::TvMA: {
      const std::size_t q = f.ma_coeffs.size() - 1;
      if (lag > q) return 0.0;
      double s = 0.0;
      for (std::size_t i = 0; i + lag <= q; ++i) s += f.ma_coeffs[i](t) * f.ma_coeffs[i + lag](t);
      return ve * s;
    }
    case SegmentFilter::Kind::TvAR1: {
      const double a = f.ar_coeff(t);
      return ve * std::pow(std::abs(a), static_cast<double>(lag)) *
             (a < 0.0 && (lag % 2 == 1) ? -1.0 : 1.0) / (1.0 - a * a);
    }
    case SegmentFilter::Kind::Custom:
      throw UnsupportedError("custom filters have no analytic autocovariance; use an MC oracle");
  }
  return 0.0;
}

}  // namespace

double local_acov(const PlsModel& model, double t, long k) {
  check_analytic_time(model, t);
  return acov_unchecked(model, t, k);
}

double local_spectral_density_unchecked(const PlsModel& model, double t, double lambda) {
  const SegmentFilter& f = model.segment(model.segment_index(t));
  switch (f.kind) {
    case SegmentFilter::Kind::TvMA: {
      const std::size_t q = f.ma_coeffs.size() - 1;
      double s = acov_unchecked(model, t, 0);
      for (std::size_t k = 1; k <= q; ++k) {
        s += 2.0 * acov_unchecked(model, t, static_cast<long>(k)) * std::cos(k * lambda);
      }
      return s / kTwoPi;
    }
    case SegmentFilter::Kind::TvAR1: {
      const double g0 = acov_unchecked(model, t, 0);
      const double rho = std::abs(f.ar_coeff(t));
      double s = g0;
      if (rho > 0.0) {
        // Stop once the geometric tail bound drops below 1e-12 relative.
        for (long k = 1;; ++k) {
          s += 2.0 * acov_unchecked(model, t, k) * std::cos(k * lambda);
          const double tail = 2.0 * g0 * std::pow(rho, k + 1) / (1.0 - rho);
          if (tail <= 1e-12 * g0) break;
          if (k > 2000000) throw NumericError("autocovariance series failed to converge");
        }
      }
      return s / kTwoPi;
    }
    case SegmentFilter::Kind::Custom:
      throw UnsupportedError("custom filters have no analytic spectral density; use an MC oracle");
  }
  return 0.0;
}

double local_spectral_density(const PlsModel& model, double t, double lambda) {
  check_analytic_time(model, t);
  require(lambda >= 0.0 && lambda <= kTwoPi, "frequency must lie in [0, 2pi]");
  return local_spectral_density_unchecked(model, t, lambda);
}

double local_long_run_sd(const PlsModel& model, double t) {
  check_analytic_time(model, t);
  const double v = kTwoPi * local_spectral_density_unchecked(model, t, 0.0);
  if (!(v > 0.0)) {
    throw NumericError("degenerate long-run variance: 2 pi f(t,0) <= 0");
  }
  return std::sqrt(v);
}

std::vector<double> long_run_sd_curve(const PlsModel& model, std::size_t n) {
  require(n >= 1, "long_run_sd_curve needs n >= 1");
  std::vector<double> sd(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j + 1) / static_cast<double>(n);
    const double v = kTwoPi * local_spectral_density_unchecked(model, t, 0.0);
    if (!(v > 0.0)) {
      throw NumericError("degenerate long-run variance at t = " + std::to_string(t));
    }
    sd[j] = std::sqrt(v);
  }
  return sd;
}

SeriesPath simulate_frozen(const PlsModel& model, double t, std::size_t n, std::uint64_t seed) {
  require(n >= 1, "simulate_frozen needs n >= 1");
  const std::size_t B = static_cast<std::size_t>(model.truncation_lag());
  const std::uint64_t key = rng::derive(seed, {rng::kFrozenPath});
  const SegmentFilter& f = model.segment(model.segment_index(t));

  std::vector<double> eps(n + B);
  for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = model.innovation().draw(key, i);

  SeriesPath path;
  path.values.resize(n);
  if (f.kind == SegmentFilter::Kind::TvAR1) {
    const double a = f.ar_coeff(t);
    double x = 0.0;
    for (std::size_t i = 0; i < B; ++i) x = a * x + eps[i];
    for (std::size_t k = 0; k < n; ++k) {
      x = a * x + eps[B + k];
      path.values[k] = x;
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      path.values[k] = model.frozen_eval(t, std::span<const double>(eps.data() + k + 1, B));
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(path.values[k])) {
      throw NumericError("frozen simulation produced a nonfinite value");
    }
  }
  return path;
}

}  // namespace vstatns
