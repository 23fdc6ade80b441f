#include "vstatns/kernel_h.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>

#include "vstatns/common.hpp"
#include "vstatns/rng.hpp"

namespace vstatns {

KernelH variance_kernel() {
  KernelH k;
  k.name = "variance";
  k.eval = [](double x, double y) { return 0.5 * (x - y) * (x - y); };
  k.tail_weight = [](double x) { return (1.0 + x * x) * (1.0 + x * x); };
  return k;
}

KernelH product_kernel() {
  KernelH k;
  k.name = "product";
  k.eval = [](double x, double y) { return x * y; };
  k.tail_weight = [](double x) { return 1.0 + x * x; };
  k.degenerate = true;
  return k;
}

KernelH mean_kernel(std::function<double(double)> M, std::string m_name) {
  KernelH k;
  k.name = "mean_" + m_name;
  k.eval = [M = std::move(M)](double x, double y) { return 0.5 * (M(x) + M(y)); };
  k.tail_weight = [](double x) { return (1.0 + x * x) * (1.0 + x * x); };
  return k;
}

namespace {

std::vector<double> marginal_variances(const PlsModel& model, std::size_t n) {
  require(model.analytic(), "analytic kernel oracles need a tvMA/tvAR(1) model");
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j + 1) / static_cast<double>(n);
    // Frozen-time gamma(t, 0); samples on a break point resolve left.
    const SegmentFilter& f = model.segment(model.segment_index(t));
    double g0 = 0.0;
    if (f.kind == SegmentFilter::Kind::TvMA) {
      for (const Curve& c : f.ma_coeffs) g0 += c(t) * c(t);
      g0 *= model.innovation().variance();
    } else {
      const double a = f.ar_coeff(t);
      g0 = model.innovation().variance() / (1.0 - a * a);
    }
    v[j] = g0;
  }
  return v;
}

}  // namespace

KernelH variance_kernel(const PlsModel& model, std::size_t n) {
  KernelH k = variance_kernel();
  auto v = std::make_shared<std::vector<double>>(marginal_variances(model, n));
  k.marginal = [v](std::size_t j, double x) { return 0.5 * (x * x + (*v)[j]); };
  k.pair_mean = [v](std::size_t a, std::size_t b) { return 0.5 * ((*v)[a] + (*v)[b]); };
  return k;
}

KernelH product_kernel(const PlsModel& model, std::size_t n) {
  KernelH k = product_kernel();
  marginal_variances(model, n);  // validates the model is analytic (zero mean)
  k.marginal = [](std::size_t, double) { return 0.0; };
  k.pair_mean = [](std::size_t, std::size_t) { return 0.0; };
  return k;
}

KernelH mean_kernel(const PlsModel& model, std::size_t n, MeanFunc M) {
  auto v = std::make_shared<std::vector<double>>(marginal_variances(model, n));
  KernelH k;
  switch (M) {
    case MeanFunc::Square:
      k = mean_kernel([](double x) { return x * x; }, "square");
      k.marginal = [v](std::size_t j, double x) { return 0.5 * (x * x + (*v)[j]); };
      k.pair_mean = [v](std::size_t a, std::size_t b) { return 0.5 * ((*v)[a] + (*v)[b]); };
      break;
    case MeanFunc::Identity:
      k = mean_kernel([](double x) { return x; }, "identity");
      k.marginal = [](std::size_t, double x) { return 0.5 * x; };
      k.pair_mean = [](std::size_t, std::size_t) { return 0.0; };
      break;
    case MeanFunc::Abs: {
      require(model.innovation().kind == Innovation::Kind::Normal,
              "mean_abs oracle needs Gaussian innovations");
      k = mean_kernel([](double x) { return std::abs(x); }, "abs");
      k.marginal = [v](std::size_t j, double x) {
        return 0.5 * (std::abs(x) + std::sqrt(2.0 * (*v)[j] / kPi));
      };
      k.pair_mean = [v](std::size_t a, std::size_t b) {
        return 0.5 * (std::sqrt(2.0 * (*v)[a] / kPi) + std::sqrt(2.0 * (*v)[b] / kPi));
      };
      break;
    }
  }
  return k;
}

KernelH kernel_from_name(const std::string& name) {
  if (name == "variance") return variance_kernel();
  if (name == "product") return product_kernel();
  if (name == "mean_square") return mean_kernel([](double x) { return x * x; }, "square");
  if (name == "mean_identity") return mean_kernel([](double x) { return x; }, "identity");
  if (name == "mean_abs") return mean_kernel([](double x) { return std::abs(x); }, "abs");
  throw ConfigError("unknown kernel: " + name);
}

KernelH kernel_from_name(const std::string& name, const PlsModel& model, std::size_t n) {
  if (name == "variance") return variance_kernel(model, n);
  if (name == "product") return product_kernel(model, n);
  if (name == "mean_square") return mean_kernel(model, n, MeanFunc::Square);
  if (name == "mean_identity") return mean_kernel(model, n, MeanFunc::Identity);
  if (name == "mean_abs") return mean_kernel(model, n, MeanFunc::Abs);
  throw ConfigError("unknown kernel: " + name);
}

DegeneracyReport degeneracy_check(const KernelH& kernel, const PlsModel& model, std::size_t reps,
                                  std::size_t grid_points, std::uint64_t seed) {
  require(reps >= 100, "degeneracy check needs reps >= 100");
  require(grid_points >= 3, "degeneracy check needs grid_points >= 3");

  DegeneracyReport rep;
  rep.reps = reps;
  rep.grid_points = grid_points;

  constexpr std::size_t kTimes = 8;
  bool all_within = true;
  for (std::size_t ti = 0; ti < kTimes; ++ti) {
    const double t = (2.0 * ti + 1.0) / (2.0 * kTimes);
    // One pool of frozen draws per time, reused across the x-grid.
    SeriesPath pool = simulate_frozen(model, t, reps, rng::derive(seed, {rng::kDegeneracy, ti}));
    double sd = 0.0;
    {
      KahanSum m2;
      for (double x : pool.values) m2.add(x * x);
      sd = std::sqrt(m2.value() / static_cast<double>(reps));
    }
    const double span = 4.0 * std::max(sd, 1e-8);
    for (std::size_t gi = 0; gi < grid_points; ++gi) {
      const double x = -span + 2.0 * span * static_cast<double>(gi) / (grid_points - 1);
      KahanSum mean, sq;
      for (double draw : pool.values) {
        const double h = kernel.eval(x, draw);
        mean.add(h);
        sq.add(h * h);
      }
      const double est = mean.value() / static_cast<double>(reps);
      if (!std::isfinite(est)) throw NumericError("degeneracy check: nonfinite kernel mean");
      const double var = std::max(0.0, sq.value() / reps - est * est);
      const double se = std::sqrt(var / static_cast<double>(reps));
      const double z = se > 0.0 ? std::abs(est) / se : (est == 0.0 ? 0.0 : 1e308);
      if (std::abs(est) > rep.max_abs) {
        rep.max_abs = std::abs(est);
        rep.se_at_max = se;
        rep.t_at_max = t;
        rep.x_at_max = x;
      }
      rep.max_z = std::max(rep.max_z, z);
      if (z > 3.0) all_within = false;
    }
  }
  rep.degenerate = all_within;
  return rep;
}

namespace {
std::mutex fftw_mutex;  // FFTW planning is not thread-safe
}

WienerClassReport check_wiener_class(const KernelH& kernel, const std::function<double(double)>& L,
                                     double grid_extent, std::size_t grid_points, double delta) {
  require(grid_extent > 0.0 && grid_points >= 16, "wiener check needs extent > 0, points >= 16");
  require(delta >= 0.0, "wiener check needs delta >= 0");
  const std::size_t N = grid_points;
  if (N > 4096 || N * N > (1u << 24)) {
    throw ConfigError("wiener check grid exceeds the memory cap; use grid_points <= 4096");
  }

  const double T = grid_extent;
  const double dx = 2.0 * T / static_cast<double>(N);

  fftw_complex* buf;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    buf = fftw_alloc_complex(N * N);
    plan = fftw_plan_dft_2d(static_cast<int>(N), static_cast<int>(N), buf, buf, FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double x = -T + dx * static_cast<double>(i);
    const double lx = L(x);
    for (std::size_t j = 0; j < N; ++j) {
      const double y = -T + dx * static_cast<double>(j);
      const double v = kernel.eval(x, y) / (lx * L(y));
      buf[i * N + j][0] = std::isfinite(v) ? v : 0.0;
      buf[i * N + j][1] = 0.0;
    }
  }
  fftw_execute(plan);

  // Continuous-transform normalization: g(w) ~ dx^2/(2pi)^2 * |DFT|,
  // frequencies w_k = 2 pi k / (N dx), k in [-N/2, N/2).
  const double scale = dx * dx / (kTwoPi * kTwoPi);
  const double dw = kTwoPi / (static_cast<double>(N) * dx);
  const double omega_max = dw * static_cast<double>(N / 2);

  WienerClassReport rep;
  rep.delta = delta;
  rep.extent = T;
  rep.points = N;
  rep.omega_max = omega_max;

  KahanSum total, weighted, tail;
  for (std::size_t i = 0; i < N; ++i) {
    const long ki = static_cast<long>(i) <= static_cast<long>(N / 2 - 1)
                        ? static_cast<long>(i)
                        : static_cast<long>(i) - static_cast<long>(N);
    const double w1 = dw * static_cast<double>(ki);
    for (std::size_t j = 0; j < N; ++j) {
      const long kj = static_cast<long>(j) <= static_cast<long>(N / 2 - 1)
                          ? static_cast<long>(j)
                          : static_cast<long>(j) - static_cast<long>(N);
      const double w2 = dw * static_cast<double>(kj);
      const double mag =
          scale * std::hypot(buf[i * N + j][0], buf[i * N + j][1]) * dw * dw;
      total.add(mag);
      weighted.add(std::pow(std::sqrt(w1 * w1 + w2 * w2), delta) * mag);
      if (std::max(std::abs(w1), std::abs(w2)) >= 0.9 * omega_max) tail.add(mag);
    }
  }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_destroy_plan(plan);
    fftw_free(buf);
  }

  rep.integral_abs = total.value();
  rep.integral_weighted = weighted.value();
  rep.tail_fraction = total.value() > 0.0 ? tail.value() / total.value() : 0.0;
  return rep;
}

}  // namespace vstatns
