#include "vstatns/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "vstatns/common.hpp"
#include "vstatns/quadrature.hpp"
#include "vstatns/rng.hpp"

namespace vstatns {

std::pair<double, double> fourier_sums(const SeriesPath& series, double lambda) {
  require(lambda >= 0.0 && lambda < kTwoPi, "frequency must lie in [0, 2pi)");
  const std::size_t n = series.size();
  KahanSum cs, ss;
  for (std::size_t j = 1; j <= n; ++j) {
    const double a = static_cast<double>(j) * lambda;
    cs.add(series.values[j - 1] * std::cos(a));
    ss.add(series.values[j - 1] * std::sin(a));
  }
  return {cs.value(), ss.value()};
}

namespace {
std::mutex fft_mutex;  // FFTW planning is not thread-safe
}

FourierGrid fourier_sums_grid(const SeriesPath& series) {
  const std::size_t n = series.size();
  require(n >= 2, "fourier grid needs n >= 2");

  fftw_complex* buf;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fft_mutex);
    buf = fftw_alloc_complex(n);
    // Backward transform: Y_k = sum_m in_m e^{+2 pi i m k / n}.
    plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t m = 0; m < n; ++m) {
    buf[m][0] = series.values[m];  // X_{m+1}
    buf[m][1] = 0.0;
  }
  fftw_execute(plan);

  FourierGrid g;
  g.lambda.resize(n);
  g.S_star.resize(n);
  g.S_circ.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lk = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    // sum_{j=1}^n X_j e^{i j lk} = e^{i lk} Y_k.
    const double c = std::cos(lk), s = std::sin(lk);
    g.lambda[k] = lk;
    g.S_star[k] = c * buf[k][0] - s * buf[k][1];
    g.S_circ[k] = s * buf[k][0] + c * buf[k][1];
  }
  {
    std::lock_guard<std::mutex> lock(fft_mutex);
    fftw_destroy_plan(plan);
    fftw_free(buf);
  }
  return g;
}

double periodogram_at(const SeriesPath& series, double lambda) {
  const auto [cs, ss] = fourier_sums(series, lambda);
  return (cs * cs + ss * ss) / (kTwoPi * static_cast<double>(series.size()));
}

SpectralEstimate periodogram(const SeriesPath& series) {
  const std::size_t n = series.size();
  FourierGrid g = fourier_sums_grid(series);
  SpectralEstimate est;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    est.lambda_grid.push_back(g.lambda[k]);
    est.I_values.push_back((g.S_star[k] * g.S_star[k] + g.S_circ[k] * g.S_circ[k]) /
                           (kTwoPi * static_cast<double>(n)));
  }
  return est;
}

namespace {

/// Reflects a frequency into [0, pi]: I_n(-x) = I_n(x), I_n(2pi - x) = I_n(x).
double fold_frequency(double mu) {
  mu = std::fmod(mu, kTwoPi);
  if (mu < 0.0) mu += kTwoPi;
  return mu > kPi ? kTwoPi - mu : mu;
}

}  // namespace

double smoothed_periodogram(const SeriesPath& series, double lambda, SmoothKernel K, int m) {
  const std::size_t n = series.size();
  require(lambda >= 0.0 && lambda <= kPi, "smoothed periodogram frequency must lie in [0, pi]");
  require(m >= 2, "window m must be >= 2");
  require(static_cast<double>(m) / static_cast<double>(n) <= 0.25, "window too wide: m/n > 1/4");

  std::vector<double> w(2 * m + 1);
  KahanSum total;
  for (int u = -m; u <= m; ++u) {
    w[u + m] = K(static_cast<double>(u) / static_cast<double>(m)) / static_cast<double>(m);
    total.add(w[u + m]);
  }
  require(total.value() > 0.0, "kernel weights sum to zero");
  const double norm = total.value();

  KahanSum acc;
  for (int u = -m; u <= m; ++u) {
    if (w[u + m] == 0.0) continue;
    const double mu = fold_frequency(lambda + kTwoPi * static_cast<double>(u) / static_cast<double>(n));
    acc.add((w[u + m] / norm) * periodogram_at(series, mu));
  }
  return acc.value();
}

namespace {

double average_of(const PlsModel& model, double lambda, int quad_points, bool squared) {
  require(quad_points >= 2, "quadrature needs at least 2 nodes");
  KahanSum acc;
  for (std::size_t s = 0; s + 1 < model.breaks().size(); ++s) {
    acc.add(gl_integrate(
        [&](double t) {
          const double f = local_spectral_density_unchecked(model, t, lambda);
          return squared ? f * f : f;
        },
        model.breaks()[s], model.breaks()[s + 1], quad_points));
  }
  return acc.value();
}

}  // namespace

double average_spectrum(const PlsModel& model, double lambda, int quad_points) {
  return average_of(model, lambda, quad_points, false);
}

double average_spectrum_sq(const PlsModel& model, double lambda, int quad_points) {
  return average_of(model, lambda, quad_points, true);
}

std::pair<double, double> gaussian_analog_sums(const PlsModel& model, double lambda,
                                               std::size_t n, std::uint64_t seed) {
  require(n >= 2, "gaussian analog needs n >= 2");
  require(lambda >= 0.0 && lambda <= kPi, "lambda must lie in [0, pi]");
  const std::uint64_t key = rng::derive(seed, {rng::kGaussAnalog});
  const bool boundary = lambda < 1e-12 || std::abs(lambda - kPi) < 1e-12;
  KahanSum a, b;
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    const double f = local_spectral_density_unchecked(model, t, lambda);
    if (f < 0.0) throw NumericError("negative spectral density in gaussian analog");
    const double root = std::sqrt(f);
    if (boundary) {
      a.add(std::sqrt(kTwoPi) * root * rng::normal(key, k));
    } else {
      a.add(std::sqrt(kPi) * root * rng::normal(key, 2 * k));
      b.add(std::sqrt(kPi) * root * rng::normal(key, 2 * k + 1));
    }
  }
  return {a.value(), boundary ? 0.0 : b.value()};
}

ImCorrReport im_corr_probe(const PlsModel& model, int k, std::size_t n, std::size_t reps,
                           std::uint64_t seed) {
  require(k >= 1 && static_cast<std::size_t>(k) <= n / 4, "probe needs 1 <= k <= n/4");
  require(reps >= 100, "probe needs reps >= 100");
  const double lambda_k = kTwoPi * static_cast<double>(k) / static_cast<double>(n);

  std::vector<double> ss(reps), so(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    SeriesPath path = simulate(model, n, rng::derive(seed, {rng::kMcReplication, r}));
    const auto [a, b] = fourier_sums(path, lambda_k);
    ss[r] = a;
    so[r] = b;
  }
  KahanSum ma, mb;
  for (std::size_t r = 0; r < reps; ++r) {
    ma.add(ss[r]);
    mb.add(so[r]);
  }
  const double mean_a = ma.value() / static_cast<double>(reps);
  const double mean_b = mb.value() / static_cast<double>(reps);
  KahanSum cov, var_of_prod;
  for (std::size_t r = 0; r < reps; ++r) {
    cov.add((ss[r] - mean_a) * (so[r] - mean_b));
  }
  const double cov_hat = cov.value() / static_cast<double>(reps - 1);
  for (std::size_t r = 0; r < reps; ++r) {
    const double p = (ss[r] - mean_a) * (so[r] - mean_b) - cov_hat;
    var_of_prod.add(p * p);
  }
  const double se = std::sqrt(var_of_prod.value() / static_cast<double>(reps - 1) /
                              static_cast<double>(reps));

  KahanSum pred;
  for (std::size_t j = 1; j <= n; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n);
    pred.add(local_spectral_density_unchecked(model, t, lambda_k) *
             std::sin(4.0 * kPi * static_cast<double>(k) * t));
  }

  ImCorrReport rep;
  rep.cov_hat = cov_hat;
  rep.predicted = kPi * pred.value();
  rep.se = se;
  rep.lambda_k = lambda_k;
  rep.reps = reps;
  rep.k = k;
  rep.n = n;
  return rep;
}

}  // namespace vstatns
