#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vstatns/kernels1d.hpp"
#include "vstatns/pls.hpp"

namespace vstatns {

/// Fourier partial sums S* = sum_{j=1}^n X_j cos(j lambda),
/// S^o = sum X_j sin(j lambda), by direct summation.
std::pair<double, double> fourier_sums(const SeriesPath& series, double lambda);

struct FourierGrid {
  std::vector<double> lambda;  // 2 pi k / n, k = 0..n-1
  std::vector<double> S_star;
  std::vector<double> S_circ;
};

/// Full-grid Fourier sums via FFT, phase convention matched to the
/// definition (exponent +i j lambda, j from 1).
FourierGrid fourier_sums_grid(const SeriesPath& series);

struct SpectralEstimate {
  std::vector<double> lambda_grid;  // ascending within [0, pi]
  std::vector<double> I_values;
  std::vector<double> f_tilde;  // empty unless smoothing requested
  int window_m = 0;
  std::string K_name;
};

double periodogram_at(const SeriesPath& series, double lambda);

/// Periodogram on the Fourier frequencies in [0, pi] (FFT path).
SpectralEstimate periodogram(const SeriesPath& series);

/// Smoothed periodogram f~(lambda) = sum_{u=-m}^m w_u I_n(lambda + 2 pi u/n)
/// with w_u proportional to K(u/m)/m and renormalized to sum to one;
/// frequencies overhanging 0 or pi are reflected.
double smoothed_periodogram(const SeriesPath& series, double lambda, SmoothKernel K, int m);

/// int_0^1 f(t, lambda) dt by composite Gauss-Legendre per segment.
double average_spectrum(const PlsModel& model, double lambda, int quad_points = 64);

/// int_0^1 f^2(t, lambda) dt, same quadrature (smoothed-periodogram variance constant).
double average_spectrum_sq(const PlsModel& model, double lambda, int quad_points = 64);

/// The approximating Gaussian sums of the Fourier-transform limit theorem:
/// interior lambda gives (sqrt(pi) sum f^{1/2}(t_k,lambda) G_{k,1},
/// sqrt(pi) sum f^{1/2} G_{k,2}); lambda in {0, pi} gives the
/// one-dimensional sqrt(2 pi) sum f^{1/2} G*_k in the first slot.
std::pair<double, double> gaussian_analog_sums(const PlsModel& model, double lambda,
                                               std::size_t n, std::uint64_t seed);

struct ImCorrReport {
  double cov_hat = 0;     // MC estimate of cov(S*, S^o) at lambda_k
  double predicted = 0;   // pi sum_j f(t_j, lambda_k) sin(4 pi k t_j)
  double se = 0;          // MC standard error of cov_hat
  double lambda_k = 0;
  std::size_t reps = 0;
  int k = 0;
  std::size_t n = 0;
};

/// Boundary covariance anomaly probe at lambda_k = 2 pi k / n.
ImCorrReport im_corr_probe(const PlsModel& model, int k, std::size_t n, std::size_t reps,
                           std::uint64_t seed);

}  // namespace vstatns
