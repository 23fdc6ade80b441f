#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vstatns/stats.hpp"
#include "vstatns/weights.hpp"

namespace vstatns {

/// Centered chi-square mixture sum_j alpha_j (Z_j^2 - 1).
struct MixtureLaw {
  std::vector<double> alphas;  // descending |alpha|
  double variance = 0;         // 2 sum alpha^2
  std::size_t truncated = 0;   // eigenvalues dropped below 1e-12 max|alpha|
  std::string source;
};

/// Eigenvalues of M[j][k] = W(t_j,t_k) sigma~(t_j) sigma~(t_k) as the
/// coefficients of the limit law of Q_n^o - E Q_n^o. Full decomposition,
/// so n <= 2048; the trace identity sum alpha = trace(M) is asserted.
MixtureLaw quadform_mixture(const WeightMatrix& w, std::span<const double> sigma_curve);

std::vector<double> sample_mixture(const MixtureLaw& law, std::size_t reps, std::uint64_t seed);

struct CdfEstimate {
  double p = 0;
  double se = 0;  // binomial standard error
  std::size_t draws = 0;
};

CdfEstimate mixture_cdf(const MixtureLaw& law, double x, std::size_t draws = 1000000,
                        std::uint64_t seed = 1);

/// Reference distribution for KS comparisons.
struct Reference {
  enum class Kind { AnalyticCdf, Normal, Exp1, ChiSq1, Sample, Mixture, PointMass };

  Kind kind = Kind::Normal;
  std::function<double(double)> cdf;  // AnalyticCdf
  double mean = 0, var = 1;           // Normal
  double point = 0;                   // PointMass
  std::vector<double> sample;         // Sample
  MixtureLaw mixture;                 // Mixture (needs draws > 0)
  std::size_t mixture_draws = 0;
  std::uint64_t mixture_seed = 1;

  static Reference normal(double mean, double var);
  static Reference exp1();
  static Reference chisq1();
  static Reference analytic(std::function<double(double)> cdf);
  static Reference from_sample(std::vector<double> sample);
  static Reference from_mixture(MixtureLaw law, std::size_t draws, std::uint64_t seed = 1);
  static Reference point_mass(double c);
};

/// KS distance of `sample` against the reference (one-sample against
/// analytic CDFs, two-sample otherwise); also returns the 1.36/sqrt(n)
/// reference bar at the effective sample size.
KsResult ks_distance(std::span<const double> sample, const Reference& ref);

struct DeJongReport {
  double theta1_W = 0;       // extreme eigenvalue of the weight matrix
  double theta1_M = 0;       // extreme eigenvalue of the sigma-scaled matrix
  double sum_alpha_sq = 0;   // Frobenius norm^2 of M = sum alpha^2
  double ratio = 0;          // |theta1_M| / sqrt(sum alpha^2)
  double tol = 0;
  bool predicts_normal = false;
};

/// The Cor 4.1 route to normality: theta_{n,1} -> 0. Reports the extreme
/// eigenvalue of W and of M and the max-eigenvalue share of the mixture
/// variance (small share means a normal limit).
DeJongReport dejong_normality_check(const WeightMatrix& w, std::span<const double> sigma_curve,
                                    double tol);

}  // namespace vstatns
