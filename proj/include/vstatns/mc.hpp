#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vstatns/limit_laws.hpp"
#include "vstatns/pls.hpp"
#include "vstatns/stats.hpp"
#include "vstatns/weights.hpp"

namespace vstatns {

enum class Statistic {
  V,
  N,
  DCentered,
  Q,
  ThetaHat,
  Periodogram,
  SmoothedPeriodogram,
  SPair,
};

const char* statistic_name(Statistic s);
Statistic statistic_from_name(const std::string& name);

struct Standardization {
  enum class Mode { None, Empirical, Value };
  Mode center = Mode::None;
  Mode scale = Mode::None;
  double center_value = 0;
  double scale_value = 1;
  /// Extra deterministic multiplier applied after centering/scaling
  /// (e.g. sqrt(m) for smoothed-periodogram limits).
  double post_multiplier = 1;
};

struct ReferenceSpec {
  enum class Kind { None, PointMass, Normal, Exp1, ChiSq1, Mixture };
  Kind kind = Kind::None;
  double mean = 0, var = 1;  // Normal
  double point = 0;          // PointMass
  // Mixture: built from the config's weights and a sigma curve.
  enum class SigmaSource { Constant, Model };
  SigmaSource sigma_source = SigmaSource::Constant;
  double sigma_value = 1.0;
  std::size_t draws = 100000;
};

struct McConfig {
  PlsModel model;
  std::optional<WeightSpec> weights;  // required for V/N/D/Q and mixture refs
  Statistic statistic = Statistic::Q;
  std::string kernel_name = "product";  // H for V/N/D and theta_hat responses

  double lambda = 0;          // periodogram statistics
  bool normalize_by_avg_spectrum = false;
  int smooth_m = 0;           // smoothed periodogram window
  SmoothKernel smooth_K{SmoothKernel::Kind::Epanechnikov};

  double b_n = 0;             // theta_hat
  double t_star = 0.5;
  SmoothKernel K{SmoothKernel::Kind::Epanechnikov};

  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t root_seed = 1;
  Standardization standardize;
  ReferenceSpec reference;
  double ks_threshold = 0;    // 0 means no pass/fail verdict
  int threads = 0;            // 0 = hardware concurrency
};

struct McReport {
  SampleSummary summary;          // standardized sample
  SampleSummary raw_summary;      // before standardization
  std::optional<KsResult> ks;
  std::optional<bool> pass;
  double threshold = 0;
  std::size_t reps = 0;
  std::size_t n = 0;
  std::uint64_t root_seed = 0;
  std::string statistic;
  std::uint64_t config_hash = 0;
  double runtime_ms = 0;          // excluded from the determinism contract
  std::vector<double> sample;     // standardized replication values
  std::vector<double> raw_sample; // untransformed replication values
  std::vector<double> sample_b;   // second component for pair statistics
  double pair_covariance = 0;     // only for SPair
};

/// Runs the replication loop. Replication i draws its seed from
/// (root_seed, i); results are stored by index, so aggregation and the
/// report content are independent of the worker count.
McReport run(const McConfig& config);

enum class LadderParam { N, ToeplitzM, Bandwidth };

/// Sweeps one tuning parameter across `values`, returning one report each.
std::vector<McReport> ladder(const McConfig& config, LadderParam param,
                             const std::vector<double>& values);

}  // namespace vstatns
