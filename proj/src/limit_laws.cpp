#include "vstatns/limit_laws.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "vstatns/common.hpp"
#include "vstatns/rng.hpp"

namespace vstatns {

MixtureLaw quadform_mixture(const WeightMatrix& w, std::span<const double> sigma_curve) {
  const std::size_t n = w.size();
  require(sigma_curve.size() == n, "sigma curve length must equal n");
  for (double s : sigma_curve) require(s > 0.0, "sigma curve entries must be positive");
  if (n > 2048) {
    throw UnsupportedError("quadform_mixture needs the full spectrum; n is capped at 2048");
  }

  Eigen::MatrixXd M(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      M(j, k) = w.at(j, k) * sigma_curve[j] * sigma_curve[k];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("quadform_mixture: eigensolver failed");

  std::vector<double> alphas(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(alphas.begin(), alphas.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });

  const double amax = alphas.empty() ? 0.0 : std::abs(alphas.front());
  MixtureLaw law;
  law.source = "quadform eigendecomposition, n=" + std::to_string(n);

  KahanSum trace_check, var;
  for (double a : alphas) trace_check.add(a);
  std::size_t kept = alphas.size();
  while (kept > 0 && std::abs(alphas[kept - 1]) < 1e-12 * amax) --kept;
  law.truncated = alphas.size() - kept;
  alphas.resize(kept);
  for (double a : alphas) var.add(a * a);
  law.alphas = std::move(alphas);
  law.variance = 2.0 * var.value();

  const double trace = [&] {
    KahanSum acc;
    for (std::size_t j = 0; j < n; ++j) acc.add(w.at(j, j) * sigma_curve[j] * sigma_curve[j]);
    return acc.value();
  }();
  const double scale = std::abs(trace) + std::sqrt(var.value()) + 1e-300;
  if (std::abs(trace_check.value() - trace) > 1e-8 * scale) {
    throw NumericError("quadform_mixture: trace identity violated");
  }
  return law;
}

std::vector<double> sample_mixture(const MixtureLaw& law, std::size_t reps, std::uint64_t seed) {
  const std::uint64_t key = rng::derive(seed, {rng::kMixture});
  const std::size_t J = law.alphas.size();
  std::vector<double> out(reps, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    KahanSum acc;
    for (std::size_t j = 0; j < J; ++j) {
      const double z = rng::normal(key, r * J + j);
      acc.add(law.alphas[j] * (z * z - 1.0));
    }
    out[r] = acc.value();
  }
  return out;
}

CdfEstimate mixture_cdf(const MixtureLaw& law, double x, std::size_t draws, std::uint64_t seed) {
  require(draws >= 100, "mixture_cdf needs draws >= 100");
  const std::vector<double> s = sample_mixture(law, draws, rng::derive(seed, {rng::kMixtureCdf}));
  std::size_t count = 0;
  for (double v : s) {
    if (v <= x) ++count;
  }
  CdfEstimate est;
  est.draws = draws;
  est.p = static_cast<double>(count) / static_cast<double>(draws);
  est.se = std::sqrt(std::max(est.p * (1.0 - est.p), 1.0 / draws) / static_cast<double>(draws));
  return est;
}

Reference Reference::normal(double mean, double var) {
  Reference r;
  r.kind = Kind::Normal;
  r.mean = mean;
  r.var = var;
  return r;
}

Reference Reference::exp1() {
  Reference r;
  r.kind = Kind::Exp1;
  return r;
}

Reference Reference::chisq1() {
  Reference r;
  r.kind = Kind::ChiSq1;
  return r;
}

Reference Reference::analytic(std::function<double(double)> cdf) {
  Reference r;
  r.kind = Kind::AnalyticCdf;
  r.cdf = std::move(cdf);
  return r;
}

Reference Reference::from_sample(std::vector<double> sample) {
  Reference r;
  r.kind = Kind::Sample;
  r.sample = std::move(sample);
  return r;
}

Reference Reference::from_mixture(MixtureLaw law, std::size_t draws, std::uint64_t seed) {
  Reference r;
  r.kind = Kind::Mixture;
  r.mixture = std::move(law);
  r.mixture_draws = draws;
  r.mixture_seed = seed;
  return r;
}

Reference Reference::point_mass(double c) {
  Reference r;
  r.kind = Kind::PointMass;
  r.point = c;
  return r;
}

KsResult ks_distance(std::span<const double> sample, const Reference& ref) {
  require(!sample.empty(), "ks_distance: empty sample");
  switch (ref.kind) {
    case Reference::Kind::AnalyticCdf:
      return ks_one_sample(sample, ref.cdf);
    case Reference::Kind::Normal: {
      const double mu = ref.mean, sd = std::sqrt(ref.var);
      return ks_one_sample(sample, [mu, sd](double x) { return normal_cdf(x, mu, sd); });
    }
    case Reference::Kind::Exp1:
      return ks_one_sample(sample, [](double x) { return exp1_cdf(x); });
    case Reference::Kind::ChiSq1:
      return ks_one_sample(sample, [](double x) { return chisq1_cdf(x); });
    case Reference::Kind::Sample:
      return ks_two_sample(sample, ref.sample);
    case Reference::Kind::Mixture: {
      if (ref.mixture_draws == 0) {
        throw ConfigError("mixture reference needs a positive draw count");
      }
      const std::vector<double> draws =
          sample_mixture(ref.mixture, ref.mixture_draws, ref.mixture_seed);
      return ks_two_sample(sample, draws);
    }
    case Reference::Kind::PointMass:
      return ks_point_mass(sample, ref.point);
  }
  throw ConfigError("unknown reference kind");
}

DeJongReport dejong_normality_check(const WeightMatrix& w, std::span<const double> sigma_curve,
                                    double tol) {
  const std::size_t n = w.size();
  require(sigma_curve.size() == n, "sigma curve length must equal n");
  require(tol > 0.0, "tolerance must be positive");

  DeJongReport rep;
  rep.tol = tol;
  rep.theta1_W = max_abs_eigenvalue(w).theta1;

  // Scaled matrix M = D W D as an explicit weight matrix.
  std::vector<double> entries(n * n);
  KahanSum frob;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      const double v = w.at(j, k) * sigma_curve[j] * sigma_curve[k];
      entries[j * n + k] = v;
      entries[k * n + j] = v;
      frob.add((j == k ? 1.0 : 2.0) * v * v);
    }
  }
  const WeightMatrix M = build_weight_matrix(WeightSpec::explicit_matrix(std::move(entries), n), n);
  rep.theta1_M = max_abs_eigenvalue(M).theta1;
  rep.sum_alpha_sq = frob.value();
  rep.ratio = rep.sum_alpha_sq > 0.0 ? std::abs(rep.theta1_M) / std::sqrt(rep.sum_alpha_sq)
                                     : std::numeric_limits<double>::quiet_NaN();
  rep.predicts_normal = rep.ratio <= tol;
  return rep;
}

}  // namespace vstatns
