#include "vstatns/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <future>
#include <thread>

#include "vstatns/common.hpp"
#include "vstatns/estimators.hpp"
#include "vstatns/kernel_h.hpp"
#include "vstatns/rng.hpp"
#include "vstatns/spectral.hpp"
#include "vstatns/vstat.hpp"

namespace vstatns {

const char* statistic_name(Statistic s) {
  switch (s) {
    case Statistic::V:
      return "V";
    case Statistic::N:
      return "N";
    case Statistic::DCentered:
      return "D_centered";
    case Statistic::Q:
      return "Q";
    case Statistic::ThetaHat:
      return "theta_hat";
    case Statistic::Periodogram:
      return "periodogram";
    case Statistic::SmoothedPeriodogram:
      return "smoothed_periodogram";
    case Statistic::SPair:
      return "s_pair";
  }
  return "?";
}

Statistic statistic_from_name(const std::string& name) {
  if (name == "V") return Statistic::V;
  if (name == "N") return Statistic::N;
  if (name == "D_centered") return Statistic::DCentered;
  if (name == "Q") return Statistic::Q;
  if (name == "theta_hat") return Statistic::ThetaHat;
  if (name == "periodogram") return Statistic::Periodogram;
  if (name == "smoothed_periodogram") return Statistic::SmoothedPeriodogram;
  if (name == "s_pair") return Statistic::SPair;
  throw ConfigError("unknown statistic: " + name);
}

namespace {

bool needs_weights(Statistic s) {
  return s == Statistic::V || s == Statistic::N || s == Statistic::DCentered ||
         s == Statistic::Q;
}

std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  return rng::mix64(h ^ (v + rng::kGolden));
}

std::uint64_t hash_double(std::uint64_t h, double x) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(x));
  std::memcpy(&bits, &x, sizeof(bits));
  return hash_mix(h, bits);
}

std::uint64_t config_fingerprint(const McConfig& c) {
  std::uint64_t h = 0x76737461746E73ULL;  // arbitrary tag
  h = hash_mix(h, static_cast<std::uint64_t>(c.statistic));
  for (char ch : c.kernel_name) h = hash_mix(h, static_cast<std::uint64_t>(ch));
  h = hash_double(h, c.lambda);
  h = hash_mix(h, c.normalize_by_avg_spectrum ? 1 : 0);
  h = hash_mix(h, static_cast<std::uint64_t>(c.smooth_m));
  h = hash_double(h, c.b_n);
  h = hash_double(h, c.t_star);
  h = hash_mix(h, c.n);
  h = hash_mix(h, c.reps);
  h = hash_mix(h, c.root_seed);
  for (double b : c.model.breaks()) h = hash_double(h, b);
  h = hash_mix(h, c.model.segment_count());
  return h;
}

struct RepValue {
  double a = 0;
  double b = 0;
};

}  // namespace

McReport run(const McConfig& config) {
  require(config.reps >= 100, "mc run needs reps >= 100");
  require(config.n >= 2, "mc run needs n >= 2");
  const auto t0 = std::chrono::steady_clock::now();

  std::optional<WeightMatrix> w;
  if (config.weights) w = build_weight_matrix(*config.weights, config.n);
  if (needs_weights(config.statistic)) {
    require(w.has_value(), "statistic requires a weight spec");
  }

  std::optional<KernelH> kernel;
  if (config.statistic == Statistic::V || config.statistic == Statistic::N ||
      config.statistic == Statistic::DCentered) {
    kernel = kernel_from_name(config.kernel_name, config.model, config.n);
  } else if (config.statistic == Statistic::ThetaHat) {
    kernel = kernel_from_name(config.kernel_name);
  }

  double avg_spec = 1.0;
  if (config.normalize_by_avg_spectrum) {
    avg_spec = average_spectrum(config.model, config.lambda);
    require(avg_spec > 0.0, "average spectrum is not positive; cannot normalize");
  }

  const bool is_pair = config.statistic == Statistic::SPair;
  std::vector<RepValue> values(config.reps);

  auto one_rep = [&](std::size_t i) {
    const std::uint64_t seed = rng::derive(config.root_seed, {rng::kMcReplication, i});
    const SeriesPath path = simulate(config.model, config.n, seed);
    RepValue out;
    switch (config.statistic) {
      case Statistic::V:
        out.a = evaluate_V(path, *w, *kernel);
        break;
      case Statistic::N:
        out.a = hoeffding_decompose(path, *w, *kernel).N;
        break;
      case Statistic::DCentered:
        out.a = hoeffding_decompose(path, *w, *kernel).D_centered;
        break;
      case Statistic::Q:
        out.a = evaluate_Q(path, *w);
        break;
      case Statistic::ThetaHat:
        out.a = local_linear_theta(path, *kernel, config.K, config.b_n, config.t_star).theta_hat;
        break;
      case Statistic::Periodogram:
        out.a = periodogram_at(path, config.lambda) / avg_spec;
        break;
      case Statistic::SmoothedPeriodogram:
        out.a = smoothed_periodogram(path, config.lambda, config.smooth_K, config.smooth_m) /
                avg_spec;
        break;
      case Statistic::SPair: {
        const auto [a, b] = fourier_sums(path, config.lambda);
        out.a = a;
        out.b = b;
        break;
      }
    }
    values[i] = out;
  };

  int nthreads = config.threads > 0 ? config.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(config.reps)));
  if (nthreads == 1) {
    for (std::size_t i = 0; i < config.reps; ++i) one_rep(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> futs;
    for (int t = 0; t < nthreads; ++t) {
      futs.push_back(std::async(std::launch::async, [&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= config.reps) return;
          one_rep(i);
        }
      }));
    }
    for (auto& f : futs) f.get();
  }

  McReport rep;
  rep.reps = config.reps;
  rep.n = config.n;
  rep.root_seed = config.root_seed;
  rep.statistic = statistic_name(config.statistic);
  rep.threshold = config.ks_threshold;
  rep.config_hash = config_fingerprint(config);

  std::vector<double> raw(config.reps);
  for (std::size_t i = 0; i < config.reps; ++i) raw[i] = values[i].a;
  rep.raw_summary = SampleSummary::from(raw);

  if (is_pair) {
    rep.sample_b.resize(config.reps);
    for (std::size_t i = 0; i < config.reps; ++i) rep.sample_b[i] = values[i].b;
    const SampleSummary sb = SampleSummary::from(rep.sample_b);
    KahanSum cov;
    for (std::size_t i = 0; i < config.reps; ++i) {
      cov.add((raw[i] - rep.raw_summary.mean) * (rep.sample_b[i] - sb.mean));
    }
    rep.pair_covariance = cov.value() / static_cast<double>(config.reps - 1);
  }

  // Standardize in a fixed single-threaded pass.
  double center = 0.0, scale = 1.0;
  switch (config.standardize.center) {
    case Standardization::Mode::None:
      break;
    case Standardization::Mode::Empirical:
      center = rep.raw_summary.mean;
      break;
    case Standardization::Mode::Value:
      center = config.standardize.center_value;
      break;
  }
  switch (config.standardize.scale) {
    case Standardization::Mode::None:
      break;
    case Standardization::Mode::Empirical:
      scale = rep.raw_summary.sd;
      if (!(scale > 0.0)) throw NumericError("empirical standardization: zero sample SD");
      break;
    case Standardization::Mode::Value:
      scale = config.standardize.scale_value;
      require(scale > 0.0, "standardization scale must be positive");
      break;
  }
  rep.sample.resize(config.reps);
  for (std::size_t i = 0; i < config.reps; ++i) {
    rep.sample[i] = config.standardize.post_multiplier * (raw[i] - center) / scale;
  }
  rep.raw_sample = std::move(raw);
  rep.summary = SampleSummary::from(rep.sample);

  switch (config.reference.kind) {
    case ReferenceSpec::Kind::None:
      break;
    case ReferenceSpec::Kind::PointMass:
      rep.ks = ks_distance(rep.sample, Reference::point_mass(config.reference.point));
      break;
    case ReferenceSpec::Kind::Normal:
      rep.ks = ks_distance(rep.sample, Reference::normal(config.reference.mean, config.reference.var));
      break;
    case ReferenceSpec::Kind::Exp1:
      rep.ks = ks_distance(rep.sample, Reference::exp1());
      break;
    case ReferenceSpec::Kind::ChiSq1:
      rep.ks = ks_distance(rep.sample, Reference::chisq1());
      break;
    case ReferenceSpec::Kind::Mixture: {
      require(w.has_value(), "mixture reference needs a weight spec");
      std::vector<double> sigma;
      if (config.reference.sigma_source == ReferenceSpec::SigmaSource::Constant) {
        sigma.assign(config.n, config.reference.sigma_value);
      } else {
        sigma = long_run_sd_curve(config.model, config.n);
      }
      MixtureLaw law = quadform_mixture(*w, sigma);
      rep.ks = ks_distance(rep.sample,
                           Reference::from_mixture(std::move(law), config.reference.draws,
                                                   rng::derive(config.root_seed, {rng::kMixture})));
      break;
    }
  }
  if (rep.ks && config.ks_threshold > 0.0) {
    rep.pass = rep.ks->statistic <= config.ks_threshold;
  }

  rep.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::vector<McReport> ladder(const McConfig& config, LadderParam param,
                             const std::vector<double>& values) {
  require(!values.empty(), "ladder needs a nonempty value list");
  std::vector<McReport> out;
  out.reserve(values.size());
  for (double v : values) {
    McConfig c = config;
    switch (param) {
      case LadderParam::N:
        require(v >= 2.0, "ladder n must be >= 2");
        c.n = static_cast<std::size_t>(v);
        break;
      case LadderParam::ToeplitzM:
        require(c.weights.has_value(), "ToeplitzM ladder needs a weight spec");
        c.weights->m = v;
        break;
      case LadderParam::Bandwidth:
        c.b_n = v;
        break;
    }
    out.push_back(run(c));
  }
  return out;
}

}  // namespace vstatns
