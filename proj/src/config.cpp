#include "vstatns/config.hpp"

#include <fstream>

#include "vstatns/common.hpp"

namespace vstatns::config {

using nlohmann::json;

json curve_to_json(const Curve& c) {
  json j;
  switch (c.family) {
    case Curve::Family::Constant:
      j["family"] = "constant";
      j["c"] = c.c;
      break;
    case Curve::Family::Linear:
      j["family"] = "linear";
      j["a"] = c.a;
      j["b"] = c.b;
      break;
    case Curve::Family::Cosine:
      j["family"] = "cosine";
      j["a"] = c.a;
      j["b"] = c.b;
      j["freq"] = c.freq;
      j["phase"] = c.phase;
      break;
    case Curve::Family::SqrtLinear:
      j["family"] = "sqrt_linear";
      j["a"] = c.a;
      j["b"] = c.b;
      break;
    case Curve::Family::SqrtCosine:
      j["family"] = "sqrt_cosine";
      j["a"] = c.a;
      j["b"] = c.b;
      j["freq"] = c.freq;
      j["phase"] = c.phase;
      break;
    case Curve::Family::PiecewiseConstant:
      j["family"] = "piecewise_constant";
      j["knots"] = c.knots;
      j["values"] = c.values;
      break;
    case Curve::Family::Custom:
      throw ConfigError("custom curves are not serializable");
  }
  return j;
}

Curve curve_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "constant") return Curve::constant(j.at("c").get<double>());
  if (family == "linear") return Curve::linear(j.at("a").get<double>(), j.at("b").get<double>());
  if (family == "cosine") {
    return Curve::cosine(j.at("a").get<double>(), j.at("b").get<double>(),
                         j.value("freq", 1.0), j.value("phase", 0.0));
  }
  if (family == "sqrt_linear") {
    return Curve::sqrt_linear(j.at("a").get<double>(), j.at("b").get<double>());
  }
  if (family == "sqrt_cosine") {
    return Curve::sqrt_cosine(j.at("a").get<double>(), j.at("b").get<double>(),
                              j.value("freq", 1.0), j.value("phase", 0.0));
  }
  if (family == "piecewise_constant") {
    return Curve::piecewise_constant(j.at("knots").get<std::vector<double>>(),
                                     j.at("values").get<std::vector<double>>());
  }
  throw ConfigError("unknown curve family: " + family);
}

json model_to_json(const PlsModel& m) {
  json j;
  j["schema_version"] = kSchemaVersion;
  std::vector<double> interior(m.breaks().begin() + 1, m.breaks().end() - 1);
  j["breaks"] = interior;
  j["truncation_lag"] = m.truncation_lag();
  j["innovation"] = {{"kind", m.innovation().name()}};
  json segs = json::array();
  for (std::size_t s = 0; s < m.segment_count(); ++s) {
    const SegmentFilter& f = m.segment(s);
    json sj;
    switch (f.kind) {
      case SegmentFilter::Kind::TvMA: {
        sj["kind"] = "tvma";
        json coeffs = json::array();
        for (const Curve& c : f.ma_coeffs) coeffs.push_back(curve_to_json(c));
        sj["coeffs"] = coeffs;
        break;
      }
      case SegmentFilter::Kind::TvAR1:
        sj["kind"] = "tvar1";
        sj["a"] = curve_to_json(f.ar_coeff);
        break;
      case SegmentFilter::Kind::Custom:
        throw ConfigError("custom filters are not serializable");
    }
    segs.push_back(sj);
  }
  j["segments"] = segs;
  return j;
}

PlsModel model_from_json(const json& j) {
  std::vector<double> breaks = j.value("breaks", std::vector<double>{});
  const int lag = j.value("truncation_lag", 0);

  Innovation innov;
  if (j.contains("innovation")) {
    const std::string kind = j.at("innovation").value("kind", "normal");
    if (kind == "normal") {
      innov.kind = Innovation::Kind::Normal;
    } else if (kind == "uniform") {
      innov.kind = Innovation::Kind::Uniform;
    } else {
      throw ConfigError("config innovations must be 'normal' or 'uniform'");
    }
  }

  std::vector<SegmentFilter> segments;
  for (const json& sj : j.at("segments")) {
    const std::string kind = sj.at("kind").get<std::string>();
    if (kind == "tvma") {
      std::vector<Curve> coeffs;
      for (const json& cj : sj.at("coeffs")) coeffs.push_back(curve_from_json(cj));
      segments.push_back(SegmentFilter::tv_ma(std::move(coeffs)));
    } else if (kind == "tvar1") {
      segments.push_back(SegmentFilter::tv_ar1(curve_from_json(sj.at("a"))));
    } else {
      throw ConfigError("unknown segment kind: " + kind);
    }
  }
  return PlsModel(std::move(breaks), std::move(segments), innov, lag);
}

json weights_to_json(const WeightSpec& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  switch (s.family) {
    case WeightSpec::Family::GlobalFunction: {
      j["family"] = "global";
      json fj;
      switch (s.f.family) {
        case Surface::Family::Constant:
          fj = {{"family", "constant"}, {"c", s.f.c}};
          break;
        case Surface::Family::OnePlusTs:
          fj = {{"family", "one_plus_ts"}, {"c", s.f.c}};
          break;
        case Surface::Family::Custom:
          throw ConfigError("custom surfaces are not serializable");
      }
      j["f"] = fj;
      break;
    }
    case WeightSpec::Family::LocalKernel:
      j["family"] = "local_kernel";
      j["K"] = s.K.name();
      j["bandwidth"] = s.bandwidth;
      j["center"] = s.center;
      break;
    case WeightSpec::Family::BandedToeplitz:
      j["family"] = "banded_toeplitz";
      j["h"] = s.h.name();
      j["m"] = s.m;
      break;
    case WeightSpec::Family::Explicit: {
      j["family"] = "explicit";
      j["n"] = s.explicit_n;
      j["entries"] = s.explicit_entries;
      break;
    }
  }
  return j;
}

WeightSpec weights_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "global") {
    const json& fj = j.at("f");
    const std::string sf = fj.at("family").get<std::string>();
    if (sf == "constant") return WeightSpec::global(Surface::constant(fj.at("c").get<double>()));
    if (sf == "one_plus_ts") {
      return WeightSpec::global(Surface::one_plus_ts(fj.value("c", 1.0)));
    }
    throw ConfigError("unknown surface family: " + sf);
  }
  if (family == "local_kernel") {
    return WeightSpec::local_kernel(SmoothKernel::from_name(j.at("K").get<std::string>()),
                                    j.at("bandwidth").get<double>(), j.value("center", 0.5));
  }
  if (family == "banded_toeplitz") {
    const std::string h = j.at("h").get<std::string>();
    DecayFn fn;
    if (h == "exp") {
      fn = DecayFn::exp_decay();
    } else if (h == "gaussian") {
      fn = DecayFn::gaussian();
    } else if (h == "constant") {
      fn = DecayFn::constant();
    } else {
      throw ConfigError("unknown decay function: " + h);
    }
    return WeightSpec::banded_toeplitz(fn, j.at("m").get<double>());
  }
  if (family == "explicit") {
    return WeightSpec::explicit_matrix(j.at("entries").get<std::vector<double>>(),
                                       j.at("n").get<std::size_t>());
  }
  throw ConfigError("unknown weight family: " + family);
}

json mc_to_json(const McConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = model_to_json(c.model);
  if (c.weights) j["weights"] = weights_to_json(*c.weights);
  j["statistic"] = statistic_name(c.statistic);
  j["kernel"] = c.kernel_name;
  j["lambda"] = c.lambda;
  j["normalize"] = c.normalize_by_avg_spectrum ? "average_spectrum" : "none";
  j["smooth_m"] = c.smooth_m;
  j["smooth_K"] = c.smooth_K.name();
  j["b_n"] = c.b_n;
  j["t_star"] = c.t_star;
  j["K"] = c.K.name();
  j["n"] = c.n;
  j["reps"] = c.reps;
  j["root_seed"] = c.root_seed;

  auto mode_name = [](Standardization::Mode m) {
    switch (m) {
      case Standardization::Mode::None:
        return "none";
      case Standardization::Mode::Empirical:
        return "empirical";
      case Standardization::Mode::Value:
        return "value";
    }
    return "?";
  };
  j["standardization"] = {{"center", mode_name(c.standardize.center)},
                          {"scale", mode_name(c.standardize.scale)},
                          {"center_value", c.standardize.center_value},
                          {"scale_value", c.standardize.scale_value},
                          {"post_multiplier", c.standardize.post_multiplier}};

  json rj;
  switch (c.reference.kind) {
    case ReferenceSpec::Kind::None:
      rj["kind"] = "none";
      break;
    case ReferenceSpec::Kind::PointMass:
      rj["kind"] = "point_mass";
      rj["value"] = c.reference.point;
      break;
    case ReferenceSpec::Kind::Normal:
      rj["kind"] = "normal";
      rj["mean"] = c.reference.mean;
      rj["var"] = c.reference.var;
      break;
    case ReferenceSpec::Kind::Exp1:
      rj["kind"] = "exp1";
      break;
    case ReferenceSpec::Kind::ChiSq1:
      rj["kind"] = "chisq1";
      break;
    case ReferenceSpec::Kind::Mixture:
      rj["kind"] = "mixture";
      rj["sigma"] =
          c.reference.sigma_source == ReferenceSpec::SigmaSource::Model ? "model" : "constant";
      rj["sigma_value"] = c.reference.sigma_value;
      rj["draws"] = c.reference.draws;
      break;
  }
  j["reference"] = rj;
  j["ks_threshold"] = c.ks_threshold;
  j["threads"] = c.threads;
  return j;
}

McConfig mc_from_json(const json& j) {
  McConfig c{.model = model_from_json(j.at("model"))};
  if (j.contains("weights")) c.weights = weights_from_json(j.at("weights"));
  c.statistic = statistic_from_name(j.at("statistic").get<std::string>());
  c.kernel_name = j.value("kernel", "product");
  c.lambda = j.value("lambda", 0.0);
  c.normalize_by_avg_spectrum = j.value("normalize", "none") == std::string("average_spectrum");
  c.smooth_m = j.value("smooth_m", 0);
  if (j.contains("smooth_K")) c.smooth_K = SmoothKernel::from_name(j.at("smooth_K"));
  c.b_n = j.value("b_n", 0.0);
  c.t_star = j.value("t_star", 0.5);
  if (j.contains("K")) c.K = SmoothKernel::from_name(j.at("K"));
  c.n = j.at("n").get<std::size_t>();
  c.reps = j.at("reps").get<std::size_t>();
  c.root_seed = j.value("root_seed", 1ULL);

  if (j.contains("standardization")) {
    const json& sj = j.at("standardization");
    auto mode = [](const std::string& s) {
      if (s == "none") return Standardization::Mode::None;
      if (s == "empirical") return Standardization::Mode::Empirical;
      if (s == "value") return Standardization::Mode::Value;
      throw ConfigError("unknown standardization mode: " + s);
    };
    c.standardize.center = mode(sj.value("center", "none"));
    c.standardize.scale = mode(sj.value("scale", "none"));
    c.standardize.center_value = sj.value("center_value", 0.0);
    c.standardize.scale_value = sj.value("scale_value", 1.0);
    c.standardize.post_multiplier = sj.value("post_multiplier", 1.0);
  }

  if (j.contains("reference")) {
    const json& rj = j.at("reference");
    const std::string kind = rj.value("kind", "none");
    if (kind == "none") {
      c.reference.kind = ReferenceSpec::Kind::None;
    } else if (kind == "point_mass") {
      c.reference.kind = ReferenceSpec::Kind::PointMass;
      c.reference.point = rj.value("value", 0.0);
    } else if (kind == "normal" || kind == "normal01") {
      c.reference.kind = ReferenceSpec::Kind::Normal;
      c.reference.mean = rj.value("mean", 0.0);
      c.reference.var = rj.value("var", 1.0);
    } else if (kind == "exp1") {
      c.reference.kind = ReferenceSpec::Kind::Exp1;
    } else if (kind == "chisq1") {
      c.reference.kind = ReferenceSpec::Kind::ChiSq1;
    } else if (kind == "mixture") {
      c.reference.kind = ReferenceSpec::Kind::Mixture;
      c.reference.sigma_source = rj.value("sigma", "constant") == std::string("model")
                                     ? ReferenceSpec::SigmaSource::Model
                                     : ReferenceSpec::SigmaSource::Constant;
      c.reference.sigma_value = rj.value("sigma_value", 1.0);
      c.reference.draws = rj.value("draws", 100000ULL);
    } else {
      throw ConfigError("unknown reference kind: " + kind);
    }
  }
  c.ks_threshold = j.value("ks_threshold", 0.0);
  c.threads = j.value("threads", 0);
  return c;
}

json mixture_to_json(const MixtureLaw& law) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["alphas"] = law.alphas;
  j["variance"] = law.variance;
  j["truncated"] = law.truncated;
  j["source"] = law.source;
  return j;
}

namespace {

json summary_to_json(const SampleSummary& s) {
  return {{"n", s.n},     {"mean", s.mean}, {"sd", s.sd},     {"min", s.min},
          {"q01", s.q01}, {"q05", s.q05},   {"q25", s.q25},   {"median", s.median},
          {"q75", s.q75}, {"q95", s.q95},   {"q99", s.q99},   {"max", s.max}};
}

}  // namespace

json report_to_json(const McReport& rep, bool include_timing) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["statistic"] = rep.statistic;
  j["n"] = rep.n;
  j["reps"] = rep.reps;
  j["root_seed"] = rep.root_seed;
  j["config_hash"] = rep.config_hash;
  j["raw_summary"] = summary_to_json(rep.raw_summary);
  j["summary"] = summary_to_json(rep.summary);
  if (rep.ks) {
    j["ks"] = {{"statistic", rep.ks->statistic},
               {"ref_bar", rep.ks->ref_bar},
               {"n_eff", rep.ks->n_eff}};
  }
  if (rep.pass) j["pass"] = *rep.pass;
  j["threshold"] = rep.threshold;
  if (!rep.sample_b.empty()) j["pair_covariance"] = rep.pair_covariance;
  if (include_timing) j["runtime_ms"] = rep.runtime_ms;
  return j;
}

json load_section(const std::string& path, const std::string& section) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("JSON parse error in " + path + ": " + e.what());
  }
  if (j.contains("schema_version")) {
    const int v = j.at("schema_version").get<int>();
    if (v != kSchemaVersion) {
      throw ConfigError("unsupported schema_version " + std::to_string(v) + " in " + path);
    }
  }
  if (j.contains(section)) return j.at(section);
  return j;
}

}  // namespace vstatns::config
