// vstatns command line tool: simulation, V-statistic evaluation, local
// linear estimation, spectral estimation, weight diagnostics, mixture
// laws and Monte Carlo validation runs, with reproducible manifests.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include "vstatns/config.hpp"
#include "vstatns/csvio.hpp"
#include "vstatns/estimators.hpp"
#include "vstatns/kernel_h.hpp"
#include "vstatns/limit_laws.hpp"
#include "vstatns/mc.hpp"
#include "vstatns/spectral.hpp"
#include "vstatns/vstat.hpp"
#include "vstatns/weights.hpp"

namespace {

using nlohmann::json;
using namespace vstatns;

constexpr const char* kVersion = "0.1.0";
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct OutputSink {
  std::string subcommand;
  json resolved_config;
  std::uint64_t root_seed = 0;
  std::vector<std::pair<std::string, std::string>> files;  // path, content

  void add(const std::string& path, const std::string& content) {
    files.emplace_back(path, content);
  }

  /// Writes every output atomically plus one manifest per file.
  void commit() const {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const double wall = std::chrono::duration<double>(now).count();
    for (const auto& [path, content] : files) {
      write_file_atomic(path, content);
      json manifest;
      manifest["schema_version"] = config::kSchemaVersion;
      manifest["subcommand"] = subcommand;
      manifest["config"] = resolved_config;
      manifest["root_seed"] = root_seed;
      manifest["library_version"] = kVersion;
      manifest["wall_clock_unix"] = wall;
      manifest["output"] = {{"path", path},
                            {"bytes", content.size()},
                            {"fnv1a64", fnv1a64_hex(content)}};
      write_file_atomic(path + ".manifest.json", manifest.dump(2) + "\n");
    }
  }
};

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("VSTATNS_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // library default: hardware concurrency
}

json weight_diag_to_json(const WeightDiagnostics& d) {
  json j;
  j["schema_version"] = config::kSchemaVersion;
  j["Wsup"] = d.Wsup;
  j["Wsub"] = d.Wsub;
  j["Delta"] = d.Delta;
  j["V_script"] = d.V_script;
  j["a7_local_sum"] = d.a7_local_sum;
  j["a7_window"] = d.a7_window;
  j["max_row_abs_sum"] = *std::max_element(d.row_abs_sums.begin(), d.row_abs_sums.end());
  if (d.theta1) j["theta1"] = *d.theta1;
  if (d.a3_requested) {
    j["a3"] = {{"A", d.A}, {"a", d.a}, {"sum_a_ratio", d.sum_a_ratio},
               {"max_A_ratio", d.max_A_ratio}};
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted V-statistics for piecewise locally stationary time series"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  int threads_flag = 0;
  app.add_option("--threads", threads_flag,
                 "worker threads (default: all cores; env VSTATNS_THREADS)");

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "simulate a PLS path to CSV");
  std::string sim_model, sim_out;
  std::size_t sim_n = 0;
  std::uint64_t sim_seed = 1;
  sim->add_option("--model", sim_model, "model config JSON")->required();
  sim->add_option("--n", sim_n, "sample size")->required();
  sim->add_option("--seed", sim_seed, "root seed");
  sim->add_option("--out", sim_out, "output CSV path")->required();

  // ---- vstat / quad ----
  auto* vst = app.add_subcommand("vstat", "evaluate V_n, optionally with decomposition");
  std::string v_series, v_weights, v_kernel = "variance", v_model, v_out;
  bool v_decompose = false, v_no_diagonal = false;
  vst->add_option("--series", v_series, "series CSV")->required();
  vst->add_option("--weights", v_weights, "weight spec JSON")->required();
  vst->add_option("--kernel", v_kernel,
                  "kernel name: variance|product|mean_square|mean_identity|mean_abs");
  vst->add_option("--model", v_model, "model config JSON (binds analytic oracles)");
  vst->add_flag("--decompose", v_decompose, "also emit the Hoeffding decomposition");
  vst->add_flag("--u-stat", v_no_diagonal, "exclude the diagonal (U-statistic variant)");
  vst->add_option("--out", v_out, "output JSON path")->required();

  auto* quad = app.add_subcommand("quad", "evaluate the quadratic form Q_n");
  std::string q_series, q_weights, q_out;
  quad->add_option("--series", q_series, "series CSV")->required();
  quad->add_option("--weights", q_weights, "weight spec JSON")->required();
  quad->add_option("--out", q_out, "output JSON path")->required();

  // ---- estimate ----
  auto* est = app.add_subcommand("estimate", "local linear estimation of theta(t*)");
  std::string e_series, e_kernel = "variance", e_K = "epanechnikov", e_out, e_model;
  double e_b = 0.0, e_t = 0.5, e_level = 0.0;
  std::string e_grid;
  est->add_option("--series", e_series, "series CSV")->required();
  est->add_option("--kernel", e_kernel, "kernel name");
  est->add_option("--K", e_K, "smoothing kernel in class K");
  est->add_option("--b", e_b, "bandwidth b_n (default n^{-1/5})");
  est->add_option("--t", e_t, "estimation point t*");
  est->add_option("--t-grid", e_grid, "grid a:b:steps for a theta curve CSV");
  est->add_option("--model", e_model, "model config JSON (enables bias/sd/CI)");
  est->add_option("--level", e_level, "confidence level, needs --model");
  est->add_option("--out", e_out, "output path (JSON for --t, CSV for --t-grid)")->required();

  // ---- spectrum ----
  auto* spec = app.add_subcommand("spectrum", "periodogram and smoothed periodogram CSV");
  std::string s_series, s_K = "epanechnikov", s_out;
  int s_m = 0, s_grid = 0;
  spec->add_option("--series", s_series, "series CSV")->required();
  spec->add_option("--grid", s_grid, "evaluate on g+1 even frequencies in [0,pi] "
                                     "(default: Fourier grid)");
  spec->add_option("--smooth-m", s_m, "smoothing window m (0 = periodogram only)");
  spec->add_option("--smooth-K", s_K, "smoothing kernel");
  spec->add_option("--out", s_out, "output CSV path")->required();

  // ---- diagnose-weights ----
  auto* diag = app.add_subcommand("diagnose-weights", "weight matrix functionals JSON");
  std::string d_weights, d_out;
  std::size_t d_n = 0, d_l = 0, d_m = 0;
  bool d_theta = false;
  std::string d_csv;
  diag->add_option("--weights", d_weights, "weight spec JSON")->required();
  diag->add_option("--n", d_n, "matrix size")->required();
  diag->add_option("--l", d_l, "big block length l_n for the a3 block report");
  diag->add_option("--m", d_m, "small block length m_n for the a3 block report");
  diag->add_flag("--theta1", d_theta, "also compute the extreme eigenvalue");
  diag->add_option("--export-csv", d_csv, "also write the full matrix entries as CSV");
  diag->add_option("--out", d_out, "output JSON path")->required();

  // ---- mixture ----
  auto* mix = app.add_subcommand("mixture", "chi-square mixture law of a Gaussian quadratic form");
  std::string m_weights, m_model, m_out, m_sample_out;
  std::size_t m_n = 0, m_sample = 0;
  double m_sigma_const = 1.0;
  std::uint64_t m_seed = 1;
  mix->add_option("--weights", m_weights, "weight spec JSON")->required();
  mix->add_option("--n", m_n, "matrix size")->required();
  mix->add_option("--sigma-model", m_model, "model JSON for sigma~(t_j) (default constant)");
  mix->add_option("--sigma-const", m_sigma_const, "constant sigma~ value");
  mix->add_option("--sample", m_sample, "also draw this many mixture samples");
  mix->add_option("--sample-out", m_sample_out, "CSV path for the sample");
  mix->add_option("--seed", m_seed, "sampling seed");
  mix->add_option("--out", m_out, "output JSON path")->required();

  // ---- mc ----
  auto* mc = app.add_subcommand("mc", "Monte Carlo replication run from a config");
  std::string mc_config, mc_out, mc_sample_out;
  bool mc_timing = false;
  mc->add_option("--config", mc_config, "mc config JSON")->required();
  mc->add_option("--out", mc_out, "report JSON path")->required();
  mc->add_option("--sample-out", mc_sample_out, "CSV path for the replication sample");
  mc->add_flag("--timing", mc_timing, "include wall-clock runtime in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    json err = {{"error", {{"code", kExitUsage}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return kExitUsage;
  }

  try {
    const int threads = resolve_threads(threads_flag);

    if (sim->parsed()) {
      const json mj = config::load_section(sim_model, "model");
      const PlsModel model = config::model_from_json(mj);
      const SeriesPath path = simulate(model, sim_n, sim_seed);
      OutputSink sink{"simulate", {{"model", mj}, {"n", sim_n}}, sim_seed, {}};
      sink.add(sim_out, series_to_csv(path));
      sink.commit();
      return 0;
    }

    if (vst->parsed()) {
      const SeriesPath series = series_from_csv_file(v_series);
      const json wj = config::load_section(v_weights, "weights");
      const WeightMatrix w = build_weight_matrix(config::weights_from_json(wj), series.size());
      json out;
      out["schema_version"] = config::kSchemaVersion;
      out["kernel"] = v_kernel;
      if (v_decompose) {
        if (v_model.empty()) {
          throw UnsupportedError("--decompose needs --model to bind the analytic oracles");
        }
        const PlsModel model = config::model_from_json(config::load_section(v_model, "model"));
        const KernelH kernel = kernel_from_name(v_kernel, model, series.size());
        const Decomposition d = hoeffding_decompose(series, w, kernel);
        out["V"] = d.V;
        out["N"] = d.N;
        out["D_centered"] = d.D_centered;
        out["EV"] = d.EV;
        out["oracle"] = d.oracle;
      } else {
        const KernelH kernel = kernel_from_name(v_kernel);
        out["V"] = evaluate_V(series, w, kernel, !v_no_diagonal);
      }
      OutputSink sink{"vstat", {{"weights", wj}, {"kernel", v_kernel}}, 0, {}};
      sink.add(v_out, out.dump(2) + "\n");
      sink.commit();
      return 0;
    }

    if (quad->parsed()) {
      const SeriesPath series = series_from_csv_file(q_series);
      const json wj = config::load_section(q_weights, "weights");
      const WeightMatrix w = build_weight_matrix(config::weights_from_json(wj), series.size());
      json out = {{"schema_version", config::kSchemaVersion}, {"Q", evaluate_Q(series, w)}};
      OutputSink sink{"quad", {{"weights", wj}}, 0, {}};
      sink.add(q_out, out.dump(2) + "\n");
      sink.commit();
      return 0;
    }

    if (est->parsed()) {
      const SeriesPath series = series_from_csv_file(e_series);
      const KernelH kernel = kernel_from_name(e_kernel);
      const SmoothKernel K = SmoothKernel::from_name(e_K);
      const double b = e_b > 0.0 ? e_b : std::pow(static_cast<double>(series.size()), -0.2);
      std::optional<PlsModel> model;
      if (!e_model.empty()) {
        model = config::model_from_json(config::load_section(e_model, "model"));
      }
      auto estimate_at = [&](double t_star) {
        ThetaEstimate th = local_linear_theta(series, kernel, K, b, t_star);
        if (model) {
          th.bias_hat = asymptotic_bias(*model, e_kernel, t_star, b, K);
          th.sd_hat = asymptotic_sd(*model, e_kernel, t_star, b, K, series.size());
          if (e_level > 0.0) th = confidence_interval(th, e_level);
        }
        return th;
      };
      OutputSink sink{"estimate", {{"kernel", e_kernel}, {"K", e_K}, {"b", b}}, 0, {}};
      if (e_grid.empty()) {
        const ThetaEstimate th = estimate_at(e_t);
        json out;
        out["schema_version"] = config::kSchemaVersion;
        out["theta_hat"] = th.theta_hat;
        out["slope_t"] = th.slope_t;
        out["slope_s"] = th.slope_s;
        out["t_star"] = th.t_star;
        out["bandwidth"] = th.bandwidth;
        if (th.bias_hat) out["bias_hat"] = *th.bias_hat;
        if (th.sd_hat) out["sd_hat"] = *th.sd_hat;
        if (th.ci) {
          out["ci"] = {th.ci->first, th.ci->second};
          out["ci_level"] = th.ci_level;
        }
        sink.add(e_out, out.dump(2) + "\n");
      } else {
        double ga = 0, gb = 0;
        int steps = 0;
        if (std::sscanf(e_grid.c_str(), "%lf:%lf:%d", &ga, &gb, &steps) != 3 || steps < 1) {
          throw ConfigError("--t-grid expects a:b:steps");
        }
        std::string csv = "t_star,theta_hat,slope_t,slope_s\n";
        for (int i = 0; i <= steps; ++i) {
          const double t = ga + (gb - ga) * i / std::max(1, steps);
          const ThetaEstimate th = estimate_at(t);
          csv += format_full(t) + "," + format_full(th.theta_hat) + "," +
                 format_full(th.slope_t) + "," + format_full(th.slope_s) + "\n";
        }
        sink.add(e_out, csv);
      }
      sink.commit();
      return 0;
    }

    if (spec->parsed()) {
      const SeriesPath series = series_from_csv_file(s_series);
      const SmoothKernel K = SmoothKernel::from_name(s_K);
      std::vector<double> grid, ordinates;
      if (s_grid > 0) {
        for (int i = 0; i <= s_grid; ++i) {
          grid.push_back(kPi * i / s_grid);
          ordinates.push_back(periodogram_at(series, grid.back()));
        }
      } else {
        const SpectralEstimate pe = periodogram(series);
        grid = pe.lambda_grid;
        ordinates = pe.I_values;
      }
      std::string csv = s_m > 0 ? "lambda,I,f_tilde\n" : "lambda,I\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        csv += format_full(grid[i]) + "," + format_full(ordinates[i]);
        if (s_m > 0) {
          csv += "," + format_full(smoothed_periodogram(series, grid[i], K, s_m));
        }
        csv += "\n";
      }
      OutputSink sink{"spectrum", {{"smooth_m", s_m}, {"smooth_K", s_K}, {"grid", s_grid}}, 0, {}};
      sink.add(s_out, csv);
      sink.commit();
      return 0;
    }

    if (diag->parsed()) {
      const json wj = config::load_section(d_weights, "weights");
      const WeightMatrix w = build_weight_matrix(config::weights_from_json(wj), d_n);
      const WeightDiagnostics dg = diagnostics(w, A3Blocks{d_l, d_m}, nullptr, d_theta);
      OutputSink sink{"diagnose-weights", {{"weights", wj}, {"n", d_n}}, 0, {}};
      sink.add(d_out, weight_diag_to_json(dg).dump(2) + "\n");
      if (!d_csv.empty()) {
        std::string csv = "j,k,w\n";
        for (std::size_t j = 0; j < d_n; ++j) {
          for (std::size_t k = 0; k < d_n; ++k) {
            csv += std::to_string(j + 1) + "," + std::to_string(k + 1) + "," +
                   format_full(w.at(j, k)) + "\n";
          }
        }
        sink.add(d_csv, csv);
      }
      sink.commit();
      return 0;
    }

    if (mix->parsed()) {
      const json wj = config::load_section(m_weights, "weights");
      const WeightMatrix w = build_weight_matrix(config::weights_from_json(wj), m_n);
      std::vector<double> sigma(m_n, m_sigma_const);
      if (!m_model.empty()) {
        const PlsModel model = config::model_from_json(config::load_section(m_model, "model"));
        sigma = long_run_sd_curve(model, m_n);
      }
      const MixtureLaw law = quadform_mixture(w, sigma);
      OutputSink sink{"mixture", {{"weights", wj}, {"n", m_n}}, m_seed, {}};
      sink.add(m_out, config::mixture_to_json(law).dump(2) + "\n");
      if (m_sample > 0) {
        require(!m_sample_out.empty(), "--sample needs --sample-out");
        sink.add(m_sample_out, sample_to_csv(sample_mixture(law, m_sample, m_seed), "value"));
      }
      sink.commit();
      return 0;
    }

    if (mc->parsed()) {
      const json cj = config::load_section(mc_config, "mc");
      McConfig cfg = config::mc_from_json(cj);
      if (threads > 0) cfg.threads = threads;
      const McReport rep = vstatns::run(cfg);
      OutputSink sink{"mc", cj, cfg.root_seed, {}};
      sink.add(mc_out, config::report_to_json(rep, mc_timing).dump(2) + "\n");
      if (!mc_sample_out.empty()) {
        std::string csv = "rep,raw,standardized\n";
        for (std::size_t i = 0; i < rep.raw_sample.size(); ++i) {
          csv += std::to_string(i) + "," + format_full(rep.raw_sample[i]) + "," +
                 format_full(rep.sample[i]) + "\n";
        }
        sink.add(mc_sample_out, csv);
      }
      sink.commit();
      return 0;
    }

    json err = {{"error", {{"code", kExitUsage}, {"message", "no subcommand"}}}};
    std::cerr << err.dump() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    json err = {{"error", {{"code", kExitUsage}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    json err = {{"error", {{"code", kExitNumeric}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    json err = {{"error", {{"code", kExitNumeric}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return kExitNumeric;
  }
}
