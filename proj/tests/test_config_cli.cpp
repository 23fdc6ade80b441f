#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "vstatns/common.hpp"
#include "vstatns/config.hpp"
#include "vstatns/csvio.hpp"
#include "vstatns/pls.hpp"
#include "vstatns/vstat.hpp"

using namespace vstatns;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

struct CliResult {
  int exit_code;
  std::string stderr_text;
};

CliResult run_cli(const std::string& args) {
  const std::string err_file = std::string(TEST_TMPDIR) + "/stderr.txt";
  const std::string cmd = std::string(VSTATNS_CLI) + " " + args + " 2>" + err_file;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.stderr_text = ss.str();
  return r;
}

std::string tmp(const std::string& name) { return std::string(TEST_TMPDIR) + "/" + name; }

const char* kModelJson = R"({
  "schema_version": 1,
  "model": {
    "breaks": [],
    "innovation": {"kind": "normal"},
    "segments": [{"kind": "tvma", "coeffs": [{"family": "constant", "c": 1.0}]}]
  }
})";

const char* kWeightsJson = R"({
  "schema_version": 1,
  "weights": {"family": "global", "f": {"family": "constant", "c": 1.0}}
})";

}  // namespace

TEST_CASE("model JSON round trip") {
  PlsModel m({0.3, 0.7},
             {SegmentFilter::tv_ma({Curve::constant(1.0), Curve::cosine(0.2, 0.1, 2.0, 0.5)}),
              SegmentFilter::tv_ar1(Curve::linear(0.1, 0.3)),
              SegmentFilter::tv_ma({Curve::sqrt_linear(1.0, 1.0)})},
             Innovation{Innovation::Kind::Uniform}, 64);
  const json j = config::model_to_json(m);
  PlsModel back = config::model_from_json(j);
  CHECK(config::model_to_json(back) == j);
  SeriesPath a = simulate(m, 100, 3);
  SeriesPath b = simulate(back, 100, 3);
  CHECK(a.values == b.values);
}

TEST_CASE("weight spec JSON round trip") {
  for (const WeightSpec& spec :
       {WeightSpec::global(Surface::one_plus_ts(2.0)),
        WeightSpec::local_kernel({SmoothKernel::Kind::Biweight}, 0.2, 0.4),
        WeightSpec::banded_toeplitz(DecayFn::gaussian(), 9.0),
        WeightSpec::explicit_matrix({0.0, 1.0, 1.0, 0.0}, 2)}) {
    const json j = config::weights_to_json(spec);
    CHECK(config::weights_to_json(config::weights_from_json(j)) == j);
  }
}

TEST_CASE("mc config JSON round trip") {
  McConfig c{.model = PlsModel({}, {SegmentFilter::tv_ar1(Curve::constant(0.4))})};
  c.weights = WeightSpec::banded_toeplitz(DecayFn::exp_decay(), 9.0);
  c.statistic = Statistic::Q;
  c.n = 500;
  c.reps = 250;
  c.root_seed = 99;
  c.standardize.center = Standardization::Mode::Empirical;
  c.standardize.scale = Standardization::Mode::Empirical;
  c.reference.kind = ReferenceSpec::Kind::Normal;
  c.ks_threshold = 0.08;
  const json j = config::mc_to_json(c);
  CHECK(config::mc_to_json(config::mc_from_json(j)) == j);
}

TEST_CASE("full-precision CSV round trip") {
  for (double x : {1.0 / 3.0, 3.141592653589793e17, -2.2250738585072014e-308, 0.1 + 0.2}) {
    const std::string s = format_full(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  SeriesPath p;
  p.values = {1.0 / 3.0, -7.000000000000001, 1e-17};
  const std::string csv = series_to_csv(p);
  spit(tmp("series_rt.csv"), csv);
  SeriesPath back = series_from_csv_file(tmp("series_rt.csv"));
  CHECK(back.values == p.values);
}

TEST_CASE("cli: simulate writes n rows plus a manifest, deterministically") {
  spit(tmp("model.json"), kModelJson);
  const std::string out1 = tmp("path1.csv"), out2 = tmp("path2.csv");
  CHECK(run_cli("simulate --model " + tmp("model.json") + " --n 5 --seed 7 --out " + out1)
            .exit_code == 0);
  CHECK(run_cli("simulate --model " + tmp("model.json") + " --n 5 --seed 7 --out " + out2)
            .exit_code == 0);
  const std::string c1 = slurp(out1), c2 = slurp(out2);
  CHECK(c1 == c2);
  CHECK(fnv1a64_hex(c1) == fnv1a64_hex(c2));
  int rows = -1;  // header
  std::stringstream ss(c1);
  std::string line;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == 5);
  const json manifest = json::parse(slurp(out1 + ".manifest.json"));
  CHECK(manifest.at("output").at("fnv1a64").get<std::string>() == fnv1a64_hex(c1));
  CHECK(manifest.at("subcommand") == "simulate");
}

TEST_CASE("cli: series CSV round trips through vstat/quad bit-for-bit") {
  spit(tmp("model.json"), kModelJson);
  spit(tmp("weights.json"), kWeightsJson);
  const std::string series = tmp("series.csv");
  REQUIRE(run_cli("simulate --model " + tmp("model.json") + " --n 40 --seed 3 --out " + series)
              .exit_code == 0);

  // In-process value with the same inputs.
  const PlsModel model = config::model_from_json(json::parse(kModelJson).at("model"));
  const SeriesPath path = simulate(model, 40, 3);
  const WeightMatrix w = build_weight_matrix(WeightSpec::global(Surface::constant(1.0)), 40);
  const double q_direct = evaluate_Q(path, w);

  REQUIRE(run_cli("quad --series " + series + " --weights " + tmp("weights.json") + " --out " +
                  tmp("q.json"))
              .exit_code == 0);
  const json qj = json::parse(slurp(tmp("q.json")));
  CHECK(qj.at("Q").get<double>() == q_direct);

  REQUIRE(run_cli("vstat --series " + series + " --weights " + tmp("weights.json") +
                  " --kernel product --out " + tmp("v.json"))
              .exit_code == 0);
  CHECK(json::parse(slurp(tmp("v.json"))).at("V").get<double>() == q_direct);
}

TEST_CASE("cli: malformed config exits 2 with machine-readable stderr") {
  spit(tmp("broken.json"), "{ not json");
  CliResult r = run_cli("simulate --model " + tmp("broken.json") + " --n 5 --out " + tmp("x.csv"));
  CHECK(r.exit_code == 2);
  const json err = json::parse(r.stderr_text);
  CHECK(err.at("error").at("code") == 2);
}

TEST_CASE("cli: unknown flags are errors") {
  CliResult r = run_cli("simulate --frobnicate 1");
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli: --help enumerates every subcommand") {
  const std::string help_file = tmp("help.txt");
  const int status = std::system((std::string(VSTATNS_CLI) + " --help > " + help_file).c_str());
  CHECK(WEXITSTATUS(status) == 0);
  const std::string help = slurp(help_file);
  for (const char* sub : {"simulate", "vstat", "quad", "estimate", "spectrum",
                          "diagnose-weights", "mixture", "mc"}) {
    CHECK(help.find(sub) != std::string::npos);
  }
}

TEST_CASE("cli: mc subcommand reproduces byte-identical reports across threads") {
  spit(tmp("model.json"), kModelJson);
  json mc;
  mc["schema_version"] = 1;
  mc["mc"] = {{"model", json::parse(kModelJson).at("model")},
              {"weights", json::parse(kWeightsJson).at("weights")},
              {"statistic", "Q"},
              {"n", 48},
              {"reps", 150},
              {"root_seed", 21},
              {"standardization", {{"center", "empirical"}, {"scale", "empirical"}}},
              {"reference", {{"kind", "normal"}}}};
  spit(tmp("mc.json"), mc.dump());
  REQUIRE(run_cli("--threads 1 mc --config " + tmp("mc.json") + " --out " + tmp("r1.json"))
              .exit_code == 0);
  REQUIRE(run_cli("--threads 4 mc --config " + tmp("mc.json") + " --out " + tmp("r4.json"))
              .exit_code == 0);
  CHECK(slurp(tmp("r1.json")) == slurp(tmp("r4.json")));
}

TEST_CASE("cli: estimate and spectrum produce plot-ready CSV") {
  spit(tmp("model.json"), kModelJson);
  const std::string series = tmp("series_est.csv");
  REQUIRE(run_cli("simulate --model " + tmp("model.json") + " --n 400 --seed 5 --out " + series)
              .exit_code == 0);
  REQUIRE(run_cli("estimate --series " + series + " --kernel variance --t 0.5 --b 0.2 --model " +
                  tmp("model.json") + " --level 0.95 --out " + tmp("est.json"))
              .exit_code == 0);
  const json ej = json::parse(slurp(tmp("est.json")));
  CHECK(ej.contains("theta_hat"));
  CHECK(ej.contains("ci"));
  REQUIRE(run_cli("spectrum --series " + series + " --smooth-m 8 --out " + tmp("spec.csv"))
              .exit_code == 0);
  const std::string csv = slurp(tmp("spec.csv"));
  CHECK(csv.rfind("lambda,I,f_tilde", 0) == 0);
}

TEST_CASE("cli: diagnose-weights and mixture emit JSON records") {
  spit(tmp("weights.json"), kWeightsJson);
  REQUIRE(run_cli("diagnose-weights --weights " + tmp("weights.json") +
                  " --n 64 --l 16 --m 4 --theta1 --out " + tmp("diag.json"))
              .exit_code == 0);
  const json dj = json::parse(slurp(tmp("diag.json")));
  CHECK(dj.at("Wsup").get<double>() == doctest::Approx(64.0));
  CHECK(dj.at("theta1").get<double>() == doctest::Approx(1.0));

  REQUIRE(run_cli("mixture --weights " + tmp("weights.json") +
                  " --n 32 --sample 500 --sample-out " + tmp("mix.csv") + " --out " +
                  tmp("mix.json"))
              .exit_code == 0);
  const json mj = json::parse(slurp(tmp("mix.json")));
  CHECK(mj.at("alphas").size() == 1);
}

TEST_CASE("load_section rejects unknown schema versions") {
  spit(tmp("v9.json"), R"({"schema_version": 9, "model": {}})");
  CHECK_THROWS_AS(config::load_section(tmp("v9.json"), "model"), ConfigError);
}
