#include "vstatns/vstat.hpp"

#include <cmath>

#include "vstatns/common.hpp"

namespace vstatns {

namespace {

[[noreturn]] void nonfinite_kernel(std::size_t k, std::size_t j) {
  throw NumericError("nonfinite kernel value at (k,j)=(" + std::to_string(k + 1) + "," +
                     std::to_string(j + 1) + ")");
}

void check_shapes(const SeriesPath& series, const WeightMatrix& w) {
  require(series.size() >= 2, "series needs n >= 2");
  require(series.size() == w.size(), "series length and weight matrix size disagree");
}

}  // namespace

double evaluate_V(const SeriesPath& series, const WeightMatrix& w, const KernelH& kernel,
                  bool include_diagonal) {
  check_shapes(series, w);
  const std::size_t n = series.size();
  const std::vector<double>& x = series.values;
  KahanSum acc;
  for (std::size_t k = 0; k < n; ++k) {
    if (include_diagonal) {
      const double h = kernel.eval(x[k], x[k]);
      if (!std::isfinite(h)) nonfinite_kernel(k, k);
      acc.add(w.at(k, k) * h);
    }
    for (std::size_t j = k + 1; j < n; ++j) {
      const double h = kernel.eval(x[k], x[j]);
      if (!std::isfinite(h)) nonfinite_kernel(k, j);
      acc.add(2.0 * (w.at(k, j) * h));
    }
  }
  return acc.value();
}

double evaluate_Q(const SeriesPath& series, const WeightMatrix& w) {
  check_shapes(series, w);
  const std::size_t n = series.size();
  const std::vector<double>& x = series.values;
  KahanSum acc;
  for (std::size_t k = 0; k < n; ++k) {
    acc.add(w.at(k, k) * (x[k] * x[k]));
    for (std::size_t j = k + 1; j < n; ++j) {
      acc.add(2.0 * (w.at(k, j) * (x[k] * x[j])));
    }
  }
  return acc.value();
}

Decomposition hoeffding_decompose(const SeriesPath& series, const WeightMatrix& w,
                                  const KernelH& kernel) {
  check_shapes(series, w);
  if (!kernel.has_oracles()) {
    throw UnsupportedError("hoeffding_decompose needs marginal and pair-mean oracles on kernel '" +
                           kernel.name + "'");
  }
  const std::size_t n = series.size();
  const std::vector<double>& x = series.values;

  Decomposition d;
  d.oracle = "analytic";
  d.V = evaluate_V(series, w, kernel);

  // N_n = sum_{k,j} W(t_k,t_j) { H_j(X_k) - E[H_j(X_k)] }, E[H_j(X_k)] = c_kj.
  {
    KahanSum acc;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        acc.add(w.at(k, j) * (kernel.marginal(j, x[k]) - kernel.pair_mean(k, j)));
      }
    }
    d.N = acc.value();
  }

  // Degenerate part, pairwise: H - H_j(X_k) - H_k(X_j) + c_kj is symmetric.
  {
    KahanSum acc;
    for (std::size_t k = 0; k < n; ++k) {
      {
        const double term = kernel.eval(x[k], x[k]) - 2.0 * kernel.marginal(k, x[k]) +
                            kernel.pair_mean(k, k);
        acc.add(w.at(k, k) * term);
      }
      for (std::size_t j = k + 1; j < n; ++j) {
        const double term = kernel.eval(x[k], x[j]) - kernel.marginal(j, x[k]) -
                            kernel.marginal(k, x[j]) + kernel.pair_mean(k, j);
        acc.add(2.0 * (w.at(k, j) * term));
      }
    }
    d.D_centered = acc.value();
  }

  // E V under the independent-copies convention.
  {
    KahanSum acc;
    for (std::size_t k = 0; k < n; ++k) {
      acc.add(w.at(k, k) * kernel.pair_mean(k, k));
      for (std::size_t j = k + 1; j < n; ++j) {
        acc.add(2.0 * (w.at(k, j) * kernel.pair_mean(k, j)));
      }
    }
    d.EV = acc.value();
    d.has_EV = true;
  }
  return d;
}

}  // namespace vstatns
