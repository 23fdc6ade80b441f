#pragma once

#include <string>

#include "vstatns/kernel_h.hpp"
#include "vstatns/pls.hpp"
#include "vstatns/weights.hpp"

namespace vstatns {

/// Exact Hoeffding split of a weighted V-statistic. With the pair-mean
/// oracle c_kj = E[H(X_k*, X_j*)] over independent copies,
///   V - EV = 2 N + D_centered
/// holds as an algebraic identity; each field is accumulated by its own
/// summation route so the identity is a genuine cross-check.
struct Decomposition {
  double V = 0;
  double N = 0;
  double D_centered = 0;
  double EV = 0;
  bool has_EV = false;
  std::string oracle;  // provenance of the marginal/pair-mean oracles
};

/// V_n = sum_{k,j} W_n(t_k,t_j) H(X_k, X_j), full double sum including the
/// diagonal. Symmetry is exploited (diagonal + twice the upper triangle)
/// with compensated accumulation in a fixed k-major order.
/// include_diagonal=false gives the U-statistic variant.
double evaluate_V(const SeriesPath& series, const WeightMatrix& w, const KernelH& kernel,
                  bool include_diagonal = true);

/// Q_n = sum_{j,k} W_n(t_j,t_k) X_j X_k. Mirrors evaluate_V's accumulation
/// order exactly, so it agrees bit-for-bit with the product kernel.
double evaluate_Q(const SeriesPath& series, const WeightMatrix& w);

Decomposition hoeffding_decompose(const SeriesPath& series, const WeightMatrix& w,
                                  const KernelH& kernel);

}  // namespace vstatns
