#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vstatns/curves.hpp"
#include "vstatns/kernels1d.hpp"

namespace vstatns {

/// Construction recipe for a weight matrix W_n(t_j, t_k), t_j = j/n.
struct WeightSpec {
  enum class Family {
    GlobalFunction,  // f(t,s)/n
    LocalKernel,     // K((t-c)/b) K((s-c)/b) / (n b), or general g(.,.)/(n b)
    BandedToeplitz,  // sqrt(m) h(|t-s| m) / n
    Explicit,        // user matrix
  };

  Family family = Family::GlobalFunction;

  Surface f = Surface::constant(1.0);

  SmoothKernel K{SmoothKernel::Kind::Epanechnikov};
  double bandwidth = 0.1;
  double center = 0.5;
  std::optional<Surface> g;  // overrides the product form when present

  DecayFn h = DecayFn::exp_decay();
  double m = 0.0;

  std::vector<double> explicit_entries;  // row-major n x n
  std::size_t explicit_n = 0;

  void validate() const;

  static WeightSpec global(Surface f);
  static WeightSpec local_kernel(SmoothKernel K, double bandwidth, double center);
  static WeightSpec banded_toeplitz(DecayFn h, double m);
  static WeightSpec explicit_matrix(std::vector<double> entries, std::size_t n);
};

/// Symmetric n x n weight array. Dense families store every entry
/// (evaluated once per unordered pair, so symmetry is exact); the
/// BandedToeplitz family stores the first row and synthesizes entries.
class WeightMatrix {
 public:
  static constexpr std::size_t kDenseCap = 16384;

  std::size_t size() const { return n_; }
  bool toeplitz() const { return toeplitz_; }
  const WeightSpec& spec() const { return spec_; }

  double at(std::size_t j, std::size_t k) const {
    if (toeplitz_) return vals_[j >= k ? j - k : k - j];
    return vals_[j * n_ + k];
  }
  double operator()(std::size_t j, std::size_t k) const { return at(j, k); }

  double row_abs_sum(std::size_t j) const;
  double trace() const;
  double frobenius_sq() const;
  void matvec(const std::vector<double>& x, std::vector<double>& y) const;
  /// In-place scaling of every stored entry (exact per-entry multiply).
  void scale(double c);

  friend WeightMatrix build_weight_matrix(const WeightSpec&, std::size_t);

 private:
  std::size_t n_ = 0;
  bool toeplitz_ = false;
  std::vector<double> vals_;
  WeightSpec spec_;
};

WeightMatrix build_weight_matrix(const WeightSpec& spec, std::size_t n);

/// Big/small block partition sizes for the block report; zero means skip.
struct A3Blocks {
  std::size_t l = 0;  // big-block length l_n
  std::size_t m = 0;  // small-block length m_n
};

struct WeightDiagnostics {
  std::vector<double> row_abs_sums;  // W_{j,.}
  double Wsup = 0;                   // W^(n) = sum_j W_{j,.}^2
  double Wsub = 0;                   // W_(n) = sum_{j,k} W^2
  double Delta = 0;                  // sum |W| f_n with the Lipschitz estimate
  double V_script = 0;               // row-difference smoothness functional
  double a7_local_sum = 0;           // near-diagonal deviation sum
  std::size_t a7_window = 0;         // ceil(log^{1.1} n)
  std::optional<double> theta1;

  bool a3_requested = false;
  std::vector<double> A, a;          // big/small block sums of squared row sums
  double sum_a_ratio = 0;            // sum_j a_j / W^(n)
  double max_A_ratio = 0;            // max_j A_j / W^(n)
};

/// Computes every scalar functional by direct summation. lipschitz_f
/// defaults to the per-entry unit-index-step finite difference
/// max(|W(t_{j+1},t_k)-W(t_j,t_k)|, |W(t_j,t_{k+1})-W(t_j,t_k)|),
/// the empirical unit-index-step Lipschitz envelope.
WeightDiagnostics diagnostics(const WeightMatrix& w, A3Blocks blocks = {},
                              std::function<double(std::size_t, std::size_t)> lipschitz_f = nullptr,
                              bool with_theta1 = false, double eig_tol = 1e-8);

struct EigenResult {
  double theta1 = 0;                          // eigenvalue of largest |.|
  std::size_t iterations = 0;                 // 0 for the full decomposition path
  std::optional<std::vector<double>> spectrum;  // ascending, full path only
};

/// theta_{n,1} via a full symmetric decomposition for n <= 2048 (the whole
/// spectrum is exposed), power iteration on W^2 above. The Gershgorin
/// bound |theta_1| <= max_j W_{j,.} is asserted on every call.
EigenResult max_abs_eigenvalue(const WeightMatrix& w, double tol = 1e-8,
                               std::size_t max_iter = 20000);

struct A3Report {
  bool pass = false;
  double sum_a_ratio = 0;
  double max_A_ratio = 0;
  double threshold = 0;
};

A3Report check_A3(const WeightDiagnostics& diag, double threshold);

/// Near-diagonal row norms sum_{k=from}^{to} [sum_{|j-k| <= log^{1.1} n} W^2]^{1/2}
/// over a user-chosen row window [from, to] (1-based, inclusive). Reported
/// as-is, without a pass/fail verdict.
double a8_block_sum(const WeightMatrix& w, std::size_t from, std::size_t to);

}  // namespace vstatns
