#include "vstatns/weights.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "vstatns/common.hpp"
#include "vstatns/rng.hpp"

namespace vstatns {

void WeightSpec::validate() const {
  switch (family) {
    case Family::GlobalFunction:
      break;
    case Family::LocalKernel:
      require(bandwidth > 0.0, "local kernel weights need bandwidth > 0");
      require(center >= 0.0 && center <= 1.0, "kernel center must lie in [0,1]");
      break;
    case Family::BandedToeplitz:
      require(m > 0.0, "banded Toeplitz weights need m > 0");
      break;
    case Family::Explicit:
      require(explicit_n >= 2 && explicit_entries.size() == explicit_n * explicit_n,
              "explicit weights need an n x n entry array");
      break;
  }
}

WeightSpec WeightSpec::global(Surface f) {
  WeightSpec s;
  s.family = Family::GlobalFunction;
  s.f = std::move(f);
  return s;
}

WeightSpec WeightSpec::local_kernel(SmoothKernel K, double bandwidth, double center) {
  WeightSpec s;
  s.family = Family::LocalKernel;
  s.K = K;
  s.bandwidth = bandwidth;
  s.center = center;
  return s;
}

WeightSpec WeightSpec::banded_toeplitz(DecayFn h, double m) {
  WeightSpec s;
  s.family = Family::BandedToeplitz;
  s.h = std::move(h);
  s.m = m;
  return s;
}

WeightSpec WeightSpec::explicit_matrix(std::vector<double> entries, std::size_t n) {
  WeightSpec s;
  s.family = Family::Explicit;
  s.explicit_entries = std::move(entries);
  s.explicit_n = n;
  return s;
}

namespace {

[[noreturn]] void nonfinite_entry(std::size_t j, std::size_t k) {
  throw NumericError("nonfinite weight at (j,k)=(" + std::to_string(j + 1) + "," +
                     std::to_string(k + 1) + ")");
}

}  // namespace

WeightMatrix build_weight_matrix(const WeightSpec& spec, std::size_t n) {
  require(n >= 2, "weight matrix needs n >= 2");
  spec.validate();

  WeightMatrix w;
  w.n_ = n;
  w.spec_ = spec;

  if (spec.family == WeightSpec::Family::BandedToeplitz) {
    w.toeplitz_ = true;
    w.vals_.resize(n);
    const double scale = std::sqrt(spec.m) / static_cast<double>(n);
    for (std::size_t d = 0; d < n; ++d) {
      const double x = static_cast<double>(d) / static_cast<double>(n) * spec.m;
      w.vals_[d] = scale * spec.h(x);
      if (!std::isfinite(w.vals_[d])) nonfinite_entry(0, d);
    }
    return w;
  }

  require(n <= WeightMatrix::kDenseCap, "dense weight storage capped at n = 16384");
  w.vals_.resize(n * n);
  auto entry = [&](std::size_t j, std::size_t k) -> double {
    const double tj = static_cast<double>(j + 1) / static_cast<double>(n);
    const double tk = static_cast<double>(k + 1) / static_cast<double>(n);
    switch (spec.family) {
      case WeightSpec::Family::GlobalFunction:
        return spec.f(tj, tk) / static_cast<double>(n);
      case WeightSpec::Family::LocalKernel: {
        const double u = (tj - spec.center) / spec.bandwidth;
        const double v = (tk - spec.center) / spec.bandwidth;
        const double nb = static_cast<double>(n) * spec.bandwidth;
        if (spec.g) return (*spec.g)(u, v) / nb;
        return spec.K(u) * spec.K(v) / nb;
      }
      case WeightSpec::Family::Explicit:
        return spec.explicit_entries[j * spec.explicit_n + k];
      default:
        return 0.0;
    }
  };

  if (spec.family == WeightSpec::Family::Explicit) {
    require(spec.explicit_n == n, "explicit weight matrix size does not match n");
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j; k < n; ++k) {
        if (spec.explicit_entries[j * n + k] != spec.explicit_entries[k * n + j]) {
          throw ConfigError("explicit weight matrix must be exactly symmetric");
        }
      }
    }
  }

  // One evaluation per unordered pair keeps symmetry exact.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      const double v = entry(j, k);
      if (!std::isfinite(v)) nonfinite_entry(j, k);
      w.vals_[j * n + k] = v;
      w.vals_[k * n + j] = v;
    }
  }
  return w;
}

double WeightMatrix::row_abs_sum(std::size_t j) const {
  KahanSum acc;
  for (std::size_t k = 0; k < n_; ++k) acc.add(std::abs(at(j, k)));
  return acc.value();
}

double WeightMatrix::trace() const {
  if (toeplitz_) return static_cast<double>(n_) * vals_[0];
  KahanSum acc;
  for (std::size_t j = 0; j < n_; ++j) acc.add(vals_[j * n_ + j]);
  return acc.value();
}

double WeightMatrix::frobenius_sq() const {
  KahanSum acc;
  if (toeplitz_) {
    acc.add(static_cast<double>(n_) * vals_[0] * vals_[0]);
    for (std::size_t d = 1; d < n_; ++d) {
      acc.add(2.0 * static_cast<double>(n_ - d) * vals_[d] * vals_[d]);
    }
  } else {
    for (double v : vals_) acc.add(v * v);
  }
  return acc.value();
}

void WeightMatrix::matvec(const std::vector<double>& x, std::vector<double>& y) const {
  require(x.size() == n_, "matvec dimension mismatch");
  y.assign(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < n_; ++k) s += at(j, k) * x[k];
    y[j] = s;
  }
}

void WeightMatrix::scale(double c) {
  for (double& v : vals_) v *= c;
}

WeightDiagnostics diagnostics(const WeightMatrix& w, A3Blocks blocks,
                              std::function<double(std::size_t, std::size_t)> lipschitz_f,
                              bool with_theta1, double eig_tol) {
  const std::size_t n = w.size();
  WeightDiagnostics d;

  d.row_abs_sums.resize(n);
  for (std::size_t j = 0; j < n; ++j) d.row_abs_sums[j] = w.row_abs_sum(j);

  {
    KahanSum sup;
    for (double r : d.row_abs_sums) sup.add(r * r);
    d.Wsup = sup.value();
  }
  d.Wsub = w.frobenius_sq();

  // Delta: |W| summed against the local Lipschitz envelope.
  auto fn = lipschitz_f;
  if (!fn) {
    fn = [&w, n](std::size_t j, std::size_t k) {
      const std::size_t j2 = (j + 1 < n) ? j + 1 : j - 1;
      const std::size_t k2 = (k + 1 < n) ? k + 1 : k - 1;
      const double dj = std::abs(w.at(j2, k) - w.at(j, k));
      const double dk = std::abs(w.at(j, k2) - w.at(j, k));
      return std::max(dj, dk);
    };
  }
  {
    KahanSum acc;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) acc.add(std::abs(w.at(j, k)) * fn(j, k));
    }
    d.Delta = acc.value();
  }

  // Row-difference smoothness functional plus the boundary row norm.
  {
    KahanSum acc;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      KahanSum row;
      for (std::size_t k = 0; k < n; ++k) {
        const double diff = w.at(j, k) - w.at(j + 1, k);
        row.add(diff * diff);
      }
      acc.add(std::sqrt(row.value()));
    }
    KahanSum last;
    for (std::size_t k = 0; k < n; ++k) last.add(w.at(n - 1, k) * w.at(n - 1, k));
    acc.add(std::sqrt(last.value()));
    d.V_script = acc.value();
  }

  // Near-diagonal deviation sum over a window of ceil(log^{1.1} n) columns.
  {
    d.a7_window = static_cast<std::size_t>(std::ceil(std::pow(std::log(static_cast<double>(n)), 1.1)));
    KahanSum acc;
    for (std::size_t j = 0; j < n; ++j) {
      KahanSum local;
      const std::size_t lo = j >= d.a7_window ? j - d.a7_window : 0;
      const std::size_t hi = std::min(n - 1, j + d.a7_window);
      for (std::size_t k = lo; k <= hi; ++k) {
        const double diff = w.at(j, j) - w.at(j, k);
        local.add(diff * diff);
      }
      acc.add(std::sqrt(local.value()));
    }
    d.a7_local_sum = acc.value();
  }

  if (blocks.l > 0 || blocks.m > 0) {
    require(blocks.m > 0 && blocks.m < blocks.l && blocks.l < n,
            "A3 blocks need 0 < m_n < l_n < n");
    d.a3_requested = true;
    const std::size_t s = blocks.l + blocks.m;
    const std::size_t nblocks = (n + s - 1) / s;
    d.A.resize(nblocks, 0.0);
    d.a.resize(nblocks, 0.0);
    for (std::size_t jb = 0; jb < nblocks; ++jb) {
      KahanSum big, small;
      for (std::size_t k = 0; k < s; ++k) {
        const std::size_t row = s * jb + k;  // 0-based
        if (row >= n) break;
        const double r2 = d.row_abs_sums[row] * d.row_abs_sums[row];
        if (k < blocks.l) {
          big.add(r2);
        } else {
          small.add(r2);
        }
      }
      d.A[jb] = big.value();
      d.a[jb] = small.value();
    }
    KahanSum sum_a;
    double max_A = 0.0;
    for (std::size_t jb = 0; jb < nblocks; ++jb) {
      sum_a.add(d.a[jb]);
      max_A = std::max(max_A, d.A[jb]);
    }
    d.sum_a_ratio = d.Wsup > 0.0 ? sum_a.value() / d.Wsup : std::numeric_limits<double>::quiet_NaN();
    d.max_A_ratio = d.Wsup > 0.0 ? max_A / d.Wsup : std::numeric_limits<double>::quiet_NaN();
  }

  if (with_theta1) d.theta1 = max_abs_eigenvalue(w, eig_tol).theta1;
  return d;
}

EigenResult max_abs_eigenvalue(const WeightMatrix& w, double tol, std::size_t max_iter) {
  const std::size_t n = w.size();
  double max_row = 0.0;
  for (std::size_t j = 0; j < n; ++j) max_row = std::max(max_row, w.row_abs_sum(j));

  EigenResult out;
  if (n <= 2048) {
    Eigen::MatrixXd A(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) A(j, k) = w.at(j, k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    out.spectrum = std::vector<double>(ev.data(), ev.data() + n);
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(ev[i]) > std::abs(best)) best = ev[i];
    }
    out.theta1 = best;
  } else {
    // Power iteration on W^2; converges on |theta_1| even when the
    // extreme eigenvalues come in +/- pairs.
    std::vector<double> v(n), tmp(n), w2v(n);
    rng::Stream s(rng::derive(0x5eedULL, {rng::kPowerIteration, n}));
    double norm = 0.0;
    for (double& x : v) {
      x = s.next_u01() - 0.5;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;

    double rho_prev = 0.0;
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
      w.matvec(v, tmp);
      double rho = 0.0;  // v' W^2 v = |Wv|^2
      for (double x : tmp) rho += x * x;
      if (it > 0 && std::abs(rho - rho_prev) <= tol * std::abs(rho)) {
        rho_prev = rho;
        break;
      }
      rho_prev = rho;
      w.matvec(tmp, w2v);
      norm = 0.0;
      for (double x : w2v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm == 0.0) {
        rho_prev = 0.0;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) v[i] = w2v[i] / norm;
    }
    if (it == max_iter) throw NumericError("power iteration did not converge");
    w.matvec(v, tmp);
    double rayleigh = 0.0;
    for (std::size_t i = 0; i < n; ++i) rayleigh += v[i] * tmp[i];
    out.theta1 = std::copysign(std::sqrt(rho_prev), rayleigh);
    out.iterations = it + 1;
  }

  if (std::abs(out.theta1) > max_row * (1.0 + 1e-10) + 1e-300) {
    throw NumericError("eigenvalue violates the Gershgorin row-sum bound");
  }
  return out;
}

double a8_block_sum(const WeightMatrix& w, std::size_t from, std::size_t to) {
  const std::size_t n = w.size();
  require(from >= 1 && from <= to && to <= n, "a8 window needs 1 <= from <= to <= n");
  const std::size_t win =
      static_cast<std::size_t>(std::ceil(std::pow(std::log(static_cast<double>(n)), 1.1)));
  KahanSum acc;
  for (std::size_t k = from - 1; k <= to - 1; ++k) {
    KahanSum local;
    const std::size_t lo = k >= win ? k - win : 0;
    const std::size_t hi = std::min(n - 1, k + win);
    for (std::size_t j = lo; j <= hi; ++j) local.add(w.at(k, j) * w.at(k, j));
    acc.add(std::sqrt(local.value()));
  }
  return acc.value();
}

A3Report check_A3(const WeightDiagnostics& diag, double threshold) {
  require(diag.a3_requested, "check_A3 needs diagnostics computed with A3 blocks");
  if (!(diag.Wsup > 0.0)) throw NumericError("degenerate weight matrix: W^(n) = 0");
  A3Report r;
  r.threshold = threshold;
  r.sum_a_ratio = diag.sum_a_ratio;
  r.max_A_ratio = diag.max_A_ratio;
  r.pass = diag.sum_a_ratio <= threshold && diag.max_A_ratio <= threshold;
  return r;
}

}  // namespace vstatns
