#include "sgfv/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sgfv/error.hpp"

namespace sgfv {

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double residual_norm(const StencilMatrix& A, std::span<const double> S, std::span<const double> x,
                     std::vector<double>& work) {
  work.resize(x.size());
  A.multiply(x, work);
  double m = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, std::abs(work[k] - S[k]));
  return m;
}

// Returns true when the relative residual dropped below `tol`.
bool bicgstab(const StencilMatrix& A, std::span<const double> S, std::vector<double>& x, double tol,
              int max_iter, double s_norm, LinearSolveStats& st) {
  const std::size_t n = x.size();
  std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n), work;
  std::vector<double> inv_diag(n);
  for (std::size_t k = 0; k < n; ++k) inv_diag[k] = 1.0 / A.diag[k];

  auto restart = [&] {
    A.multiply(x, r);
    for (std::size_t k = 0; k < n; ++k) r[k] = S[k] - r[k];
    r0 = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
  };
  restart();
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  int restarts = 0;
  for (int it = 0; it < max_iter; ++it) {
    const double rel = inf_norm(r) / s_norm;
    st.history.push_back(rel);
    if (rel <= tol) {
      const double true_rel = residual_norm(A, S, x, work) / s_norm;
      if (true_rel <= tol) return true;
      if (++restarts > 20) return false;
      restart();
      rho = alpha = omega = 1.0;
      continue;
    }
    const double rho_new = dot(r0, r);
    if (rho_new == 0.0 || !std::isfinite(rho_new)) {
      if (++restarts > 20) return false;
      restart();
      rho = alpha = omega = 1.0;
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
    for (std::size_t k = 0; k < n; ++k) ph[k] = inv_diag[k] * p[k];
    A.multiply(ph, v);
    const double r0v = dot(r0, v);
    if (r0v == 0.0) {
      if (++restarts > 20) return false;
      restart();
      rho = alpha = omega = 1.0;
      continue;
    }
    alpha = rho / r0v;
    for (std::size_t k = 0; k < n; ++k) s[k] = r[k] - alpha * v[k];
    if (inf_norm(s) / s_norm <= tol) {
      for (std::size_t k = 0; k < n; ++k) x[k] += alpha * ph[k];
      r = s;
      ++st.iterations;
      continue;
    }
    for (std::size_t k = 0; k < n; ++k) sh[k] = inv_diag[k] * s[k];
    A.multiply(sh, t);
    const double tt = dot(t, t);
    omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
    for (std::size_t k = 0; k < n; ++k) x[k] += alpha * ph[k] + omega * sh[k];
    for (std::size_t k = 0; k < n; ++k) r[k] = s[k] - omega * t[k];
    ++st.iterations;
    if (omega == 0.0) {
      if (++restarts > 20) return false;
      restart();
      rho = alpha = omega = 1.0;
    }
  }
  return residual_norm(A, S, x, work) / s_norm <= tol;
}

bool gauss_seidel(const StencilMatrix& A, std::span<const double> S, std::vector<double>& x, double tol,
                  int max_iter, double s_norm, LinearSolveStats& st) {
  std::vector<double> work;
  const std::size_t n = x.size();
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t k = 0; k < n; ++k) {
      double acc = S[k];
      for (int j = 0; j < A.width; ++j) acc -= A.offdiag(k, j) * x[A.column(k, j)];
      x[k] = acc / A.diag[k];
    }
    ++st.iterations;
    {
      const double rel = residual_norm(A, S, x, work) / s_norm;
      st.history.push_back(rel);
      if (rel <= tol) return true;
    }
  }
  return residual_norm(A, S, x, work) / s_norm <= tol;
}

}  // namespace

StencilMatrix::StencilMatrix(std::size_t n, int w)
    : rows(n), width(w), diag(n, 0.0), off(n * static_cast<std::size_t>(w), 0.0),
      columns(n * static_cast<std::size_t>(w), 0) {}

void StencilMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t k = 0; k < rows; ++k) {
    double acc = diag[k] * x[k];
    const std::size_t base = k * static_cast<std::size_t>(width);
    for (int j = 0; j < width; ++j) acc += off[base + j] * x[columns[base + j]];
    y[k] = acc;
  }
}

std::vector<double> StencilMatrix::column_sums() const {
  std::vector<double> c(diag);
  for (std::size_t k = 0; k < rows; ++k)
    for (int j = 0; j < width; ++j) c[column(k, j)] += offdiag(k, j);
  return c;
}

std::vector<double> StencilMatrix::to_dense() const {
  std::vector<double> d(rows * rows, 0.0);
  for (std::size_t k = 0; k < rows; ++k) {
    d[k * rows + k] += diag[k];
    for (int j = 0; j < width; ++j) d[k * rows + column(k, j)] += offdiag(k, j);
  }
  return d;
}

LinearMethod parse_linear_method(std::string_view name) {
  if (name == "bicgstab") return LinearMethod::BiCGStab;
  if (name == "gauss_seidel") return LinearMethod::GaussSeidel;
  throw ConfigError("unknown linear solver '" + std::string(name) + "'");
}

Field solve_linear(const LinearSystem& sys, const LinearSolverConfig& cfg, std::span<const double> initial_guess,
                   LinearSolveStats* stats) {
  const auto& A = sys.A;
  const auto& S = sys.S;
  const std::size_t n = A.rows;
  if (S.size() != n) throw UsageError("solve_linear: right-hand side size mismatch");
  if (!initial_guess.empty() && initial_guess.size() != n)
    throw UsageError("solve_linear: initial guess size mismatch");
  if (!(cfg.rel_tol > 0.0) || cfg.max_iter < 1) throw ConfigError("solve_linear: invalid tolerance or budget");
  for (std::size_t k = 0; k < n; ++k)
    if (!(A.diag[k] > 0.0) || !std::isfinite(A.diag[k]))
      throw NumericalStateError("solve_linear: diagonal must be positive and finite");

  LinearSolveStats local;
  LinearSolveStats& st = stats ? *stats : local;
  st = LinearSolveStats{};

  const double s_norm = inf_norm(S);
  if (s_norm == 0.0) return Field(n, 0.0);
  const bool nonneg_rhs = std::all_of(S.begin(), S.end(), [](double v) { return v >= 0.0; });

  // Solve a little below the requested tolerance so the mass rescale below
  // cannot push the residual over it.
  const double inner_tol = 0.25 * cfg.rel_tol;
  std::vector<double> x(n);
  if (initial_guess.empty()) {
    for (std::size_t k = 0; k < n; ++k) x[k] = S[k] / A.diag[k];
  } else {
    x.assign(initial_guess.begin(), initial_guess.end());
  }

  bool ok = false;
  if (cfg.method == LinearMethod::BiCGStab) {
    ok = bicgstab(A, S, x, inner_tol, cfg.max_iter, s_norm, st);
    const bool finite = std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
    if (!finite) {
      x.assign(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) x[k] = S[k] / A.diag[k];
      ok = false;
    }
    if (!ok) st.used_fallback = true;
  }
  if (nonneg_rhs && std::any_of(x.begin(), x.end(), [](double v) { return v < 0.0; })) {
    // A sweep from a nonnegative start stays positive for an M-matrix.
    for (double& v : x) v = std::max(v, 0.0);
    ok = false;
  }
  if (!ok) {
    st.used_fallback = st.used_fallback || cfg.method == LinearMethod::BiCGStab;
    ok = gauss_seidel(A, S, x, inner_tol, cfg.max_iter, s_norm, st);
  }

  std::vector<double> work;
  // Restore 1^T A u = 1^T S (discrete mass) exactly up to round-off.
  const auto c = A.column_sums();
  double target = 0.0, current = 0.0, csum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    target += S[k];
    current += c[k] * x[k];
    csum += c[k];
  }
  if (nonneg_rhs) {
    if (target > 0.0 && current > 0.0) {
      const double scale = target / current;
      for (double& v : x) v *= scale;
    }
    const double tiny = std::numeric_limits<double>::min();
    for (double& v : x) {
      if (!(v > 0.0)) {
        v = tiny;
        ++st.clamped;
      }
    }
  } else if (csum > 0.0) {
    const double shift = (target - current) / csum;
    for (double& v : x) v += shift;
  }
  st.residual = residual_norm(A, S, x, work) / s_norm;
  if (!(st.residual <= cfg.rel_tol))
    throw SolverFailure("linear solver did not reach relative residual " + std::to_string(cfg.rel_tol) +
                            " (got " + std::to_string(st.residual) + ")",
                        st.history);
  return x;
}

}  // namespace sgfv
