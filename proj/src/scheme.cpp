#include "sgfv/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgfv/error.hpp"

namespace sgfv {

namespace {

void require_field(const Mesh& mesh, std::span<const double> f, const char* what) {
  if (f.size() != mesh.num_cells()) throw UsageError(std::string(what) + ": field size does not match mesh");
}

void require_finite(std::span<const double> f, const char* what) {
  for (double v : f)
    if (!std::isfinite(v)) throw NumericalStateError(std::string(what) + ": non-finite value");
}

}  // namespace

Coupling parse_coupling(std::string_view name) {
  if (name == "implicit") return Coupling::Implicit;
  if (name == "midpoint") return Coupling::Midpoint;
  throw ConfigError("unknown coupling '" + std::string(name) + "'");
}

std::string_view coupling_name(Coupling c) noexcept {
  return c == Coupling::Implicit ? "implicit" : "midpoint";
}

void SchemeConfig::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("scheme: kappa must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("scheme: dt must be > 0");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("scheme: T must be >= 0");
  if (!(picard_tol > 0.0)) throw ConfigError("scheme: picard_tol must be > 0");
  if (picard_max_iter < 1) throw ConfigError("scheme: picard_max_iter must be >= 1");
  if (!(linear.rel_tol > 0.0)) throw ConfigError("scheme: linear rel_tol must be > 0");
  if (linear.max_iter < 1) throw ConfigError("scheme: linear max_iter must be >= 1");
}

std::size_t SchemeConfig::num_steps() const {
  validate();
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("scheme: T must be an integer multiple of dt");
  if (n > 1e9) throw ConfigError("scheme: too many time steps");
  return static_cast<std::size_t>(n);
}

double edge_flux(std::span<const double> u, std::span<const double> p, const Mesh& mesh, const EdgeId& edge,
                 const SchemeConfig& cfg) {
  const double uk = u[edge.owner], ul = u[edge.neighbor];
  const double pk = p[edge.owner], pl = p[edge.neighbor];
  if (!std::isfinite(uk) || !std::isfinite(ul) || !std::isfinite(pk) || !std::isfinite(pl))
    throw NumericalStateError("edge_flux: non-finite input");
  const double tau = mesh.transmissibility(edge.axis);
  const double dp = pl - pk;
  const double du = ul - uk;
  const double b = eval_B_kappa(cfg.weight, cfg.kappa, std::abs(dp));
  const double u_hat = dp >= 0.0 ? ul : uk;
  return -tau * (b * du + u_hat * dp);
}

LinearSystem assemble(std::span<const double> u_prev, std::span<const double> p, const SchemeConfig& cfg,
                      const Mesh& mesh) {
  require_field(mesh, u_prev, "assemble");
  require_field(mesh, p, "assemble");
  for (double v : u_prev)
    if (!std::isfinite(v)) throw ConfigError("assemble: previous density is not finite");
  if (std::all_of(u_prev.begin(), u_prev.end(), [](double v) { return v == 0.0; }))
    throw ConfigError("assemble: previous density vanishes identically");
  require_finite(p, "assemble");

  const std::size_t n = mesh.num_cells();
  const int d = mesh.dim();
  LinearSystem sys{StencilMatrix(n, 2 * d), Field(n)};
  auto& A = sys.A;
  const double mdt = mesh.cell_measure() / cfg.dt;
  std::fill(A.diag.begin(), A.diag.end(), mdt);
  mesh.for_each_edge([&](const EdgeId& e) {
    const double tau = mesh.transmissibility(e.axis);
    const double dp = p[e.neighbor] - p[e.owner];
    const double b = eval_B_kappa(cfg.weight, cfg.kappa, std::abs(dp));
    const double pos = std::max(dp, 0.0);
    const double neg = std::max(-dp, 0.0);
    const std::size_t ko = e.owner * static_cast<std::size_t>(2 * d) + static_cast<std::size_t>(2 * e.axis);
    const std::size_t kn = e.neighbor * static_cast<std::size_t>(2 * d) + static_cast<std::size_t>(2 * e.axis + 1);
    A.diag[e.owner] += tau * (b + neg);
    A.off[ko] = -tau * (b + pos);
    A.columns[ko] = e.neighbor;
    A.diag[e.neighbor] += tau * (b + pos);
    A.off[kn] = -tau * (b + neg);
    A.columns[kn] = e.owner;
  });
  for (std::size_t k = 0; k < n; ++k) sys.S[k] = mdt * u_prev[k];
  return sys;
}

double scheme_residual(std::span<const double> u_prev, std::span<const double> u, std::span<const double> p,
                       const SchemeConfig& cfg, const Mesh& mesh) {
  require_field(mesh, u_prev, "scheme_residual");
  require_field(mesh, u, "scheme_residual");
  require_field(mesh, p, "scheme_residual");
  const double mdt = mesh.cell_measure() / cfg.dt;
  std::vector<double> r(mesh.num_cells());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = mdt * (u[k] - u_prev[k]);
  mesh.for_each_edge([&](const EdgeId& e) {
    const double f = edge_flux(u, p, mesh, e, cfg);
    r[e.owner] += f;
    r[e.neighbor] -= f;
  });
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

StepOutcome advance(const State& prev, const DiscreteKernel& W, const SchemeConfig& cfg) {
  cfg.validate();
  const Mesh& mesh = W.mesh();
  const int n = W.species();
  if (prev.species() != n) throw UsageError("advance: species count does not match kernel");
  for (const auto& f : prev.u) require_field(mesh, f, "advance");

  const std::size_t step = prev.step + 1;
  StepOutcome out;
  out.state.step = step;
  StepStats& st = out.stats;
  std::vector<Field> iterate = prev.u;
  std::vector<Field> p_last;
  std::vector<LinearSolveStats> lin(static_cast<std::size_t>(n));

  try {
    for (int it = 1; it <= cfg.picard_max_iter; ++it) {
      std::vector<Field> p = cfg.coupling == Coupling::Implicit ? potential_implicit(W, iterate)
                                                                : potential_midpoint(W, iterate, prev.u);
      st.picard_iters = it;
      if (it > 1 && p == p_last) {
        // Frozen potential: the previous solve is already the fixed point.
        st.picard_errors.push_back(0.0);
        break;
      }
      std::vector<Field> next(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const auto sys = assemble(prev.u[i], p[i], cfg, mesh);
        next[i] = solve_linear(sys, cfg.linear, iterate[i], &lin[i]);
      }
      double e = 0.0;
      for (int i = 0; i < n; ++i)
        for (std::size_t k = 0; k < next[i].size(); ++k) e = std::max(e, std::abs(next[i][k] - iterate[i][k]));
      if (!std::isfinite(e)) throw NumericalStateError("Picard iterate is not finite");
      st.picard_errors.push_back(e);
      iterate = std::move(next);
      p_last = std::move(p);
      st.linear_iters = 0;
      st.linear_residual = 0.0;
      st.clamped = 0;
      for (const auto& l : lin) {
        st.linear_iters += l.iterations;
        st.linear_residual = std::max(st.linear_residual, l.residual);
        st.clamped += l.clamped;
        st.linear_fallback = st.linear_fallback || l.used_fallback;
      }
      if (e <= cfg.picard_tol) break;
      if (it == cfg.picard_max_iter)
        throw StepFailure("Picard iteration did not converge at step " + std::to_string(step) + " (error " +
                              std::to_string(e) + ")",
                          step, st.picard_errors);
    }
  } catch (const SolverFailure& err) {
    throw StepFailure(std::string("linear solve failed at step ") + std::to_string(step) + ": " + err.what(), step,
                      st.picard_errors);
  } catch (const NumericalStateError& err) {
    throw StepFailure(std::string("numerical failure at step ") + std::to_string(step) + ": " + err.what(), step,
                      st.picard_errors);
  }
  out.state.u = std::move(iterate);
  out.state.p = std::move(p_last);
  return out;
}

RunResult run(const SchemeConfig& cfg, State initial, const DiscreteKernel& W,
              std::span<const StepObserver> observers) {
  const std::size_t steps = cfg.num_steps();
  RunResult result;
  result.final_state = std::move(initial);
  result.steps.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    StepOutcome o = advance(result.final_state, W, cfg);
    for (const auto& obs : observers) obs(result.final_state, o.state, o.stats);
    result.steps.push_back(std::move(o.stats));
    result.final_state = std::move(o.state);
  }
  return result;
}

}  // namespace sgfv
