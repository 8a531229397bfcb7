#include "sgfv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sgfv/error.hpp"
#include "sgfv/format.hpp"

namespace sgfv {

namespace {

void check_species(const Mesh& mesh, std::span<const Field> u, const char* what) {
  for (const auto& f : u)
    if (f.size() != mesh.num_cells()) throw UsageError(std::string(what) + ": field size does not match mesh");
}

bool nonnegative(std::span<const Field> u) {
  for (const auto& f : u)
    for (double v : f)
      if (!(v >= 0.0)) return false;
  return true;
}

InequalityCheck make_check(double lhs, double rhs, double tol, bool asserted) {
  InequalityCheck c;
  c.slack = rhs - lhs;
  c.passed = c.slack >= -tol;
  c.asserted = asserted;
  return c;
}

char verdict_char(const InequalityCheck& c) {
  if (c.asserted) return c.passed ? 'P' : 'F';
  return c.passed ? 'p' : 'f';
}

}  // namespace

double entropy_boltzmann(const Mesh& mesh, std::span<const Field> u) {
  check_species(mesh, u, "entropy_boltzmann");
  double s = 0.0;
  for (const auto& f : u) {
    for (double v : f) {
      if (!(v >= 0.0)) throw UsageError("entropy_boltzmann: density must be nonnegative");
      if (v > 0.0) s += v * (std::log(v) - 1.0);
    }
  }
  return s * mesh.cell_measure();
}

double entropy_rao(const Mesh& mesh, std::span<const Field> u, std::span<const Field> p) {
  check_species(mesh, u, "entropy_rao");
  check_species(mesh, p, "entropy_rao");
  if (u.size() != p.size()) throw UsageError("entropy_rao: species count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t k = 0; k < u[i].size(); ++k) s += u[i][k] * p[i][k];
  return 0.5 * mesh.cell_measure() * s;
}

double entropy_rao(const DiscreteKernel& W, std::span<const Field> u) {
  const auto p = W.potential(u);
  return entropy_rao(W.mesh(), u, p);
}

Productions productions(const Mesh& mesh, std::span<const Field> u, std::span<const Field> p,
                        const SchemeConfig& cfg) {
  check_species(mesh, u, "productions");
  check_species(mesh, p, "productions");
  if (u.size() != p.size()) throw UsageError("productions: species count mismatch");
  if (!nonnegative(u)) throw UsageError("productions: density must be nonnegative");
  Productions r;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& ui = u[i];
    const auto& pi = p[i];
    mesh.for_each_edge([&](const EdgeId& e) {
      const double tau = mesh.transmissibility(e.axis);
      const double dp = pi[e.neighbor] - pi[e.owner];
      const double du = ui[e.neighbor] - ui[e.owner];
      const double dsq = std::sqrt(ui[e.neighbor]) - std::sqrt(ui[e.owner]);
      const double u_hat = dp >= 0.0 ? ui[e.neighbor] : ui[e.owner];
      r.P_B += tau * eval_B_kappa(cfg.weight, cfg.kappa, std::abs(dp)) * dsq * dsq;
      r.P_R += tau * u_hat * dp * dp;
      r.X += tau * dp * du;
      r.fisher += tau * dsq * dsq;
    });
  }
  r.P_B *= 4.0;
  return r;
}

bool StepVerdicts::all_asserted_passed() const noexcept {
  for (const auto* c : {&boltzmann, &rao, &fisher})
    if (c->asserted && !c->passed) return false;
  return true;
}

StepVerdicts verify_step(const State& prev, const State& curr, const DiscreteKernel& W, const SchemeConfig& cfg,
                         const PsdReport& psd) {
  const Mesh& mesh = W.mesh();
  if (prev.species() != W.species() || curr.species() != W.species())
    throw UsageError("verify_step: species count does not match kernel");
  std::vector<Field> p = curr.p;
  if (p.empty())
    p = cfg.coupling == Coupling::Implicit ? potential_implicit(W, curr.u) : potential_midpoint(W, curr.u, prev.u);

  const double hb0 = entropy_boltzmann(mesh, prev.u);
  const double hb1 = entropy_boltzmann(mesh, curr.u);
  const double hr0 = entropy_rao(W, prev.u);
  const double hr1 = entropy_rao(W, curr.u);
  const Productions pr = productions(mesh, curr.u, p, cfg);
  const double alpha = cfg.weight.alpha();
  const double kappa = cfg.kappa;

  StepVerdicts v;
  v.tol_scale = 100.0 * (cfg.picard_tol / cfg.dt + cfg.linear.rel_tol) *
                std::max({1.0, std::abs(hb1), std::abs(hr1)});
  v.boltzmann = make_check((hb1 - hb0) / cfg.dt + pr.P_B, -pr.X, v.tol_scale, true);
  const bool rao_applies = psd.is_psd || cfg.coupling == Coupling::Midpoint;
  v.rao = make_check((hr1 - hr0) / cfg.dt + (1.0 - alpha) * pr.P_R, -kappa * pr.X, v.tol_scale, rao_applies);
  v.fisher = make_check(kappa * (1.0 - alpha) * pr.fisher, 0.25 * pr.P_B + (alpha / kappa) * pr.P_R - alpha * pr.X,
                        v.tol_scale, true);
  return v;
}

std::vector<double> masses(const Mesh& mesh, std::span<const Field> u) {
  std::vector<double> m;
  for (const auto& f : u) m.push_back(integrate(mesh, f));
  return m;
}

StepReport make_report(const State* prev, const State& curr, const DiscreteKernel& W, const SchemeConfig& cfg,
                       const PsdReport& psd, const StepStats* stats) {
  const Mesh& mesh = W.mesh();
  StepReport r;
  r.step = curr.step;
  r.time = static_cast<double>(curr.step) * cfg.dt;
  r.mass = masses(mesh, curr.u);
  r.H_R = entropy_rao(W, curr.u);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool positive = nonnegative(curr.u) && (prev == nullptr || nonnegative(prev->u));
  r.H_B = nonnegative(curr.u) ? entropy_boltzmann(mesh, curr.u) : nan;
  std::vector<Field> p = curr.p;
  if (p.empty()) p = potential_implicit(W, curr.u);
  if (nonnegative(curr.u)) {
    r.prod = productions(mesh, curr.u, p, cfg);
  } else {
    r.prod = Productions{nan, nan, nan, nan};
  }
  if (stats) {
    r.picard_iters = stats->picard_iters;
    r.linear_residual = stats->linear_residual;
    r.clamped = stats->clamped;
  }
  if (prev && positive) {
    r.verdicts = verify_step(*prev, curr, W, cfg, psd);
  } else {
    r.verdicts.boltzmann = r.verdicts.rao = r.verdicts.fisher = InequalityCheck{nan, true, false};
  }
  return r;
}

std::vector<std::string> report_header(int species) {
  std::vector<std::string> h{"step", "time"};
  for (int i = 1; i <= species; ++i) h.push_back("mass_" + std::to_string(i));
  for (const char* c : {"H_B", "H_R", "fisher", "P_B", "P_R", "X", "picard_iters", "linear_residual", "clamped",
                        "slack_HB", "slack_HR", "slack_fisher", "verdicts"})
    h.emplace_back(c);
  return h;
}

std::vector<std::string> report_row(const StepReport& r) {
  std::vector<std::string> row{std::to_string(r.step), format_real(r.time)};
  for (double m : r.mass) row.push_back(format_real(m));
  for (double v : {r.H_B, r.H_R, r.prod.fisher, r.prod.P_B, r.prod.P_R, r.prod.X}) row.push_back(format_real(v));
  row.push_back(std::to_string(r.picard_iters));
  row.push_back(format_real(r.linear_residual));
  row.push_back(std::to_string(r.clamped));
  row.push_back(format_real(r.verdicts.boltzmann.slack));
  row.push_back(format_real(r.verdicts.rao.slack));
  row.push_back(format_real(r.verdicts.fisher.slack));
  row.push_back(std::string{verdict_char(r.verdicts.boltzmann), verdict_char(r.verdicts.rao),
                            verdict_char(r.verdicts.fisher)});
  return row;
}

}  // namespace sgfv
