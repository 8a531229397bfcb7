#include "sgfv/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <future>

#include <spdlog/spdlog.h>

#include "sgfv/error.hpp"
#include "sgfv/fft.hpp"
#include "sgfv/format.hpp"
#include "sgfv/harness/csv.hpp"
#include "sgfv/harness/projection.hpp"

namespace sgfv {

namespace {

template <typename T>
std::vector<T> run_parallel(std::vector<std::function<T()>> jobs, int threads) {
  std::vector<T> out(jobs.size());
  const std::size_t width = static_cast<std::size_t>(std::max(1, threads));
  for (std::size_t start = 0; start < jobs.size(); start += width) {
    const std::size_t stop = std::min(jobs.size(), start + width);
    if (stop - start == 1) {
      out[start] = jobs[start]();
      continue;
    }
    std::vector<std::future<T>> futures;
    for (std::size_t k = start; k < stop; ++k) futures.push_back(std::async(std::launch::async, jobs[k]));
    for (std::size_t k = start; k < stop; ++k) out[k] = futures[k - start].get();
  }
  return out;
}

MeshSpec with_cells(MeshSpec spec, int cells) {
  for (auto& c : spec.cells) c = cells;
  return spec;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

void write_summary(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  CsvWriter w(path, {"key", "value"});
  for (const auto& [k, v] : kv) w.row({k, v});
}

void append_structure(std::vector<std::pair<std::string, std::string>>& kv, const StructureStats& s,
                      const std::string& prefix = "") {
  kv.emplace_back(prefix + "steps", std::to_string(s.steps));
  kv.emplace_back(prefix + "max_mass_drift", format_real(s.max_mass_drift));
  kv.emplace_back(prefix + "min_value", format_real(s.min_value));
  kv.emplace_back(prefix + "positivity_expected", bool_text(s.positivity_expected));
  kv.emplace_back(prefix + "clamped", std::to_string(s.clamped));
}

struct Trajectory {
  State final_state;
  StructureStats structure;
  std::optional<std::string> failure;
};

Trajectory plain_run(const ExperimentConfig& cfg, const MeshSpec& mesh_spec, const SchemeConfig& scheme) {
  SimulationOptions opts;
  opts.reports = false;
  opts.verify = false;
  auto r = simulate(cfg, mesh_spec, scheme, opts);
  return Trajectory{std::move(r.final_state), std::move(r.structure), std::move(r.failure)};
}

}  // namespace

void StructureStats::start(const Mesh& mesh, std::span<const Field> u0) {
  initial_mass = masses(mesh, u0);
  positivity_expected = true;
  for (std::size_t i = 0; i < u0.size(); ++i) {
    const bool nonneg = std::all_of(u0[i].begin(), u0[i].end(), [](double v) { return v >= 0.0; });
    if (!nonneg || !(initial_mass[i] > 0.0)) positivity_expected = false;
  }
}

void StructureStats::observe(const Mesh& mesh, const State& curr, const StepStats& stats) {
  ++steps;
  clamped += stats.clamped;
  const auto m = masses(mesh, curr.u);
  for (std::size_t i = 0; i < m.size(); ++i) {
    double scale = std::abs(initial_mass[i]);
    if (scale == 0.0) scale = 1.0;
    max_mass_drift = std::max(max_mass_drift, std::abs(m[i] - initial_mass[i]) / scale);
    for (double v : curr.u[i]) min_value = std::min(min_value, v);
  }
}

DominantMode dominant_mode(const Mesh& mesh, std::span<const double> f) {
  if (f.size() != mesh.num_cells()) throw UsageError("dominant_mode: field size does not match mesh");
  double mean = 0.0;
  for (double v : f) mean += v;
  mean /= static_cast<double>(f.size());
  std::vector<std::complex<double>> data(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) data[k] = f[k] - mean;
  dft_nd(mesh.spec().cells, data, false);
  DominantMode best;
  std::size_t arg = 0;
  for (std::size_t k = 1; k < data.size(); ++k) {
    const double mag = std::abs(data[k]);
    if (mag > best.magnitude) {
      best.magnitude = mag;
      arg = k;
    }
  }
  best.frequency.resize(static_cast<std::size_t>(mesh.dim()));
  double s = 0.0;
  for (int a = 0; a < mesh.dim(); ++a) {
    const int m = mesh.cells(a);
    int k = mesh.axis_index(arg, a);
    if (k > m / 2) k -= m;
    best.frequency[static_cast<std::size_t>(a)] = k;
    const double nu = k / mesh.length(a);
    s += nu * nu;
  }
  best.wavelength = s > 0.0 ? 1.0 / std::sqrt(s) : std::numeric_limits<double>::infinity();
  best.magnitude /= static_cast<double>(f.size());
  return best;
}

std::vector<Field> initial_fields(const ExperimentConfig& cfg, const Mesh& mesh) {
  std::vector<Field> u;
  for (const auto& d : cfg.initial) u.push_back(project_initial(d, mesh));
  return u;
}

SimulationResult simulate(const ExperimentConfig& cfg, const MeshSpec& mesh_spec, const SchemeConfig& scheme,
                          const SimulationOptions& opts) {
  const Mesh mesh(mesh_spec);
  const DiscreteKernel W = discretize(cfg.kernel, mesh, cfg.backend);
  SimulationResult res;
  State state{0, initial_fields(cfg, mesh), {}};
  res.cstar = c_star(cfg.kernel, mesh, state.u, scheme.kappa, scheme.weight.alpha());
  if (opts.verify || opts.reports) res.psd = check_psd(W);
  res.structure.start(mesh, state.u);
  res.initial = state;

  const std::size_t steps = scheme.num_steps();
  std::vector<std::size_t> snap_steps;
  for (double t : opts.snapshot_times) {
    const double k = std::round(t / scheme.dt);
    if (k >= 0.0 && k <= static_cast<double>(steps)) snap_steps.push_back(static_cast<std::size_t>(k));
  }
  auto maybe_snapshot = [&](const State& s) {
    if (std::find(snap_steps.begin(), snap_steps.end(), s.step) != snap_steps.end())
      res.snapshots.push_back(Snapshot{s.step, static_cast<double>(s.step) * scheme.dt, s.u});
  };
  maybe_snapshot(state);

  const bool evaluate = opts.reports || opts.verify;
  double last_hr = 0.0;
  if (evaluate) {
    StepReport r0 = make_report(nullptr, state, W, scheme, res.psd, nullptr);
    last_hr = r0.H_R;
    if (opts.reports) res.reports.push_back(std::move(r0));
  }
  for (std::size_t k = 0; k < steps; ++k) {
    StepOutcome o;
    try {
      o = advance(state, W, scheme);
    } catch (const StepFailure& e) {
      res.failure = e.what();
      spdlog::error("{}", e.what());
      break;
    }
    res.structure.observe(mesh, o.state, o.stats);
    res.picard_total += static_cast<std::size_t>(o.stats.picard_iters);
    res.picard_max = std::max(res.picard_max, o.stats.picard_iters);
    if (evaluate) {
      StepReport r = make_report(&state, o.state, W, scheme, res.psd, &o.stats);
      if (opts.verify && !r.verdicts.all_asserted_passed()) ++res.entropy_failures;
      if (r.H_R > last_hr + scheme.dt * r.verdicts.tol_scale) ++res.rao_increases;
      last_hr = r.H_R;
      const bool last = k + 1 == steps;
      if (opts.reports && ((o.state.step % static_cast<std::size_t>(opts.report_every)) == 0 || last))
        res.reports.push_back(std::move(r));
    }
    state = std::move(o.state);
    ++res.steps;
    maybe_snapshot(state);
  }
  res.final_state = std::move(state);
  return res;
}

ConvergenceResult converge_space(const ExperimentConfig& cfg, int threads) {
  const auto& conv = cfg.convergence;
  std::vector<int> levels = conv.ladder;
  levels.push_back(conv.reference);
  std::vector<std::function<Trajectory()>> jobs;
  for (int m : levels)
    jobs.push_back([&cfg, m] { return plain_run(cfg, with_cells(cfg.mesh, m), cfg.scheme); });
  auto runs = run_parallel(std::move(jobs), threads);

  ConvergenceResult out;
  out.table.resolution_label = "dx";
  for (const auto& r : runs) {
    out.structure.push_back(r.structure);
    if (r.failure && !out.failure) out.failure = r.failure;
  }
  if (out.failure) return out;
  const Mesh fine(with_cells(cfg.mesh, conv.reference));
  const auto& ref = runs.back().final_state.u;
  for (std::size_t l = 0; l < conv.ladder.size(); ++l) {
    const Mesh coarse(with_cells(cfg.mesh, conv.ladder[l]));
    ErrorRow row;
    row.resolution = coarse.h();
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const Field proj = project_reference(fine, ref[i], coarse, conv.projection);
      row.species.push_back(error_norms(coarse, runs[l].final_state.u[i], proj));
    }
    out.table.rows.push_back(std::move(row));
  }
  out.orders = fit_rate(out.table);
  return out;
}

ConvergenceResult converge_time(const ExperimentConfig& cfg, int threads) {
  const auto& conv = cfg.convergence;
  std::vector<int> levels = conv.ladder;
  levels.push_back(conv.reference);
  std::vector<std::function<Trajectory()>> jobs;
  for (int n : levels) {
    jobs.push_back([&cfg, n] {
      SchemeConfig s = cfg.scheme;
      s.dt = s.T / n;
      return plain_run(cfg, cfg.mesh, s);
    });
  }
  auto runs = run_parallel(std::move(jobs), threads);

  ConvergenceResult out;
  out.table.resolution_label = "dt";
  for (const auto& r : runs) {
    out.structure.push_back(r.structure);
    if (r.failure && !out.failure) out.failure = r.failure;
  }
  if (out.failure) return out;
  const Mesh mesh(cfg.mesh);
  const auto& ref = runs.back().final_state.u;
  for (std::size_t l = 0; l < conv.ladder.size(); ++l) {
    ErrorRow row;
    row.resolution = cfg.scheme.T / conv.ladder[l];
    for (std::size_t i = 0; i < ref.size(); ++i) row.species.push_back(error_norms(mesh, runs[l].final_state.u[i], ref[i]));
    out.table.rows.push_back(std::move(row));
  }
  out.orders = fit_rate(out.table);
  return out;
}

KernelCheck check_kernel(const ExperimentConfig& cfg) {
  const Mesh mesh(cfg.mesh);
  const DiscreteKernel W = discretize(cfg.kernel, mesh, cfg.backend);
  KernelCheck k;
  k.psd = check_psd(W);
  k.cstar = c_star(cfg.kernel, mesh, initial_fields(cfg, mesh), cfg.scheme.kappa, cfg.scheme.weight.alpha());
  return k;
}

int write_kernel_check(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  cfg.validate();
  std::filesystem::create_directories(out);
  const KernelCheck k = check_kernel(cfg);
  write_summary(out / "kernel.csv", {{"is_psd", bool_text(k.psd.is_psd)},
                                     {"min_eigenvalue", format_real(k.psd.min_eigenvalue)},
                                     {"psd_exact", bool_text(k.psd.exact)},
                                     {"c_star", format_real(k.cstar.c_star)},
                                     {"small_mass_threshold", format_real(k.cstar.threshold)},
                                     {"small_mass", bool_text(k.cstar.small_enough)}});
  spdlog::info("kernel: psd={} (min eigenvalue {}), c*={} vs threshold {}", k.psd.is_psd, k.psd.min_eigenvalue,
               k.cstar.c_star, k.cstar.threshold);
  return 0;
}

int run_experiment(const ExperimentConfig& cfg_in, ExperimentMode mode, const std::filesystem::path& out,
                   int threads) {
  ExperimentConfig cfg = cfg_in;
  cfg.mode = mode;
  cfg.validate();
  std::filesystem::create_directories(out);
  const int species = cfg.kernel.species;

  if (mode == ExperimentMode::ConvergeSpace || mode == ExperimentMode::ConvergeTime) {
    const ConvergenceResult r = mode == ExperimentMode::ConvergeSpace ? converge_space(cfg, threads)
                                                                      : converge_time(cfg, threads);
    std::vector<std::pair<std::string, std::string>> kv;
    for (std::size_t k = 0; k < r.structure.size(); ++k)
      append_structure(kv, r.structure[k], k + 1 == r.structure.size() ? "reference_" : "run" + std::to_string(k) + "_");
    if (r.failure) {
      kv.emplace_back("failure", *r.failure);
      write_summary(out / "summary.csv", kv);
      return 3;
    }
    std::vector<std::string> header{r.table.resolution_label};
    for (int i = 1; i <= species; ++i) {
      header.push_back("linf_u" + std::to_string(i));
      header.push_back("l1_u" + std::to_string(i));
    }
    CsvWriter errors(out / "errors.csv", header);
    for (const auto& row : r.table.rows) {
      std::vector<std::string> cells{format_real(row.resolution)};
      for (const auto& e : row.species) {
        cells.push_back(format_real(e.linf));
        cells.push_back(format_real(e.l1));
      }
      errors.row(cells);
    }
    CsvWriter orders(out / "orders.csv", {"species", "norm", "order", "last_pair_order", "points"});
    for (std::size_t i = 0; i < r.orders.size(); ++i) {
      const auto sp = "u" + std::to_string(i + 1);
      for (const auto& [norm, fit] : {std::pair{"linf", r.orders[i].linf}, std::pair{"l1", r.orders[i].l1}}) {
        orders.row({sp, norm, format_real(fit.order), format_real(fit.last_pair_order), std::to_string(fit.points)});
        spdlog::info("{} {} order {:.3f} (last pair {:.3f})", sp, norm, fit.order, fit.last_pair_order);
      }
    }
    write_summary(out / "summary.csv", kv);
    return 0;
  }

  SimulationOptions opts;
  opts.reports = true;
  opts.verify = cfg.verify_entropy || mode == ExperimentMode::Entropy;
  opts.snapshot_times = cfg.output.snapshot_times;
  opts.report_every = cfg.output.report_every;
  const SimulationResult r = simulate(cfg, cfg.mesh, cfg.scheme, opts);
  const Mesh mesh(cfg.mesh);

  CsvWriter reports(out / "reports.csv", report_header(species));
  for (const auto& rep : r.reports) reports.row(report_row(rep));
  if (mode == ExperimentMode::Entropy) {
    CsvWriter ent(out / "entropy.csv", {"step", "time", "H_B", "H_R"});
    for (const auto& rep : r.reports)
      ent.row({std::to_string(rep.step), format_real(rep.time), format_real(rep.H_B), format_real(rep.H_R)});
  }
  for (const auto& s : r.snapshots)
    write_snapshot(out / ("snapshot_" + std::to_string(s.step) + ".csv"), mesh, s.u);
  write_snapshot(out / "final.csv", mesh, r.final_state.u);

  std::vector<std::pair<std::string, std::string>> kv;
  append_structure(kv, r.structure);
  kv.emplace_back("is_psd", bool_text(r.psd.is_psd));
  kv.emplace_back("min_eigenvalue", format_real(r.psd.min_eigenvalue));
  kv.emplace_back("c_star", format_real(r.cstar.c_star));
  kv.emplace_back("small_mass_threshold", format_real(r.cstar.threshold));
  kv.emplace_back("entropy_failures", std::to_string(r.entropy_failures));
  kv.emplace_back("rao_increases", std::to_string(r.rao_increases));
  kv.emplace_back("picard_total", std::to_string(r.picard_total));
  kv.emplace_back("picard_max", std::to_string(r.picard_max));
  for (int i = 0; i < species; ++i) {
    const auto dm = dominant_mode(mesh, r.final_state.u[static_cast<std::size_t>(i)]);
    kv.emplace_back("dominant_wavelength_u" + std::to_string(i + 1), format_real(dm.wavelength));
    kv.emplace_back("dominant_mode_u" + std::to_string(i + 1), std::to_string(dm.frequency.front()));
  }
  if (r.failure) kv.emplace_back("failure", *r.failure);
  write_summary(out / "summary.csv", kv);
  return r.failure ? 3 : 0;
}

}  // namespace sgfv
