#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sgfv/diagnostics.hpp"
#include "sgfv/harness/config.hpp"
#include "sgfv/harness/error_table.hpp"
#include "sgfv/kernel.hpp"
#include "sgfv/scheme.hpp"

namespace sgfv {

/// Mass drift and positivity collected over a trajectory.
struct StructureStats {
  std::size_t steps = 0;
  std::vector<double> initial_mass;
  double max_mass_drift = 0.0;  // relative, worst species and step
  double min_value = std::numeric_limits<double>::infinity();  // over steps >= 1
  /// Initial data nonnegative with positive mass, so strict positivity is expected.
  bool positivity_expected = true;
  std::size_t clamped = 0;

  void start(const Mesh& mesh, std::span<const Field> u0);
  void observe(const Mesh& mesh, const State& curr, const StepStats& stats);
};

struct Snapshot {
  std::size_t step = 0;
  double time = 0.0;
  std::vector<Field> u;
};

struct DominantMode {
  std::vector<int> frequency;  // signed integer mode per axis
  double wavelength = 0.0;
  double magnitude = 0.0;
};

/// Largest nonzero Fourier mode of a cell field.
DominantMode dominant_mode(const Mesh& mesh, std::span<const double> f);

struct SimulationOptions {
  bool reports = true;
  bool verify = true;
  std::vector<double> snapshot_times;
  int report_every = 1;
};

struct SimulationResult {
  State initial;
  State final_state;
  std::vector<StepReport> reports;
  std::vector<Snapshot> snapshots;
  StructureStats structure;
  PsdReport psd;
  CStarReport cstar;
  std::size_t steps = 0;
  std::size_t picard_total = 0;
  int picard_max = 0;
  std::size_t entropy_failures = 0;   // asserted inequality failures
  std::size_t rao_increases = 0;      // steps with H_R(u^k) > H_R(u^{k-1}) + dt * tol_scale
  std::optional<std::string> failure;
};

std::vector<Field> initial_fields(const ExperimentConfig& cfg, const Mesh& mesh);

/// Runs one trajectory on `mesh_spec` with `scheme` (other settings from cfg).
SimulationResult simulate(const ExperimentConfig& cfg, const MeshSpec& mesh_spec, const SchemeConfig& scheme,
                          const SimulationOptions& opts);

struct ConvergenceResult {
  ErrorTable table;
  std::vector<SpeciesOrders> orders;
  std::vector<StructureStats> structure;  // ladder runs, then the reference
  std::optional<std::string> failure;
};

ConvergenceResult converge_space(const ExperimentConfig& cfg, int threads = 1);
ConvergenceResult converge_time(const ExperimentConfig& cfg, int threads = 1);

struct KernelCheck {
  PsdReport psd;
  CStarReport cstar;
};

KernelCheck check_kernel(const ExperimentConfig& cfg);

/// Runs `mode` and writes its CSV artifacts into `out`. Returns the process
/// exit status (0, or 3 after a step failure; partial outputs are kept).
int run_experiment(const ExperimentConfig& cfg, ExperimentMode mode, const std::filesystem::path& out,
                   int threads = 1);

int write_kernel_check(const ExperimentConfig& cfg, const std::filesystem::path& out);

}  // namespace sgfv
