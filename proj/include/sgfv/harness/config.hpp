#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sgfv/harness/initial_data.hpp"
#include "sgfv/harness/projection.hpp"
#include "sgfv/kernel.hpp"
#include "sgfv/mesh.hpp"
#include "sgfv/scheme.hpp"

namespace sgfv {

enum class ExperimentMode { Run, ConvergeSpace, ConvergeTime, Entropy };

ExperimentMode parse_mode(std::string_view name);
std::string_view mode_name(ExperimentMode m) noexcept;

struct ConvergenceSettings {
  /// Cells per axis (space) or number of time steps (time), coarse to fine.
  std::vector<int> ladder;
  int reference = 0;
  ReferenceProjection projection = ReferenceProjection::CellAverage;
};

struct OutputSettings {
  std::vector<double> snapshot_times;
  int report_every = 1;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentMode mode = ExperimentMode::Run;
  MeshSpec mesh;
  KernelSpec kernel;
  SchemeConfig scheme;
  std::vector<InitialDescriptor> initial;
  ConvergenceSettings convergence;
  OutputSettings output;
  ConvolutionBackend backend = ConvolutionBackend::Auto;
  /// Evaluate the entropy inequalities every step (run and entropy modes).
  bool verify_entropy = true;

  /// Cross-field checks: species counts, ladder nesting, integer step counts.
  void validate() const;
};

/// Parses the JSON document; every problem surfaces as ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace sgfv
