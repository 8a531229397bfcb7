#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>

#include <spdlog/spdlog.h>

#include "sgfv/error.hpp"
#include "sgfv/harness/config.hpp"
#include "sgfv/harness/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStep = 3;

struct Options {
  std::string config;
  std::string out = "out";
  int threads = 1;
  std::string fast_conv;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->required();
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--threads", o.threads, "worker threads for independent runs")->check(CLI::PositiveNumber);
  cmd->add_option("--fast-conv", o.fast_conv, "FFT convolution: on, off or auto")
      ->check(CLI::IsMember({"on", "off", "auto"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scharfetter-Gummel finite-volume solver for nonlocal cross-diffusion systems"};
  app.require_subcommand(1);
  Options o;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"run", "time-step one configuration and write reports and snapshots"},
                      {"converge-space", "spatial convergence study against a fine reference"},
                      {"converge-time", "temporal convergence study against a fine reference"},
                      {"entropy", "run with per-step entropy diagnostics"},
                      {"check-kernel", "positive-semidefiniteness and small-mass report"}};
  for (const auto& s : subs) add_common(app.add_subcommand(s.name, s.help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    sgfv::ExperimentConfig cfg = sgfv::load_config(o.config);
    if (!o.fast_conv.empty()) cfg.backend = sgfv::parse_backend(o.fast_conv);
    if (cmd == "check-kernel") return sgfv::write_kernel_check(cfg, o.out);
    return sgfv::run_experiment(cfg, sgfv::parse_mode(cmd), o.out, o.threads);
  } catch (const sgfv::ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const sgfv::StepFailure& e) {
    spdlog::error("{}", e.what());
    return kExitStep;
  } catch (const sgfv::SolverFailure& e) {
    spdlog::error("{}", e.what());
    return kExitStep;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
