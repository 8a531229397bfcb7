#include "sgfv/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sgfv/error.hpp"
#include "sgfv/fft.hpp"

namespace sgfv {

namespace {

using nlohmann::json;

void allow_keys(const json& j, const char* where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError(std::string(where) + ": unknown key '" + k + "'");
}

template <typename T>
T get(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + ": '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* key, const char* where, T fallback) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

// Scalar or per-axis list.
template <typename T>
std::vector<T> per_axis(const json& j, const char* key, const char* where, int dim) {
  if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing '" + key + "'");
  const json& v = j.at(key);
  if (v.is_array()) {
    auto out = get<std::vector<T>>(j, key, where);
    if (dim > 0 && static_cast<int>(out.size()) != dim)
      throw ConfigError(std::string(where) + ": '" + key + "' needs one entry per axis");
    return out;
  }
  if (dim <= 0) throw ConfigError(std::string(where) + ": scalar '" + key + "' needs 'dim'");
  return std::vector<T>(static_cast<std::size_t>(dim), get<T>(j, key, where));
}

MeshSpec parse_mesh(const json& j) {
  allow_keys(j, "mesh", {"dim", "lower", "upper", "cells"});
  int dim = get_or<int>(j, "dim", "mesh", 0);
  if (dim == 0 && j.contains("cells") && j.at("cells").is_array()) dim = static_cast<int>(j.at("cells").size());
  MeshSpec s;
  s.lower = per_axis<double>(j, "lower", "mesh", dim);
  s.upper = per_axis<double>(j, "upper", "mesh", dim);
  s.cells = per_axis<int>(j, "cells", "mesh", dim);
  s.validate();
  return s;
}

KernelSpec parse_kernel(const json& j, int species) {
  allow_keys(j, "kernel", {"shape", "eps", "radius", "strength", "extension", "quadrature_order"});
  const auto shape_name = get<std::string>(j, "shape", "kernel");
  if (shape_name == "none") return KernelSpec::zero(species);
  KernelShape shape;
  if (shape_name == "gaussian") {
    shape = KernelShape::gaussian(get<double>(j, "eps", "kernel"));
  } else if (shape_name == "tophat") {
    shape = KernelShape::tophat(get<double>(j, "radius", "kernel"));
  } else {
    throw ConfigError("kernel: unknown shape '" + shape_name + "'");
  }
  std::vector<double> strengths;
  const json& st = j.contains("strength") ? j.at("strength") : throw ConfigError("kernel: missing 'strength'");
  if (st.is_number()) {
    strengths.assign(static_cast<std::size_t>(species * species), st.get<double>());
  } else {
    std::vector<std::vector<double>> m;
    try {
      m = st.get<std::vector<std::vector<double>>>();
    } catch (const json::exception&) {
      throw ConfigError("kernel: 'strength' must be a number or a matrix");
    }
    if (static_cast<int>(m.size()) != species) throw ConfigError("kernel: strength matrix must be species x species");
    for (const auto& row : m) {
      if (static_cast<int>(row.size()) != species)
        throw ConfigError("kernel: strength matrix must be species x species");
      strengths.insert(strengths.end(), row.begin(), row.end());
    }
  }
  auto spec = KernelSpec::uniform(species, shape, strengths,
                                  parse_extension(get_or<std::string>(j, "extension", "kernel", "periodic")),
                                  get_or<int>(j, "quadrature_order", "kernel", 4));
  spec.validate();
  return spec;
}

SchemeConfig parse_scheme(const json& j) {
  allow_keys(j, "scheme",
             {"kappa", "dt", "steps", "T", "weight", "coupling", "picard_tol", "picard_max_iter", "linear"});
  SchemeConfig c;
  c.kappa = get<double>(j, "kappa", "scheme");
  c.T = get<double>(j, "T", "scheme");
  if (j.contains("steps") == j.contains("dt")) throw ConfigError("scheme: give exactly one of 'dt' and 'steps'");
  if (j.contains("steps")) {
    const int n = get<int>(j, "steps", "scheme");
    if (n < 1) throw ConfigError("scheme: 'steps' must be >= 1");
    c.dt = c.T / n;
  } else {
    c.dt = get<double>(j, "dt", "scheme");
  }
  c.weight = WeightKind::parse(get_or<std::string>(j, "weight", "scheme", "bernoulli"));
  c.coupling = parse_coupling(get_or<std::string>(j, "coupling", "scheme", "implicit"));
  c.picard_tol = get_or<double>(j, "picard_tol", "scheme", c.picard_tol);
  c.picard_max_iter = get_or<int>(j, "picard_max_iter", "scheme", c.picard_max_iter);
  if (j.contains("linear")) {
    const json& l = j.at("linear");
    allow_keys(l, "scheme.linear", {"method", "rel_tol", "max_iter"});
    c.linear.method = parse_linear_method(get_or<std::string>(l, "method", "scheme.linear", "bicgstab"));
    c.linear.rel_tol = get_or<double>(l, "rel_tol", "scheme.linear", c.linear.rel_tol);
    c.linear.max_iter = get_or<int>(l, "max_iter", "scheme.linear", c.linear.max_iter);
  }
  c.validate();
  return c;
}

InitialDescriptor parse_initial(const json& j) {
  allow_keys(j, "initial", {"type", "value", "amplitude", "lower", "upper", "function", "wavevector", "offset", "mass"});
  InitialDescriptor d;
  const auto type = get<std::string>(j, "type", "initial");
  if (type == "constant") {
    d.kind = InitialKind::Constant;
    d.amplitude = get<double>(j, "value", "initial");
  } else if (type == "box") {
    d.kind = InitialKind::Box;
    d.amplitude = get_or<double>(j, "amplitude", "initial", 1.0);
    d.lower = get<std::vector<double>>(j, "lower", "initial");
    d.upper = get<std::vector<double>>(j, "upper", "initial");
  } else if (type == "trig") {
    d.kind = InitialKind::Trig;
    const auto f = get_or<std::string>(j, "function", "initial", "sin");
    if (f != "sin" && f != "cos") throw ConfigError("initial: function must be 'sin' or 'cos'");
    d.cosine = f == "cos";
    d.amplitude = get_or<double>(j, "amplitude", "initial", 1.0);
    d.wavevector = get<std::vector<double>>(j, "wavevector", "initial");
    d.offset = get_or<double>(j, "offset", "initial", 0.0);
  } else {
    throw ConfigError("initial: unknown type '" + type + "'");
  }
  if (j.contains("mass")) d.mass = get<double>(j, "mass", "initial");
  return d;
}

}  // namespace

ExperimentMode parse_mode(std::string_view name) {
  if (name == "run") return ExperimentMode::Run;
  if (name == "converge_space" || name == "converge-space") return ExperimentMode::ConvergeSpace;
  if (name == "converge_time" || name == "converge-time") return ExperimentMode::ConvergeTime;
  if (name == "entropy") return ExperimentMode::Entropy;
  throw ConfigError("unknown experiment mode '" + std::string(name) + "'");
}

std::string_view mode_name(ExperimentMode m) noexcept {
  switch (m) {
    case ExperimentMode::Run:
      return "run";
    case ExperimentMode::ConvergeSpace:
      return "converge_space";
    case ExperimentMode::ConvergeTime:
      return "converge_time";
    case ExperimentMode::Entropy:
      return "entropy";
  }
  return "run";
}

void ExperimentConfig::validate() const {
  mesh.validate();
  kernel.validate();
  scheme.validate();
  if (static_cast<int>(initial.size()) != kernel.species)
    throw ConfigError("config: need one initial descriptor per species");
  const Mesh m(mesh);
  for (const auto& d : initial) d.validate(m);
  if (output.report_every < 1) throw ConfigError("config: report_every must be >= 1");
  if (mode == ExperimentMode::ConvergeSpace || mode == ExperimentMode::ConvergeTime) {
    const auto& c = convergence;
    if (c.ladder.size() < 3) throw ConfigError("config: a convergence ladder needs at least three entries");
    for (std::size_t k = 0; k < c.ladder.size(); ++k) {
      const int v = c.ladder[k];
      if (v < 2 || !is_power_of_two(static_cast<std::size_t>(v)))
        throw ConfigError("config: ladder entries must be powers of two");
      if (k && v <= c.ladder[k - 1]) throw ConfigError("config: ladder must increase strictly");
    }
    if (c.reference <= c.ladder.back() || !is_power_of_two(static_cast<std::size_t>(c.reference)))
      throw ConfigError("config: reference must be a power of two finer than the ladder");
    if (mode == ExperimentMode::ConvergeSpace) {
      scheme.num_steps();
    }
  } else {
    scheme.num_steps();
  }
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  allow_keys(j, "config",
             {"name", "mode", "mesh", "kernel", "scheme", "initial", "convergence", "output", "fast_conv",
              "verify_entropy", "description"});
  ExperimentConfig c;
  c.name = get_or<std::string>(j, "name", "config", c.name);
  c.mode = parse_mode(get_or<std::string>(j, "mode", "config", "run"));
  if (!j.contains("mesh")) throw ConfigError("config: missing 'mesh'");
  c.mesh = parse_mesh(j.at("mesh"));
  if (!j.contains("initial") || !j.at("initial").is_array()) throw ConfigError("config: 'initial' must be a list");
  for (const auto& d : j.at("initial")) c.initial.push_back(parse_initial(d));
  const int species = static_cast<int>(c.initial.size());
  if (species < 1) throw ConfigError("config: at least one species is required");
  if (!j.contains("kernel")) throw ConfigError("config: missing 'kernel'");
  c.kernel = parse_kernel(j.at("kernel"), species);
  if (!j.contains("scheme")) throw ConfigError("config: missing 'scheme'");
  c.scheme = parse_scheme(j.at("scheme"));
  if (j.contains("convergence")) {
    const json& cv = j.at("convergence");
    allow_keys(cv, "convergence", {"ladder", "reference", "projection"});
    c.convergence.ladder = get<std::vector<int>>(cv, "ladder", "convergence");
    c.convergence.reference = get<int>(cv, "reference", "convergence");
    c.convergence.projection =
        parse_projection(get_or<std::string>(cv, "projection", "convergence", "cell_average"));
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    allow_keys(o, "output", {"snapshot_times", "report_every"});
    c.output.snapshot_times = get_or<std::vector<double>>(o, "snapshot_times", "output", {});
    c.output.report_every = get_or<int>(o, "report_every", "output", 1);
  }
  c.backend = parse_backend(get_or<std::string>(j, "fast_conv", "config", "auto"));
  c.verify_entropy = get_or<bool>(j, "verify_entropy", "config", true);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace sgfv
