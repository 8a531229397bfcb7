#include <algorithm>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sgfv/diagnostics.hpp"
#include "sgfv/error.hpp"
#include "sgfv/harness/config.hpp"
#include "sgfv/harness/experiment.hpp"
#include "sgfv/kernel.hpp"
#include "sgfv/mesh.hpp"
#include "sgfv/weights.hpp"

namespace py = pybind11;
using namespace sgfv;

namespace {

py::array_t<double> to_numpy(const Field& f) {
  py::array_t<double> a(static_cast<py::ssize_t>(f.size()));
  std::copy(f.begin(), f.end(), a.mutable_data());
  return a;
}

py::list to_numpy(const std::vector<Field>& u) {
  py::list out;
  for (const auto& f : u) out.append(to_numpy(f));
  return out;
}

py::dict structure_dict(const StructureStats& s) {
  py::dict d;
  d["steps"] = s.steps;
  d["initial_mass"] = s.initial_mass;
  d["max_mass_drift"] = s.max_mass_drift;
  d["min_value"] = s.min_value;
  d["positivity_expected"] = s.positivity_expected;
  d["clamped"] = s.clamped;
  return d;
}

py::dict psd_dict(const PsdReport& p) {
  py::dict d;
  d["is_psd"] = p.is_psd;
  d["min_eigenvalue"] = p.min_eigenvalue;
  d["exact"] = p.exact;
  return d;
}

py::dict convergence_dict(const ConvergenceResult& r) {
  py::dict d;
  py::list rows;
  for (const auto& row : r.table.rows) {
    py::list sp;
    for (const auto& n : row.species) sp.append(py::make_tuple(n.linf, n.l1));
    rows.append(py::make_tuple(row.resolution, sp));
  }
  d["resolution_label"] = r.table.resolution_label;
  d["rows"] = rows;
  py::list orders;
  for (const auto& o : r.orders) {
    py::dict od;
    od["linf"] = o.linf.order;
    od["l1"] = o.l1.order;
    od["linf_last_pair"] = o.linf.last_pair_order;
    od["l1_last_pair"] = o.l1.last_pair_order;
    orders.append(od);
  }
  d["orders"] = orders;
  py::list st;
  for (const auto& s : r.structure) st.append(structure_dict(s));
  d["structure"] = st;
  d["failure"] = r.failure ? py::cast(*r.failure) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_sgfv, m) {
  m.doc() = "Scharfetter-Gummel finite-volume solver for nonlocal cross-diffusion systems";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<NumericalStateError>(m, "NumericalStateError", PyExc_ArithmeticError);
  py::register_exception<StepFailure>(m, "StepFailure", PyExc_RuntimeError);
  py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);

  py::class_<Mesh>(m, "Mesh")
      .def(py::init([](std::vector<double> lower, std::vector<double> upper, std::vector<int> cells) {
             return Mesh(MeshSpec{std::move(lower), std::move(upper), std::move(cells)});
           }),
           py::arg("lower"), py::arg("upper"), py::arg("cells"))
      .def_property_readonly("dim", &Mesh::dim)
      .def_property_readonly("num_cells", &Mesh::num_cells)
      .def_property_readonly("cell_measure", &Mesh::cell_measure)
      .def_property_readonly("h", &Mesh::h)
      .def("dx", &Mesh::dx, py::arg("axis"))
      .def("centers", [](const Mesh& mesh, int axis) {
        Field c(mesh.num_cells());
        for (CellIndex k = 0; k < mesh.num_cells(); ++k) c[k] = mesh.center(k, axis);
        return to_numpy(c);
      }, py::arg("axis") = 0)
      .def("integrate", [](const Mesh& mesh, const Field& f) { return integrate(mesh, f); });

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static("from_json", &parse_config, py::arg("text"))
      .def_static("load", [](const std::filesystem::path& p) { return load_config(p); }, py::arg("path"))
      .def_readwrite("name", &ExperimentConfig::name)
      .def_property_readonly("mode", [](const ExperimentConfig& c) { return std::string(mode_name(c.mode)); })
      .def_property_readonly("species", [](const ExperimentConfig& c) { return c.kernel.species; })
      .def_property_readonly("mesh", [](const ExperimentConfig& c) { return Mesh(c.mesh); })
      .def_property_readonly("dt", [](const ExperimentConfig& c) { return c.scheme.dt; })
      .def_property_readonly("T", [](const ExperimentConfig& c) { return c.scheme.T; })
      .def("set_fast_conv", [](ExperimentConfig& c, std::string_view v) { c.backend = parse_backend(v); },
           py::arg("mode"));

  py::class_<DiscreteKernel>(m, "DiscreteKernel")
      .def(py::init([](const ExperimentConfig& c) { return discretize(c.kernel, Mesh(c.mesh), c.backend); }),
           py::arg("config"))
      .def_property_readonly("species", &DiscreteKernel::species)
      .def("potential", [](const DiscreteKernel& W, const std::vector<Field>& u) { return to_numpy(W.potential(u)); },
           py::arg("u"))
      .def("entropy_rao", [](const DiscreteKernel& W, const std::vector<Field>& u) { return entropy_rao(W, u); },
           py::arg("u"))
      .def("check_psd", [](const DiscreteKernel& W) { return psd_dict(check_psd(W)); });

  m.def("eval_B", [](std::string_view weight, double s) { return eval_B(WeightKind::parse(weight), s); },
        py::arg("weight"), py::arg("s"), "Weight function B(s) for s >= 0.");
  m.def("entropy_boltzmann", [](const Mesh& mesh, const std::vector<Field>& u) { return entropy_boltzmann(mesh, u); },
        py::arg("mesh"), py::arg("u"));
  m.def("initial_fields", [](const ExperimentConfig& c) { return to_numpy(initial_fields(c, Mesh(c.mesh))); },
        py::arg("config"));

  m.def(
      "simulate",
      [](const ExperimentConfig& c, bool verify) {
        SimulationOptions opts;
        opts.reports = false;
        opts.verify = verify;
        SimulationResult r;
        {
          py::gil_scoped_release release;
          r = simulate(c, c.mesh, c.scheme, opts);
        }
        py::dict d;
        d["steps"] = r.steps;
        d["initial"] = to_numpy(r.initial.u);
        d["final"] = to_numpy(r.final_state.u);
        d["structure"] = structure_dict(r.structure);
        d["psd"] = psd_dict(r.psd);
        d["entropy_failures"] = r.entropy_failures;
        d["rao_increases"] = r.rao_increases;
        d["picard_total"] = r.picard_total;
        d["failure"] = r.failure ? py::cast(*r.failure) : py::none();
        return d;
      },
      py::arg("config"), py::arg("verify") = true, "Time-step one configuration and return the final densities.");

  m.def(
      "converge_space",
      [](const ExperimentConfig& c, int threads) {
        ConvergenceResult r;
        {
          py::gil_scoped_release release;
          r = converge_space(c, threads);
        }
        return convergence_dict(r);
      },
      py::arg("config"), py::arg("threads") = 1);
  m.def(
      "converge_time",
      [](const ExperimentConfig& c, int threads) {
        ConvergenceResult r;
        {
          py::gil_scoped_release release;
          r = converge_time(c, threads);
        }
        return convergence_dict(r);
      },
      py::arg("config"), py::arg("threads") = 1);
  m.def(
      "check_kernel",
      [](const ExperimentConfig& c) {
        const auto k = check_kernel(c);
        py::dict d = psd_dict(k.psd);
        d["c_star"] = k.cstar.c_star;
        d["small_mass_threshold"] = k.cstar.threshold;
        d["small_mass"] = k.cstar.small_enough;
        return d;
      },
      py::arg("config"));
  m.def(
      "run_experiment",
      [](const ExperimentConfig& c, std::string_view mode, const std::filesystem::path& out, int threads) {
        py::gil_scoped_release release;
        return run_experiment(c, parse_mode(mode), out, threads);
      },
      py::arg("config"), py::arg("mode"), py::arg("out"), py::arg("threads") = 1,
      "Run a mode and write its CSV files into `out`; returns 0, or 3 after a step failure.");
}
