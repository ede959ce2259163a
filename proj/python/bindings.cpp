#include "rfh/critical.hpp"
#include "rfh/error.hpp"
#include "rfh/functional.hpp"
#include "rfh/io.hpp"
#include "rfh/kernel_reduction.hpp"
#include "rfh/pipeline.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

namespace py = pybind11;
using namespace rfh;

namespace {

// Dicts cross the boundary as JSON text; the json module does the Python side.
Json to_cpp(const py::object& obj) {
  const auto dumps = py::module_::import("json").attr("dumps");
  return Json::parse(dumps(obj).cast<std::string>());
}

py::object to_py(const Json& j) {
  const auto loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

RunConfig config_of(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return load_config(obj.cast<std::string>());
  return config_from_json(to_cpp(obj));
}

py::dict gates_dict(const Gates& g) {
  py::dict d;
  d["ok"] = g.ok();
  d["boundary_square"] = g.boundary_square;
  d["residuals"] = g.residuals;
  d["ps_bounds"] = g.ps_bounds;
  d["quotient"] = g.quotient;
  d["failures"] = g.failures;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rfh, m) {
  m.doc() = "Truncated spectral models, critical points and Z/2 chain complexes";

  static py::exception<Error> error(m, "RfhError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error;
      py::object inst = exc(std::string(e.what()));
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(exc.ptr(), inst.ptr());
    }
  });

  py::class_<SpectralModel>(m, "SpectralModel")
      .def_property_readonly("kind", [](const SpectralModel& s) { return to_string(s.kind); })
      .def_readonly("labels", &SpectralModel::labels)
      .def_readonly("eigenvalues", &SpectralModel::eigenvalues)
      .def_readonly("complex_structure", &SpectralModel::complex_structure)
      .def_readonly("kernel_dim", &SpectralModel::kernel_dim)
      .def_property_readonly("real_dim", &SpectralModel::real_dim)
      .def_property_readonly("negative_dim", &SpectralModel::negative_dim)
      .def("to_dict", [](const SpectralModel& s) { return to_py(to_json(s)); });

  m.def(
      "build_model",
      [](const std::string& kind, std::vector<int> truncation, bool complex_structure) {
        return build_model(model_kind_from_string(kind), std::move(truncation), complex_structure);
      },
      py::arg("kind"), py::arg("truncation"), py::arg("complex_structure") = false);

  py::class_<Potential>(m, "Potential")
      .def_property_readonly("symmetry", [](const Potential& p) { return to_string(p.symmetry()); })
      .def("value", &Potential::value, py::arg("model"), py::arg("u"))
      .def(
          "gradient",
          [](const Potential& p, const SpectralModel& model, const Vec& u) {
            return p.jet(model, u, JetOrder::gradient).grad;
          },
          py::arg("model"), py::arg("u"))
      .def(
          "hessian",
          [](const Potential& p, const SpectralModel& model, const Vec& u) {
            return p.jet(model, u, JetOrder::hessian).hess;
          },
          py::arg("model"), py::arg("u"))
      .def("to_dict", [](const Potential& p) { return to_py(to_json(p)); });

  m.def(
      "potential",
      [](const py::object& spec, const SpectralModel& model) { return potential_from_json(to_cpp(spec), model); },
      py::arg("spec"), py::arg("model"), "Potential from a dict such as {'kind': 'sphere', 'symmetry': 'z2'}.");

  m.def(
      "action",
      [](const SpectralModel& model, const Potential& pot, const Vec& coeffs, double multiplier) {
        return action_value(model, pot, StatePoint{coeffs, multiplier});
      },
      py::arg("model"), py::arg("potential"), py::arg("coeffs"), py::arg("multiplier"));

  m.def(
      "flow",
      [](const SpectralModel& model, const Potential& pot, const Vec& z) { return flow_packed(model, pot, z); },
      py::arg("model"), py::arg("potential"), py::arg("z"), "Flow vector at packed z = [coeffs, multiplier].");

  m.def(
      "find_critical_points",
      [](const SpectralModel& model, const Potential& pot, double lo, double hi, int n_starts, std::uint64_t seed) {
        CriticalSearch s;
        s.window_lo = lo;
        s.window_hi = hi;
        s.n_starts = n_starts;
        s.seed = seed;
        return to_py(to_json(find_critical_points(model, pot, s)));
      },
      py::arg("model"), py::arg("potential"), py::arg("window_lo"), py::arg("window_hi"), py::arg("n_starts") = 200,
      py::arg("seed") = 0, "Critical points with action in the window, as a list of record dicts.");

  m.def(
      "kernel_minimizer",
      [](const SpectralModel& model, double p, const Vec& u) {
        const KernelProblem kp = make_kernel_problem(model, p);
        const KernelMinimum km = minimize_kernel_part(kp, u);
        const QJet q = q_jet(kp, u);
        py::dict d;
        d["v"] = km.v;
        d["q"] = q.value;
        d["q_grad"] = q.grad;
        d["orthogonality"] = orthogonality_residual(kp, u, km.v);
        return d;
      },
      py::arg("model"), py::arg("p"), py::arg("u"), "Kernel part v(u) minimizing the p-power term and Q(u).");

  m.def(
      "validate_config", [](const py::object& cfg) { config_of(cfg); }, py::arg("config"),
      "Raises RfhError (code ValidationError or ParseError) for a bad config dict or path.");

  m.def(
      "compute_complex",
      [](const py::object& cfg) {
        ComplexRun run;
        {
          const RunConfig c = config_of(cfg);
          py::gil_scoped_release release;
          run = compute_complex(c);
        }
        py::dict d;
        d["critical_points"] = to_py(critical_points_json(run));
        d["boundary"] = to_py(boundary_json(run));
        d["homology"] = to_py(homology_json(run));
        d["diagnostics"] = to_py(diagnostics_json(run));
        d["gates"] = gates_dict(run.gates);
        return d;
      },
      py::arg("config"), "Critical points, complex, homology and diagnostics for a config dict or path.");

  m.def(
      "run_pipeline",
      [](const py::object& cfg, const std::string& out_dir) {
        const RunConfig c = config_of(cfg);
        Gates g;
        {
          py::gil_scoped_release release;
          g = run_pipeline(c, out_dir);
        }
        return gates_dict(g);
      },
      py::arg("config"), py::arg("out_dir"), "Writes the JSON artifacts into out_dir and returns the gates.");

  m.def(
      "continuation",
      [](const py::object& cfg) {
        const RunConfig c = config_of(cfg);
        ContinuationRun run;
        {
          py::gil_scoped_release release;
          run = run_continuation(c);
        }
        return to_py(continuation_json(run));
      },
      py::arg("config"), "Continuation maps along the homotopy schedule of a config with a continuation block.");

  m.def(
      "report",
      [](const std::string& dir) {
        std::ostringstream out;
        emit_report(dir, out);
        return out.str();
      },
      py::arg("dir"), "Generator/rank table for an artifact directory; also writes the plot CSVs.");
}
