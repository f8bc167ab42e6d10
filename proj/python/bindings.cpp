#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "specpart/errors.hpp"
#include "specpart/io.hpp"
#include "specpart/json_util.hpp"
#include "specpart/oracles.hpp"
#include "specpart/parallel.hpp"
#include "specpart/scenario.hpp"

namespace py = pybind11;
using json = nlohmann::json;

namespace {

// Dicts cross the boundary as JSON text; the Python side does the (de)serialization.
std::string run_json(const std::string& config, const std::string& out) {
  return specpart::run(specpart::parse_config(json::parse(config)), out).dump();
}

std::string sweep_json(const std::string& config, const std::string& axis, const std::vector<double>& values,
                       const std::string& out) {
  return specpart::run_sweep(json::parse(config), axis, values, out).dump();
}

std::vector<double> eigenvalues(const std::string& domain, const std::string& potential, int count, double tol) {
  const auto spec = specpart::parse_domain(json::parse(domain));
  const specpart::DiscreteForm form(spec.mask(), specpart::Potential::from_json(json::parse(potential)));
  std::vector<double> out;
  for (const auto& e : specpart::k_smallest(form, count, tol)) out.push_back(e.lambda);
  return out;
}

py::tuple read_field(const std::filesystem::path& path) {
  const auto d = specpart::io::read_field(path);
  return py::make_tuple(d.dim, py::make_tuple(d.count[0], d.count[1]), d.values);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  auto base = py::register_exception<specpart::Error>(m, "SpecpartError");
  // also catchable as the matching builtin
  const py::tuple as_value = py::make_tuple(base, py::handle(PyExc_ValueError));
  const py::tuple as_runtime = py::make_tuple(base, py::handle(PyExc_RuntimeError));
  py::register_exception<specpart::ValidationError>(m, "ValidationError", as_value);
  py::register_exception<specpart::NumericalError>(m, "NumericalError", as_runtime);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("run_json", &run_json, py::arg("config"), py::arg("out") = "", py::call_guard<py::gil_scoped_release>());
  m.def("sweep_json", &sweep_json, py::arg("config"), py::arg("axis"), py::arg("values"), py::arg("out") = "",
        py::call_guard<py::gil_scoped_release>());
  m.def("eigenvalues_json", &eigenvalues, py::arg("domain"), py::arg("potential"), py::arg("count"),
        py::arg("tol") = specpart::kDefaultTol, py::call_guard<py::gil_scoped_release>());
  m.def("example_names", &specpart::example_names);
  m.def("content_hash", [](const std::string& s) { return specpart::io::content_hash(s); });
  m.def("read_field", &read_field, py::arg("path"));
  m.def("transcendental_root", &specpart::oracles::transcendental_root, py::arg("L"), py::arg("c"));
  m.def("halfstrip_ell_for", &specpart::oracles::halfstrip_ell_for, py::arg("m"), py::arg("L"), py::arg("c"));
  m.def("strip_room_energy", &specpart::oracles::strip_room_energy, py::arg("j"));
  m.def("rectangle_eigs", &specpart::oracles::rectangle_eigs, py::arg("a"), py::arg("b"), py::arg("count"));
  m.def("set_threads", &specpart::set_threads, py::arg("n"));
}
