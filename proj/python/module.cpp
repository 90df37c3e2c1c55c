// Python bindings for the measure/operator core.  Heavy work stays in C++;
// the bindings copy data at the boundary so ownership never crosses it.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "czlab/config.hpp"
#include "czlab/kernel.hpp"
#include "czlab/measure.hpp"
#include "czlab/operators.hpp"
#include "czlab/reflectionless.hpp"
#include "czlab/report.hpp"
#include "czlab/suite.hpp"

namespace py = pybind11;
using namespace czlab;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> as_vector(const DoubleArray& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

// Flat row-major buffer -> owning numpy array of the given shape.
py::array_t<double> as_array(const std::vector<double>& v, std::vector<py::ssize_t> shape) {
  py::array_t<double> out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ApplyParams apply_params(const std::string& method, double tree_rel_tol) {
  ApplyParams ap;
  if (method == "dense")
    ap.method = ApplyMethod::Dense;
  else if (method == "clustered")
    ap.method = ApplyMethod::Clustered;
  else if (method == "auto")
    ap.method = ApplyMethod::Auto;
  else
    throw std::invalid_argument("method must be auto, dense, or clustered");
  ap.tree.rel_tol = tree_rel_tol;
  return ap;
}

}  // namespace

PYBIND11_MODULE(_czlab, m) {
  m.doc() = "numerical laboratory for singular integral operators on measures";

  py::class_<PointMeasure>(m, "Measure")
      .def(py::init([](int dim, DoubleArray atoms, DoubleArray weights, double mesh_scale,
                       double nominal_s, const std::string& tag) {
             return PointMeasure(dim, as_vector(atoms), as_vector(weights), mesh_scale, nominal_s,
                                 tag);
           }),
           py::arg("dim"), py::arg("atoms"), py::arg("weights"), py::arg("mesh_scale"),
           py::arg("nominal_s"), py::arg("tag"))
      .def("__len__", &PointMeasure::size)
      .def_property_readonly("dim", &PointMeasure::dim)
      .def_property_readonly("total_mass", &PointMeasure::total_mass)
      .def_property_readonly("mesh_scale", &PointMeasure::mesh_scale)
      .def_property_readonly("nominal_s", &PointMeasure::nominal_s)
      .def_property_readonly("tag", &PointMeasure::generator_tag)
      .def_property_readonly("barycenter", &PointMeasure::barycenter)
      .def("atoms",
           [](const PointMeasure& mu) {
             return as_array(mu.atoms_flat(),
                             {static_cast<py::ssize_t>(mu.size()), mu.dim()});
           })
      .def("weights",
           [](const PointMeasure& mu) {
             return as_array(mu.weights(), {static_cast<py::ssize_t>(mu.size())});
           })
      .def("__repr__", [](const PointMeasure& mu) {
        return "<Measure " + mu.generator_tag() + " atoms=" + std::to_string(mu.size()) +
               " mass=" + std::to_string(mu.total_mass()) + ">";
      });

  py::class_<CZKernel>(m, "Kernel")
      .def_readonly("name", &CZKernel::name)
      .def_readonly("d", &CZKernel::d)
      .def_readonly("s", &CZKernel::s)
      .def_readonly("ncomp", &CZKernel::ncomp)
      .def("__repr__", [](const CZKernel& K) {
        return "<Kernel " + K.name + " d=" + std::to_string(K.d) + " s=" + std::to_string(K.s) +
               ">";
      });

  m.def("measure_from_spec", &measure_from_spec, py::arg("json_text"),
        "Build a generator measure from its JSON description.");
  m.def("kernel_from_spec", &kernel_from_spec, py::arg("json_text"));
  m.def("riesz_kernel", &make_riesz_kernel, py::arg("d"), py::arg("s"));
  m.def("cauchy_kernel", &make_cauchy_kernel);
  m.def("conj_cauchy_kernel", &make_conj_cauchy_kernel);
  m.def("save_measure", &save_measure_text, py::arg("measure"), py::arg("path"));
  m.def("load_measure", &load_measure_text, py::arg("path"));
  m.def("rescale", &rescale, py::arg("measure"), py::arg("lam"), py::arg("s"));

  m.def(
      "ball_mass",
      [](const PointMeasure& mu, DoubleArray x, double r) {
        if (x.size() != mu.dim()) throw std::invalid_argument("center dimension mismatch");
        return ball_mass(mu, x.data(), r);
      },
      py::arg("measure"), py::arg("center"), py::arg("radius"));
  m.def("growth_constant", &growth_constant, py::arg("measure"), py::arg("s"), py::arg("radii"));

  m.def(
      "apply",
      [](const CZKernel& K, const PointMeasure& mu, double delta, py::object f,
         DoubleArray targets, const std::string& method, double tree_rel_tol) {
        std::vector<double> fv;
        if (f.is_none())
          fv.assign(mu.size(), 1.0);
        else
          fv = as_vector(f.cast<DoubleArray>());
        std::vector<double> tv = as_vector(targets);
        if (tv.size() % static_cast<std::size_t>(mu.dim()) != 0)
          throw std::invalid_argument("targets must be (n, d)");
        std::vector<double> out =
            apply_truncated(K, mu, delta, fv, tv, apply_params(method, tree_rel_tol));
        py::ssize_t nt = static_cast<py::ssize_t>(tv.size()) / mu.dim();
        return as_array(out, {nt, K.ncomp});
      },
      py::arg("kernel"), py::arg("measure"), py::arg("delta"), py::arg("f"), py::arg("targets"),
      py::arg("method") = "auto", py::arg("tree_rel_tol") = 1e-7,
      "Truncated operator field at the targets, shape (targets, components).");

  m.def(
      "operator_norm",
      [](const CZKernel& K, const PointMeasure& mu, double delta, double tol, int max_iter,
         std::uint64_t seed) {
        OperatorNormResult r = operator_norm(K, mu, delta, tol, max_iter, seed);
        py::dict d;
        d["value"] = r.value;
        d["iterations"] = r.iterations;
        d["restarts"] = r.restarts;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("kernel"), py::arg("measure"), py::arg("delta"), py::arg("tol") = 1e-9,
      py::arg("max_iter") = 10000, py::arg("seed") = 7777);

  m.def(
      "defect",
      [](const CZKernel& K, const PointMeasure& mu, DoubleArray center, double R) {
        DefectResult r = defect(K, mu, as_vector(center), R);
        py::dict d;
        d["max_rel"] = r.max_rel;
        d["max_raw"] = r.max_raw;
        d["argmax"] = r.argmax;
        d["members"] = r.members;
        d["member_rel"] = as_array(r.member_rel, {static_cast<py::ssize_t>(r.member_rel.size())});
        return d;
      },
      py::arg("kernel"), py::arg("measure"), py::arg("center"), py::arg("radius"),
      "Largest normalized pairing over the standard bump family in the ball.");

  m.def(
      "ttilde_one",
      [](const CZKernel& K, const PointMeasure& mu, DoubleArray deltas, DoubleArray targets) {
        std::vector<double> dv = as_vector(deltas), tv = as_vector(targets);
        if (tv.size() % static_cast<std::size_t>(mu.dim()) != 0)
          throw std::invalid_argument("targets must be (n, d)");
        ReferenceBall ref = default_reference(mu);
        std::vector<double> out = ttilde_one(K, mu, dv, tv, ref);
        py::ssize_t nd = static_cast<py::ssize_t>(dv.size());
        py::ssize_t nt = static_cast<py::ssize_t>(tv.size()) / mu.dim();
        return as_array(out, {nd, nt, K.ncomp});
      },
      py::arg("kernel"), py::arg("measure"), py::arg("deltas"), py::arg("targets"),
      "Normalized truncated potential, shape (deltas, targets, components).");

  m.def(
      "run_config",
      [](const std::string& json_text, bool with_timing) {
        Report rep = run_experiment(load_config_text(json_text));
        return rep.to_json(with_timing).dump(2);
      },
      py::arg("json_text"), py::arg("with_timing") = true,
      "Run one configured experiment; returns the report as a JSON string.");
  m.def(
      "run_config_file",
      [](const std::string& path, bool with_timing) {
        Report rep = run_experiment(load_config_file(path));
        return rep.to_json(with_timing).dump(2);
      },
      py::arg("path"), py::arg("with_timing") = true);
  m.def(
      "quick_suite",
      [](std::uint64_t seed) { return run_quick_suite(seed).to_json().dump(2); },
      py::arg("seed") = 1234);
  m.def(
      "acceptance_suite",
      [](std::uint64_t seed) { return run_acceptance_suite(seed).to_json().dump(2); },
      py::arg("seed") = 1234);

  m.def("build_identifier", &build_identifier);
}
