// Copyright 2026 The Cubify Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "cubify/constraints.hpp"
#include "cubify/error.hpp"
#include "cubify/geometry.hpp"
#include "cubify/obj.hpp"
#include "cubify/progressive.hpp"
#include "cubify/qp.hpp"
#include "cubify/rotation.hpp"
#include "cubify/shapes.hpp"
#include "cubify/style.hpp"
#include "cubify/stylizer.hpp"
#include "cubify/validate.hpp"

namespace py = pybind11;
using namespace cubify;

namespace {

StyleControls make_controls(double lambda, const std::string& controls_json) {
  StyleControls c;
  c.lambda = lambda;
  if (!controls_json.empty()) c = parse_controls_json(controls_json, c);
  return c;
}

Constraints make_constraints(const std::string& constraints_json) {
  return constraints_json.empty() ? Constraints{} : parse_constraints_json(constraints_json);
}

StylizeParams make_params(int max_iterations, double stop_tolerance, int threads, bool bbox_stop) {
  StylizeParams p;
  p.max_iterations = max_iterations;
  p.stop_tolerance = stop_tolerance;
  p.threads = threads;
  if (bbox_stop) p.stop_measure = StopMeasure::kBoundingBox;
  return p;
}

py::dict result_dict(const StylizeResult& r) {
  py::list trace;
  for (const IterationRecord& t : r.trace) {
    py::dict d;
    d["iteration"] = t.iteration;
    d["rel_displacement"] = t.rel_displacement;
    d["energy"] = t.energy;
    d["energy_before_global"] = t.energy_before_global;
    d["cubeness"] = t.cubeness;
    d["millis"] = t.millis;
    trace.append(d);
  }
  py::dict out;
  out["positions"] = r.positions;
  out["iterations"] = r.iterations;
  out["converged"] = r.converged;
  out["rel_displacement"] = r.rel_displacement;
  out["preprocess_seconds"] = r.preprocess_seconds;
  out["online_seconds"] = r.online_seconds;
  out["trace"] = trace;
  return out;
}

py::dict report_dict(const ValidationReport& r) {
  py::dict d;
  d["ok"] = r.ok();
  d["manifold"] = r.manifold();
  d["vertices"] = r.num_vertices;
  d["faces"] = r.num_faces;
  d["components"] = r.components;
  d["boundary_loops"] = r.boundary_loops;
  d["orientable"] = r.orientable;
  d["non_manifold_edges"] = r.non_manifold_edges;
  d["degenerate_faces"] = r.degenerate_faces;
  d["summary"] = r.summary();
  return d;
}

}  // namespace

PYBIND11_MODULE(_cubify, m) {
  m.doc() = "Cubic stylization of triangle meshes";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<MeshError>(m, "MeshError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<TriangleMesh>(m, "Mesh")
      .def(py::init([](const Positions& v, const Faces& f) { return make_mesh(v, f); }), py::arg("positions"),
           py::arg("faces"))
      .def_readonly("positions", &TriangleMesh::positions)
      .def_readonly("faces", &TriangleMesh::faces)
      .def_property_readonly("num_vertices", &TriangleMesh::num_vertices)
      .def_property_readonly("num_faces", &TriangleMesh::num_faces)
      .def(
          "to_obj",
          [](const TriangleMesh& mesh, std::optional<Positions> positions) {
            return save_obj(mesh, positions ? &*positions : nullptr);
          },
          py::arg("positions") = std::nullopt);

  m.def("load_obj", [](const std::string& text) { return load_obj(text); }, py::arg("text"));
  m.def("load_obj_file", &load_obj_file, py::arg("path"));
  m.def("validate", [](const TriangleMesh& mesh) { return report_dict(validate(mesh)); }, py::arg("mesh"));
  m.def("cubeness_score", py::overload_cast<const Positions&, const Faces&>(&cubeness_score), py::arg("positions"),
        py::arg("faces"));
  m.def("vertex_normals", [](const TriangleMesh& mesh) { return vertex_normals(mesh); }, py::arg("mesh"));

  m.def("icosphere", &shapes::icosphere, py::arg("level"), py::arg("radius") = 1.0);
  m.def("cube", &shapes::cube, py::arg("n") = 1, py::arg("half_extent") = 0.5);
  m.def("torus", &shapes::torus, py::arg("nu"), py::arg("nv"), py::arg("major") = 1.0, py::arg("minor") = 0.4);

  m.def("shrinkage", py::overload_cast<const Vec3&, const Vec3&>(&shrinkage), py::arg("x"), py::arg("kappa"));
  m.def("orthogonal_procrustes", &orthogonal_procrustes, py::arg("m"));
  m.def(
      "qp_z_step",
      [](const Vec3& v, double rho, double weight, const Eigen::MatrixX3d& b) {
        return qp_z_step(v, rho, weight, b);
      },
      py::arg("v"), py::arg("rho"), py::arg("weight"), py::arg("b"));
  m.def("affine_fit", [](const Eigen::Matrix3Xd& q) { return affine_fit(q); }, py::arg("q"));

  m.def(
      "stylize",
      [](const TriangleMesh& mesh, double lambda, int max_iterations, double stop_tolerance, int threads,
         const std::string& controls, const std::string& constraints, bool bbox_stop) {
        const StyleControls c = make_controls(lambda, controls);
        const Constraints k = make_constraints(constraints);
        const StylizeParams p = make_params(max_iterations, stop_tolerance, threads, bbox_stop);
        StylizeResult r;
        {
          py::gil_scoped_release release;
          r = stylize(mesh, p, k, c);
        }
        return result_dict(r);
      },
      py::arg("mesh"), py::arg("lam") = 0.2, py::arg("max_iterations") = 1000, py::arg("stop_tolerance") = 3e-3,
      py::arg("threads") = 1, py::arg("controls") = "", py::arg("constraints") = "", py::arg("bbox_stop") = false);

  py::class_<CollapseLog, std::shared_ptr<CollapseLog>>(m, "CollapseLog")
      .def_property_readonly("coarse", [](const CollapseLog& l) { return l.coarse; })
      .def_property_readonly("num_records", [](const CollapseLog& l) { return l.records.size(); })
      .def_property_readonly("regularized_count", &CollapseLog::regularized_count)
      .def_readonly("fingerprint", &CollapseLog::fingerprint)
      .def("reinflate", [](const CollapseLog& l, const Positions& p) { return reinflate(p, l); }, py::arg("coarse_positions"))
      .def("connectivity", [](const CollapseLog& l) { return replay_connectivity(l); })
      .def("serialize", [](const CollapseLog& l) { return py::bytes(serialize_log(l)); })
      .def_static("deserialize", [](const py::bytes& b) { return deserialize_log(std::string(b)); }, py::arg("data"));

  m.def(
      "decimate",
      [](const TriangleMesh& mesh, int target_faces, int min_faces) {
        DecimateOptions o;
        o.min_faces = min_faces;
        return decimate(mesh, target_faces, o);
      },
      py::arg("mesh"), py::arg("target_faces"), py::arg("min_faces") = 500);

  m.def(
      "fast_stylize",
      [](const TriangleMesh& mesh, double lambda, int target_faces, int min_faces, int max_iterations,
         double stop_tolerance, int threads, const std::string& controls, const std::string& constraints) {
        const StyleControls c = make_controls(lambda, controls);
        const Constraints k = make_constraints(constraints);
        const StylizeParams p = make_params(max_iterations, stop_tolerance, threads, false);
        FastStylizeOptions o;
        o.target_faces = target_faces;
        o.decimate.min_faces = min_faces;
        StylizeResult r;
        {
          py::gil_scoped_release release;
          r = fast_stylize(mesh, p, k, c, o);
        }
        return result_dict(r);
      },
      py::arg("mesh"), py::arg("lam"), py::arg("target_faces"), py::arg("min_faces") = 500,
      py::arg("max_iterations") = 1000, py::arg("stop_tolerance") = 3e-3, py::arg("threads") = 1,
      py::arg("controls") = "", py::arg("constraints") = "");
}
