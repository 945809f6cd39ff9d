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

#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "cubify/mesh.hpp"

namespace cubify {

/// lambda_i = low + (high - low) * (1 + direction . n_i) / 2, from the rest
/// normal n_i.
struct GaussRamp {
  Vec3 direction = Vec3::UnitX();
  double low = 0.0;
  double high = 0.0;
};

/// How strongly and in which basis the l1 term acts at each vertex.
///
/// Per-vertex lambda comes from `lambda_field`, else from `gauss_ramp`,
/// else from `lambda`. Frames map world coordinates into the frame in
/// which the l1 norm is measured; one frame applies to all vertices.
/// `polyhedron` (the m x 3 matrix B) and `axis_lambda` are exclusive.
struct StyleControls {
  double lambda = 0.0;
  std::vector<double> lambda_field;
  std::optional<GaussRamp> gauss_ramp;
  std::optional<Vec3> axis_lambda;
  std::vector<Mat3> frames;
  std::optional<Eigen::MatrixX3d> polyhedron;
};

/// Largest supported number of rows in a polyhedral matrix.
inline constexpr int kMaxPolyhedronRows = 16;

enum class StyleKind {
  kDiagonal,         // W = diag(d): plain shrinkage
  kRotatedDiagonal,  // W = diag(d) F: rotate, shrink, rotate back
  kGeneral,          // anything else: small QP
};

/// The per-vertex style operator W_i (m x 3, lambda_i folded in). The
/// cubeness term at vertex i is a_i |W_i R_i n_i|_1.
struct StyleOperator {
  StyleKind kind = StyleKind::kDiagonal;
  Eigen::MatrixX3d matrix;       // W_i
  Vec3 diagonal = Vec3::Zero();  // d for the diagonal kinds
  Mat3 frame = Mat3::Identity();  // F for kRotatedDiagonal
};

/// Composes the controls into one operator per vertex. `rest_normals`
/// drives the Gauss-map ramp. Throws InvalidArgument on inconsistent
/// controls (negative lambda, wrong field length, non-rotation frame, zero
/// or non-finite rows of B, B combined with per-axis weights).
std::vector<StyleOperator> build_style_operator(const StyleControls& controls,
                                                const Positions& rest_normals,
                                                int vertex_count);

/// Checks the controls without building anything.
void validate_controls(const StyleControls& controls, int vertex_count);

/// Number of rows m of the operator the controls produce (3 without B).
int style_rows(const StyleControls& controls);

/// argmin_z area * |W z|_1 + rho/2 |v - z|^2 for one vertex's operator.
Vec3 style_z_step(const StyleOperator& op, const Vec3& v, double rho, double area);

/// area * |W z|_1.
double style_penalty(const StyleOperator& op, const Vec3& z, double area);

/// Named polyhedral matrices: "cube" (identity), "tetrahedron" (m = 4),
/// "dodecahedron" (m = 6) and "icosahedron" (m = 10). Rows are unit face
/// normals of the solid, one per antipodal pair. Throws InvalidArgument on
/// an unknown name.
Eigen::MatrixX3d polyhedron_preset(const std::string& name);

/// Parses the JSON control sidecar:
///   {"lambda": s, "lambda_field": [...], "axis_lambda": [x, y, z],
///    "frames": [[w, x, y, z], ...] | {"labels": [...], "quaternions": [...]},
///    "B": [row-major m*3] | "preset name", "gauss_ramp": {"dir", "lo", "hi"}}
/// Every key is optional; `base` supplies the defaults.
StyleControls parse_controls_json(const std::string& text, const StyleControls& base = {});

StyleControls load_controls_file(const std::string& path, const StyleControls& base = {});

}  // namespace cubify
