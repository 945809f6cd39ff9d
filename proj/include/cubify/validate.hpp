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

#include <array>
#include <string>
#include <vector>

#include "cubify/mesh.hpp"

namespace cubify {

/// Faces whose area is below this fraction of the squared bounding-box
/// diagonal count as degenerate.
inline constexpr double kDegenerateAreaRatio = 1e-14;

struct ValidationReport {
  int num_vertices = 0;
  int num_faces = 0;
  int components = 0;
  int boundary_loops = 0;
  bool orientable = true;
  std::vector<int> invalid_faces;  // out-of-range or repeated indices
  std::vector<std::array<int, 2>> non_manifold_edges;
  std::vector<int> non_manifold_vertices;
  std::vector<int> degenerate_faces;
  std::vector<int> isolated_vertices;

  bool manifold() const {
    return non_manifold_edges.empty() && non_manifold_vertices.empty();
  }
  /// True when the mesh can be stylized.
  bool ok() const {
    return invalid_faces.empty() && manifold() && degenerate_faces.empty();
  }
  std::string summary() const;
};

/// Reports non-manifold edges/vertices, degenerate faces, connected
/// components, orientability and boundary loop count. Never throws.
ValidationReport validate(const TriangleMesh& mesh);

/// Throws MeshError carrying the report summary unless `validate(mesh).ok()`.
void require_valid(const TriangleMesh& mesh);

/// Union-find over vertices joined by faces: a component label per vertex
/// (labels are 0..count-1 in order of first appearance) and the count.
std::vector<int> vertex_components(const TriangleMesh& mesh, int* count);

}  // namespace cubify
