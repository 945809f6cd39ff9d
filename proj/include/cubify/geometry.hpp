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

#include <span>
#include <vector>

#include "cubify/mesh.hpp"

namespace cubify {

/// Individual cotangents are clamped to [-kCotangentClamp, kCotangentClamp].
inline constexpr double kCotangentClamp = 1e4;

/// One directed edge j->k of a triangle incident to the owning vertex. The
/// weight is half the cotangent of the angle opposite the edge inside
/// `face`, so the weights of an interior edge summed over its two incident
/// triangles give the usual ½(cot α + cot β).
struct RimEdge {
  int j;
  int k;
  int face;
  double weight;
};

/// Per-vertex "spokes and rims" edge sets: for vertex i, the three edges of
/// every triangle incident to i. Stored CSR-style; entries of a vertex are
/// sorted by (j, k, face).
struct SpokesRims {
  std::vector<int> offsets;
  std::vector<RimEdge> edges;

  int num_vertices() const { return static_cast<int>(offsets.size()) - 1; }
  std::span<const RimEdge> of(int i) const {
    return {edges.data() + offsets[i],
            static_cast<std::size_t>(offsets[i + 1] - offsets[i])};
  }
};

/// Half-cotangent of the angle at each corner, clamped. Row f, column c
/// belongs to the edge opposite corner c.
Eigen::MatrixX3d half_cotangents(const TriangleMesh& mesh);

/// Throws MeshError when a triangle has zero area.
SpokesRims build_neighborhoods(const TriangleMesh& mesh);

/// Barycentric areas: a third of the incident triangle areas.
Eigen::VectorXd vertex_areas(const TriangleMesh& mesh);

Eigen::VectorXd face_areas(const Positions& positions, const Faces& faces);

/// Area-weighted unit vertex normals. The faces around each vertex are
/// co-oriented across the one-ring before averaging, so non-orientable
/// meshes get a consistent local sign. Vertices whose weighted sum
/// cancels take an incident face normal and are listed in `fallbacks`.
Positions vertex_normals(const TriangleMesh& mesh,
                         std::vector<int>* fallbacks = nullptr);

/// Area-weighted mean over faces of the l1 norm of the unit face normal:
/// 1 when every face is axis aligned, at most sqrt(3).
double cubeness_score(const Positions& positions, const Faces& faces);

inline double cubeness_score(const TriangleMesh& mesh) {
  return cubeness_score(mesh.positions, mesh.faces);
}

/// Incident face lists per vertex.
std::vector<std::vector<int>> vertex_faces(const TriangleMesh& mesh);

}  // namespace cubify
