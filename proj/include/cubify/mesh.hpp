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
#include <Eigen/Geometry>

#include <memory>
#include <string>
#include <vector>

namespace cubify {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
using TexCoords = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// The lines of an OBJ file as read, so that a save can reproduce every
/// record except vertex coordinates.
struct ObjSource {
  enum class Kind { kVertex, kVerbatim };
  struct Line {
    Kind kind = Kind::kVerbatim;
    std::string text;  // whole line for kVerbatim, trailing tokens for kVertex
  };
  std::vector<Line> lines;
  int vertex_count = 0;
};

/// Triangle mesh with optional texture coordinates and retained OBJ records.
struct TriangleMesh {
  Positions positions;
  Faces faces;
  TexCoords uvs;
  // Per-corner `vt` index for every triangle; empty when the file had none.
  // Corners without a texture coordinate hold -1.
  Faces uv_faces;
  std::shared_ptr<const ObjSource> source;

  int num_vertices() const { return static_cast<int>(positions.rows()); }
  int num_faces() const { return static_cast<int>(faces.rows()); }
};

/// Builds a bare mesh (no uvs, no OBJ records).
TriangleMesh make_mesh(Positions positions, Faces faces);

/// Length of the axis-aligned bounding-box diagonal of `positions`.
double bbox_diagonal(const Positions& positions);

}  // namespace cubify
