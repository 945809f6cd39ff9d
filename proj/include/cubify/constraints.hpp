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

#include <string>
#include <vector>

#include "cubify/mesh.hpp"

namespace cubify {

struct PointConstraint {
  int vertex;
  Vec3 target;
};

/// Pins one coordinate (0 = x, 1 = y, 2 = z) of a vertex to `value`.
struct PlaneConstraint {
  int vertex;
  int axis;
  double value;
};

/// Positional constraints applied in the global step. Fixed vertices keep
/// their rest position, point handles move to a target, plane constraints
/// pin a single coordinate.
struct Constraints {
  std::vector<int> fixed;
  std::vector<PointConstraint> points;
  std::vector<PlaneConstraint> planes;

  bool empty() const { return fixed.empty() && points.empty() && planes.empty(); }
};

/// Pinned (vertex, value) pairs for each coordinate axis, sorted by vertex.
struct AxisPins {
  std::vector<std::pair<int, double>> axis[3];
};

/// Checks indices and axes and merges the constraints into per-axis pins
/// using `rest` for fixed vertices. Throws InvalidArgument when an index is
/// out of range or two constraints give one coordinate different values.
AxisPins resolve_constraints(const Constraints& constraints, const Positions& rest);

/// {"fixed": [i...], "points": [{"idx": i, "target": [x, y, z]}...],
///  "planes": [{"idx": i, "axis": "x"|"y"|"z"|0..2, "value": v}...]}
Constraints parse_constraints_json(const std::string& text);

Constraints load_constraints_file(const std::string& path);

}  // namespace cubify
