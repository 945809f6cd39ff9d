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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cubify/constraints.hpp"
#include "cubify/mesh.hpp"
#include "cubify/style.hpp"
#include "cubify/stylizer.hpp"

namespace cubify {

/// One edge collapse. Vertex ids live in an extended id space: ids below
/// the original vertex count are original vertices and every collapse
/// creates a fresh id for the vertex it inserts.
struct CollapseRecord {
  int inserted = -1;
  int removed[2] = {-1, -1};
  Vec3 offset[2];  // rest p_j - p_i and p_k - p_i
  std::vector<int> ring;  // one-ring of the inserted vertex right after the collapse
  Eigen::Matrix3Xd affine;  // 3 x ring.size()
  bool regularized = false;

  using FacePatch = std::pair<int, Eigen::Vector3i>;  // face slot, triple before the collapse
  std::vector<FacePatch> removed_faces;
  std::vector<FacePatch> rewired_faces;
};

struct CollapseLog {
  int original_vertices = 0;
  int original_faces = 0;
  std::uint64_t fingerprint = 0;
  std::vector<CollapseRecord> records;  // collapse order

  /// Coarse mesh without uvs; coarse vertex c is id coarse_ids[c] and coarse
  /// face f occupies slot coarse_slots[f].
  TriangleMesh coarse;
  std::vector<int> coarse_ids;
  std::vector<int> coarse_slots;

  int id_count() const { return original_vertices + static_cast<int>(records.size()); }
  int regularized_count() const;
  /// An original vertex merged into `id` (the id itself for original ids).
  int representative(int id) const;
  /// Coarse index of every original vertex that survives, -1 otherwise.
  std::vector<int> coarse_index_of_original() const;
};

struct DecimateOptions {
  int min_faces = 500;
  std::vector<int> locked;  // never collapsed
  /// Collapses that turn a surviving face normal by more than acos(min_cos) are rejected.
  double min_normal_cos = 0.2;
  /// Re-validates the link condition on every touched vertex after each collapse.
  bool audit = false;
};

/// A = (Q Q^T)^{-1} Q, with Tikhonov term 1e-8 tr(Q Q^T) added when
/// lambda_min(Q Q^T) < 1e-10 tr(Q Q^T).
Eigen::Matrix3Xd affine_fit(const Eigen::Matrix3Xd& q, bool* regularized = nullptr);

/// Quadric-error edge collapses down to `target_faces`. Stops early when no
/// manifold-preserving collapse remains; the achieved count is
/// log.coarse.num_faces(). Throws InvalidArgument when target_faces >= |F| or
/// below options.min_faces.
CollapseLog decimate(const TriangleMesh& mesh, int target_faces, const DecimateOptions& options = {});

/// Replays the vertex splits on deformed coarse positions.
Positions reinflate(const Positions& coarse_positions, const CollapseLog& log);

/// Face array of the original mesh rebuilt from the log alone.
Faces replay_connectivity(const CollapseLog& log);

/// FNV-1a over positions, faces, the target and the decimation options.
std::uint64_t decimation_fingerprint(const TriangleMesh& mesh, int target_faces,
                                     const DecimateOptions& options);

void save_log(const CollapseLog& log, const std::string& path);
CollapseLog load_log(const std::string& path);
std::string serialize_log(const CollapseLog& log);
CollapseLog deserialize_log(const std::string& bytes);

/// Maps constraints and per-vertex controls onto the coarse mesh.
Constraints coarse_constraints(const Constraints& constraints, const CollapseLog& log);
StyleControls coarse_controls(const StyleControls& controls, const CollapseLog& log);

/// Vertices a decimation must keep for `constraints` to stay expressible.
std::vector<int> constrained_vertices(const Constraints& constraints);

struct FastStylizeOptions {
  int target_faces = 0;
  DecimateOptions decimate;
  /// Reused when its fingerprint matches; otherwise filled with the new log.
  CollapseLog* cache = nullptr;
};

/// Decimate, stylize the coarse mesh, reinflate. Only `positions` refers to
/// the full mesh; the trace, the observer's positions and `state` belong to
/// the coarse solve.
StylizeResult fast_stylize(const TriangleMesh& mesh, const StylizeParams& params,
                           const Constraints& constraints, const StyleControls& controls,
                           const FastStylizeOptions& options, const AdmmState* warm = nullptr,
                           const IterationObserver& observer = {});

}  // namespace cubify
