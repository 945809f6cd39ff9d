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
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <vector>

#include "cubify/admm.hpp"
#include "cubify/constraints.hpp"
#include "cubify/geometry.hpp"
#include "cubify/mesh.hpp"
#include "cubify/style.hpp"

namespace cubify {

/// Normaliser of the per-iteration displacement max_i |V~_i^{k+1} - V~_i^k|_inf.
enum class StopMeasure {
  /// max_i |V~_i^{k+1} - V_i|_inf, floored at kStopFloor times the bbox diagonal.
  kFromRest,
  /// The rest bounding-box diagonal.
  kBoundingBox,
};

inline constexpr double kStopFloor = 1e-3;

struct StylizeParams {
  AdmmSettings admm;
  /// Stop when the relative displacement drops below this.
  double stop_tolerance = 3e-3;
  StopMeasure stop_measure = StopMeasure::kFromRest;
  int max_iterations = 1000;
  int threads = 1;
};

/// Local-step variables of every vertex, carried across outer iterations
/// and reusable as the warm start of a later solve.
struct AdmmState {
  std::vector<VertexAdmm> vertices;

  int size() const { return static_cast<int>(vertices.size()); }
  static AdmmState cold(int vertex_count, double rho0);
};

/// One outer iteration. Energies are in model units; `energy_before_global`
/// is the energy with the new rotations at the previous positions, so
/// energy <= energy_before_global holds for every record.
struct IterationRecord {
  int iteration = 0;
  double rel_displacement = 0.0;
  double energy = 0.0;
  double energy_before_global = 0.0;
  double arap_energy = 0.0;
  double cubeness = 0.0;  // cubeness_score of the current positions
  double millis = 0.0;    // since the solve started
  int local_iterations = 0;  // inner ADMM iterations summed over vertices
  int local_unconverged = 0;
};

struct StylizeResult {
  Positions positions;
  int iterations = 0;
  double rel_displacement = 0.0;
  bool converged = false;
  bool stopped = false;  // interrupted by the observer
  std::vector<IterationRecord> trace;
  AdmmState state;
  double preprocess_seconds = 0.0;
  double online_seconds = 0.0;
};

/// Called after every outer iteration with the current positions (model
/// units); returning false stops the solve at that iteration boundary.
using IterationObserver = std::function<bool(const IterationRecord&, const Positions&)>;

class SolverContext;

/// Runs local/global iterations from the rest pose until the relative
/// displacement falls below the stop tolerance or the iteration cap is
/// reached. `warm` supplies z, u and rho from an earlier solve on the same
/// mesh.
StylizeResult stylize(const SolverContext& context, const StylizeParams& params,
                      const AdmmState* warm = nullptr,
                      const IterationObserver& observer = {});

/// Everything that stays fixed while the rotations and positions change:
/// spokes-and-rims neighbourhoods, areas, rest normals, style operators and
/// the factorised global system.
///
/// Internally the mesh is scaled to unit total area, which makes the
/// penalty and tolerance defaults independent of model size; every public
/// input and output is in model units.
class SolverContext {
 public:
  /// Validates the mesh, builds the differential quantities and factorises
  /// the global system with the constraints eliminated. Components without
  /// a constraint on some axis get their vertex nearest to the component
  /// centroid pinned on that axis.
  SolverContext(const TriangleMesh& mesh, const Constraints& constraints,
                const StyleControls& controls);

  /// Swaps in new style controls without refactorising.
  void set_controls(const StyleControls& controls);

  int num_vertices() const { return static_cast<int>(rest_.rows()); }
  const TriangleMesh& mesh() const { return mesh_; }
  double scale() const { return scale_; }
  double bbox_diagonal() const { return bbox_diagonal_; }
  const SpokesRims& neighborhoods() const { return neighborhoods_; }
  /// Barycentric areas and rest normals (model units).
  Eigen::VectorXd areas() const { return areas_ * (scale_ * scale_); }
  const Positions& normals() const { return normals_; }
  const std::vector<StyleOperator>& style() const { return style_; }
  const StyleControls& controls() const { return controls_; }
  /// Vertices pinned automatically to remove the translation null space.
  const std::vector<int>& auto_pinned() const { return auto_pinned_; }
  /// Number of distinct factorisations of the global system (1 or up to 3).
  int factorizations() const;
  const std::vector<int>& normal_fallbacks() const { return normal_fallbacks_; }

  /// The global quadratic form (model-independent: it depends only on the
  /// cotangent weights).
  const Eigen::SparseMatrix<double>& quadratic_form() const { return laplacian_; }

  /// Rotation of every vertex by ADMM on ARAP + l1, warm-started from and
  /// written back to `state`. Positions in model units.
  void local_step(AdmmState& state, const Positions& positions,
                  const AdmmSettings& settings = {}, int threads = 1,
                  IterationRecord* stats = nullptr) const;

  /// Exact minimiser of the ARAP term over positions for fixed rotations,
  /// honouring all constraints. Returns model units.
  Positions global_step(const std::vector<Mat3>& rotations) const;
  Positions global_step(const AdmmState& state) const;

  double arap_energy(const Positions& positions, const std::vector<Mat3>& rotations) const;
  double cubeness_energy(const std::vector<Mat3>& rotations) const;
  double total_energy(const Positions& positions, const std::vector<Mat3>& rotations) const {
    return arap_energy(positions, rotations) + cubeness_energy(rotations);
  }

 private:
  struct AxisSystem {
    std::vector<int> axes;             // coordinate axes sharing this system
    std::vector<int> free_index;       // vertex -> row among the free vertices, or -1
    std::vector<int> free_vertices;
    std::vector<int> pinned_vertices;
    Eigen::SparseMatrix<double> coupling;  // L restricted to free rows, pinned columns
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> solver;
  };

  friend StylizeResult stylize(const SolverContext&, const StylizeParams&, const AdmmState*,
                               const IterationObserver&);

  Positions to_internal(const Positions& p) const { return p / scale_; }
  Positions to_model(const Positions& x) const;
  void internal_local_step(AdmmState& state, const Positions& x, const AdmmSettings& settings,
                           int threads, IterationRecord* stats) const;
  Positions internal_global_step(const std::vector<Mat3>& rotations) const;
  double internal_arap(const Positions& x, const std::vector<Mat3>& rotations) const;
  double internal_cubeness(const std::vector<Mat3>& rotations) const;

  TriangleMesh mesh_;
  double scale_ = 1.0;
  double bbox_diagonal_ = 0.0;
  Positions rest_;  // internal units
  SpokesRims neighborhoods_;
  std::vector<Vec3> weighted_rest_edges_;  // w_e * d_e per spokes-rims entry
  Eigen::VectorXd areas_;                  // internal units
  Positions normals_;
  std::vector<int> normal_fallbacks_;
  StyleControls controls_;
  std::vector<StyleOperator> style_;
  Eigen::SparseMatrix<double> laplacian_;
  std::vector<AxisSystem> systems_;
  std::vector<double> pinned_value_[3];  // per axis, by vertex (internal units)
  std::vector<std::pair<int, double>> model_pins_[3];  // per axis (model units)
  std::vector<int> auto_pinned_;
};

/// Builds a context and runs the solve.
StylizeResult stylize(const TriangleMesh& mesh, const StylizeParams& params,
                      const Constraints& constraints, const StyleControls& controls,
                      const AdmmState* warm = nullptr,
                      const IterationObserver& observer = {});

/// Rotates the rest positions by `rotation` (which must be in SO(3)), so
/// that the l1 axes meet the shape differently. Throws InvalidArgument for
/// a non-rotation.
TriangleMesh apply_orientation(const TriangleMesh& mesh, const Mat3& rotation);

/// Positions rotated back by the inverse of `rotation`.
Positions undo_orientation(const Positions& positions, const Mat3& rotation);

}  // namespace cubify
