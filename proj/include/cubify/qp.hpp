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

#include "cubify/mesh.hpp"

namespace cubify {

struct QpOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;
};

struct QpResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  /// Max of stationarity, primal infeasibility and complementarity.
  double kkt_residual = 0.0;
};

/// Minimises 1/2 x^T H x + f^T x subject to A x <= b for a positive
/// semidefinite H, with a dense primal active-set method. Zero-curvature
/// directions are followed until a constraint blocks. Ties in the entering
/// and leaving constraint are broken by the lowest index, so the pivot
/// sequence is deterministic.
///
/// `start` must be feasible when given; otherwise a feasible point is found
/// first by a phase-one program. Throws NumericalError when the problem is
/// unbounded below or infeasible. On hitting the iteration cap the last
/// feasible iterate is returned with `converged == false`.
QpResult solve_small_qp(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                        const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd* start = nullptr,
                        const QpOptions& options = {});

/// argmin_z weight * |B z|_1 + rho/2 |v - z|^2, through the epigraph program
/// over (z, t) with [B -I; -B -I] [z; t] <= 0. Returns the z block.
Vec3 qp_z_step(const Vec3& v, double rho, double weight,
               const Eigen::MatrixX3d& b, QpResult* diagnostics = nullptr);

}  // namespace cubify
