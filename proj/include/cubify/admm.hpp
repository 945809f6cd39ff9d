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
#include "cubify/style.hpp"

namespace cubify {

/// Settings of the per-vertex ADMM used in the local step. Defaults follow
/// the usual choices for this solver: rho0 = 1e-4, eps_abs = 1e-5,
/// eps_rel = 1e-3, mu = 10, tau = 2.
struct AdmmSettings {
  double rho0 = 1e-4;
  double eps_abs = 1e-5;
  double eps_rel = 1e-3;
  double mu = 10.0;
  double tau_incr = 2.0;
  double tau_decr = 2.0;
  int max_iterations = 100;
  bool adapt_penalty = true;
};

/// ADMM variables of one vertex. `u` is the scaled dual.
struct VertexAdmm {
  Mat3 rotation = Mat3::Identity();
  Vec3 z = Vec3::Zero();
  Vec3 u = Vec3::Zero();
  double rho = 1e-4;
};

struct LocalFitInfo {
  int iterations = 0;
  bool converged = false;
};

/// Component-wise soft thresholding (1 - kappa_j / |x_j|)_+ x_j, the exact
/// minimiser of sum_j kappa_j |z_j| + 1/2 |x - z|^2.
Vec3 shrinkage(const Vec3& x, const Vec3& kappa);

inline Vec3 shrinkage(const Vec3& x, double kappa) {
  return shrinkage(x, Vec3::Constant(kappa));
}

/// Residual balancing: grow rho by tau_incr when the primal residual
/// dominates by more than mu, shrink it by tau_decr in the opposite case,
/// and rescale u so that rho * u is unchanged.
void update_penalty(VertexAdmm& state, double primal_residual, double dual_residual,
                    const AdmmSettings& settings);

/// Fits the rotation of one vertex under ARAP + l1 by scaled-form ADMM.
/// `covariance` is D W D~^T for the vertex's spokes and rims; `state` is
/// read as the warm start and overwritten with the final iterate.
LocalFitInfo fit_rotation_l1(const Mat3& covariance, const Vec3& normal, double area,
                             const StyleOperator& style, VertexAdmm& state,
                             const AdmmSettings& settings);

/// Same, from the rest and deformed edge matrices (3 x k) and weights (k).
LocalFitInfo fit_rotation_l1(const Eigen::Matrix3Xd& rest_edges,
                             const Eigen::VectorXd& weights,
                             const Eigen::Matrix3Xd& deformed_edges, const Vec3& normal,
                             double area, const StyleOperator& style, VertexAdmm& state,
                             const AdmmSettings& settings);

/// The local objective 1/2 |R D - D~|_W^2 + area |W_style R n|_1.
double local_objective(const Mat3& rotation, const Eigen::Matrix3Xd& rest_edges,
                       const Eigen::VectorXd& weights,
                       const Eigen::Matrix3Xd& deformed_edges, const Vec3& normal,
                       double area, const StyleOperator& style);

}  // namespace cubify
