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

#include "cubify/admm.hpp"

#include <algorithm>
#include <cmath>

#include "cubify/rotation.hpp"

namespace cubify {

Vec3 shrinkage(const Vec3& x, const Vec3& kappa) {
  Vec3 out;
  for (int j = 0; j < 3; ++j) {
    const double mag = std::abs(x[j]);
    out[j] = mag > kappa[j] ? (1.0 - kappa[j] / mag) * x[j] : 0.0;
  }
  return out;
}

void update_penalty(VertexAdmm& state, double r, double s, const AdmmSettings& settings) {
  if (r > settings.mu * s) {
    state.rho *= settings.tau_incr;
    state.u /= settings.tau_incr;
  } else if (s > settings.mu * r) {
    state.rho /= settings.tau_decr;
    state.u *= settings.tau_decr;
  }
}

LocalFitInfo fit_rotation_l1(const Mat3& covariance, const Vec3& normal, double area,
                             const StyleOperator& style, VertexAdmm& state,
                             const AdmmSettings& settings) {
  static const double kSqrt3 = std::sqrt(3.0);
  LocalFitInfo info;
  for (int it = 0; it < settings.max_iterations; ++it) {
    info.iterations = it + 1;
    const Mat3 m = covariance + (state.rho * normal) * (state.z - state.u).transpose();
    state.rotation = orthogonal_procrustes(m);
    const Vec3 rn = state.rotation * normal;
    const Vec3 z_prev = state.z;
    state.z = style_z_step(style, rn + state.u, state.rho, area);
    state.u += rn - state.z;

    const double r_norm = (state.z - rn).norm();
    const double s_norm = (state.rho * (state.z - z_prev)).norm();
    const double eps_pri =
        kSqrt3 * settings.eps_abs + settings.eps_rel * std::max(rn.norm(), state.z.norm());
    const double eps_dual =
        kSqrt3 * settings.eps_abs + settings.eps_rel * (state.rho * state.u).norm();
    if (r_norm < eps_pri && s_norm < eps_dual) {
      info.converged = true;
      break;
    }
    if (settings.adapt_penalty) update_penalty(state, r_norm, s_norm, settings);
  }
  return info;
}

LocalFitInfo fit_rotation_l1(const Eigen::Matrix3Xd& rest_edges, const Eigen::VectorXd& weights,
                             const Eigen::Matrix3Xd& deformed_edges, const Vec3& normal,
                             double area, const StyleOperator& style, VertexAdmm& state,
                             const AdmmSettings& settings) {
  const Mat3 cov = rest_edges * weights.asDiagonal() * deformed_edges.transpose();
  return fit_rotation_l1(cov, normal, area, style, state, settings);
}

double local_objective(const Mat3& rotation, const Eigen::Matrix3Xd& rest_edges,
                       const Eigen::VectorXd& weights, const Eigen::Matrix3Xd& deformed_edges,
                       const Vec3& normal, double area, const StyleOperator& style) {
  const Eigen::Matrix3Xd diff = rotation * rest_edges - deformed_edges;
  const double arap = 0.5 * (diff.colwise().squaredNorm().transpose().cwiseProduct(weights)).sum();
  return arap + style_penalty(style, rotation * normal, area);
}

}  // namespace cubify
