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

#include "cubify/rotation.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <numbers>

namespace cubify {

Mat3 orthogonal_procrustes(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 r = v * u.transpose();
  if (r.determinant() < 0.0) {
    // Singular values are sorted in decreasing order.
    u.col(2) = -u.col(2);
    r = v * u.transpose();
  }
  return r;
}

bool is_rotation(const Mat3& q, double tol) {
  if (!q.allFinite()) return false;
  return (q.transpose() * q - Mat3::Identity()).norm() <= tol && q.determinant() > 0.0;
}

Mat3 axis_angle_rotation(const Vec3& axis, double degrees) {
  return Eigen::AngleAxisd(degrees * std::numbers::pi / 180.0, axis.normalized())
      .toRotationMatrix();
}

}  // namespace cubify
