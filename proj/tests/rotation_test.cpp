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

#include <gtest/gtest.h>

#include <cmath>

#include "cubify/rotation.hpp"
#include "test_support.hpp"

namespace cubify {
namespace {

TEST(Rotation, AxisAngle) {
  const Mat3 r = axis_angle_rotation(Vec3(0, 0, 2), 90);
  EXPECT_TRUE(r.isApprox((Mat3() << 0, -1, 0, 1, 0, 0, 0, 0, 1).finished(), 1e-14));
  EXPECT_TRUE(is_rotation(r));
}

TEST(Rotation, IsRotationRejectsReflectionsAndShears) {
  EXPECT_FALSE(is_rotation(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()));
  Mat3 shear = Mat3::Identity();
  shear(0, 1) = 1e-3;
  EXPECT_FALSE(is_rotation(shear));
}

TEST(Procrustes, RecoversRotationFromItsTranspose) {
  testing::Gen gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat3 r = gen.rotation();
    // Tr(R M) with M = S R^T, S positive diagonal, peaks at R.
    const Vec3 s(gen.uniform(0.1, 3), gen.uniform(0.1, 3), gen.uniform(0.1, 3));
    EXPECT_TRUE(orthogonal_procrustes(s.asDiagonal() * r.transpose()).isApprox(r, 1e-10));
  }
}

// Oracle: no rotation among many samples beats the returned one.
TEST(Procrustes, BeatsSampledRotations) {
  testing::Gen gen(19);
  for (int trial = 0; trial < 40; ++trial) {
    const Mat3 m = gen.matrix();
    const Mat3 r = orthogonal_procrustes(m);
    ASSERT_TRUE(is_rotation(r, 1e-10));
    const double best = (r * m).trace();
    for (int k = 0; k < 2000; ++k) EXPECT_LE((gen.rotation() * m).trace(), best + 1e-10);
    // Local perturbations too.
    for (int k = 0; k < 200; ++k) {
      const Mat3 d = axis_angle_rotation(gen.unit(), gen.uniform(-2, 2));
      EXPECT_LE((d * r * m).trace(), best + 1e-10);
    }
  }
}

TEST(Procrustes, HandlesReflectionAndRankDeficiency) {
  // M = diag(1, 2, -3): the best rotation flips the two smallest-|s| axes.
  const Mat3 r = orthogonal_procrustes(Vec3(1, 2, -3).asDiagonal().toDenseMatrix());
  EXPECT_TRUE(is_rotation(r, 1e-12));
  EXPECT_NEAR((r * Vec3(1, 2, -3).asDiagonal().toDenseMatrix()).trace(), 4.0, 1e-12);
  EXPECT_TRUE(is_rotation(orthogonal_procrustes(Mat3::Zero()), 1e-12));
  const Vec3 a(1, 2, 3);
  EXPECT_TRUE(is_rotation(orthogonal_procrustes(a * a.transpose()), 1e-12));
}

}  // namespace
}  // namespace cubify
