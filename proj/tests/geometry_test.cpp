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
#include <numbers>

#include "cubify/error.hpp"
#include "cubify/geometry.hpp"
#include "cubify/obj.hpp"
#include "cubify/shapes.hpp"
#include "test_support.hpp"

namespace cubify {
namespace {

// Angle at corner c of face f from acos, independent of the cross/dot
// formula used in the library.
double corner_angle(const TriangleMesh& m, int f, int c) {
  const Vec3 p = m.positions.row(m.faces(f, c));
  const Vec3 a = m.positions.row(m.faces(f, (c + 1) % 3));
  const Vec3 b = m.positions.row(m.faces(f, (c + 2) % 3));
  return std::acos((a - p).normalized().dot((b - p).normalized()));
}

TEST(Geometry, HalfCotangentsMatchAngles) {
  testing::Gen gen(3);
  TriangleMesh m = shapes::icosphere(2);
  for (int i = 0; i < m.num_vertices(); ++i) m.positions.row(i) += 0.05 * gen.vec3().transpose();
  const Eigen::MatrixX3d cot = half_cotangents(m);
  for (int f = 0; f < m.num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) {
      EXPECT_NEAR(cot(f, c), 0.5 / std::tan(corner_angle(m, f, c)), 1e-9);
    }
  }
}

TEST(Geometry, EquilateralWeights) {
  const TriangleMesh m = shapes::tetrahedron();
  const Eigen::MatrixX3d cot = half_cotangents(m);
  EXPECT_NEAR(cot.maxCoeff(), 0.5 / std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(cot.minCoeff(), 0.5 / std::sqrt(3.0), 1e-14);
}

TEST(Geometry, NeighborhoodsHoldThreeEdgesPerIncidentFace) {
  const TriangleMesh m = shapes::torus(12, 7);
  const SpokesRims n = build_neighborhoods(m);
  const auto vf = vertex_faces(m);
  ASSERT_EQ(n.num_vertices(), m.num_vertices());
  for (int i = 0; i < m.num_vertices(); ++i) {
    EXPECT_EQ(n.of(i).size(), 3 * vf[i].size());
    for (const RimEdge& e : n.of(i)) {
      bool found = false;
      for (int c = 0; c < 3; ++c) {
        if (m.faces(e.face, c) == e.j && m.faces(e.face, (c + 1) % 3) == e.k) found = true;
      }
      EXPECT_TRUE(found);
    }
  }
}

TEST(Geometry, DegenerateFaceThrows) {
  const TriangleMesh m = load_obj("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n");
  EXPECT_THROW(build_neighborhoods(m), MeshError);
}

TEST(Geometry, AreasPartitionSurface) {
  const TriangleMesh m = shapes::torus(20, 9);
  EXPECT_NEAR(vertex_areas(m).sum(), face_areas(m.positions, m.faces).sum(), 1e-12);
  // Torus area 4 pi^2 R r, approached from below by the tessellation.
  const double exact = 4 * std::numbers::pi * std::numbers::pi * 1.0 * 0.4;
  EXPECT_NEAR(face_areas(m.positions, m.faces).sum(), exact, 0.05 * exact);
}

TEST(Geometry, SphereNormalsPointOutward) {
  const TriangleMesh m = shapes::icosphere(3);
  const Positions n = vertex_normals(m);
  for (int i = 0; i < m.num_vertices(); ++i) {
    EXPECT_NEAR(n.row(i).norm(), 1.0, 1e-12);
    EXPECT_GT(n.row(i).dot(m.positions.row(i)), 0.999);
  }
}

TEST(Geometry, NonOrientableNormalsAreFinite) {
  const TriangleMesh m = shapes::klein_bottle(30, 15);
  const Positions n = vertex_normals(m);
  EXPECT_TRUE(n.allFinite());
  for (int i = 0; i < m.num_vertices(); ++i) EXPECT_NEAR(n.row(i).norm(), 1.0, 1e-12);
}

TEST(Geometry, CubenessOfAxisAlignedCubeIsOne) {
  EXPECT_NEAR(cubeness_score(shapes::cube(3)), 1.0, 1e-14);
}

// The mean of |x| + |y| + |z| over the unit sphere is 3/2.
TEST(Geometry, CubenessOfSphereApproachesOneAndAHalf) {
  EXPECT_NEAR(cubeness_score(shapes::icosphere(5)), 1.5, 2e-3);
}

// Property: rotation changes the score of a cube but keeps it in [1, sqrt 3],
// and scaling or translating never changes it.
TEST(Geometry, CubenessBoundsAndInvariance) {
  testing::Gen gen(5);
  const TriangleMesh cube = shapes::cube(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat3 r = gen.rotation();
    Positions p = cube.positions * r.transpose();
    const double s = cubeness_score(p, cube.faces);
    EXPECT_GE(s, 1.0 - 1e-12);
    EXPECT_LE(s, std::sqrt(3.0) + 1e-12);
    Positions q = (p * gen.uniform(0.1, 10.0)).rowwise() + gen.vec3(5).transpose();
    EXPECT_NEAR(cubeness_score(q, cube.faces), s, 1e-12);
  }
}

}  // namespace
}  // namespace cubify
