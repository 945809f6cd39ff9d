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

#include "cubify/error.hpp"
#include "cubify/rotation.hpp"
#include "cubify/style.hpp"
#include "test_support.hpp"

namespace cubify {
namespace {

TEST(Style, UniformLambdaIsDiagonal) {
  StyleControls c;
  c.lambda = 0.3;
  const auto ops = build_style_operator(c, Positions::Zero(4, 3), 4);
  ASSERT_EQ(ops.size(), 4u);
  for (const auto& op : ops) {
    EXPECT_EQ(op.kind, StyleKind::kDiagonal);
    EXPECT_EQ(op.diagonal, Vec3::Constant(0.3));
  }
  EXPECT_EQ(style_rows(c), 3);
}

TEST(Style, FieldAndRampOverrideScalar) {
  Positions normals(2, 3);
  normals << 1, 0, 0, -1, 0, 0;
  StyleControls c;
  c.lambda = 9.0;
  c.gauss_ramp = GaussRamp{Vec3(2, 0, 0), 0.1, 0.5};
  auto ops = build_style_operator(c, normals, 2);
  EXPECT_DOUBLE_EQ(ops[0].diagonal.x(), 0.5);
  EXPECT_DOUBLE_EQ(ops[1].diagonal.x(), 0.1);
  c.lambda_field = {0.7, 0.8};
  EXPECT_THROW(build_style_operator(c, normals, 2), InvalidArgument);
  c.gauss_ramp.reset();
  ops = build_style_operator(c, normals, 2);
  EXPECT_DOUBLE_EQ(ops[1].diagonal.y(), 0.8);
}

TEST(Style, AxisLambdaAndFrames) {
  StyleControls c;
  c.lambda = 2.0;
  c.axis_lambda = Vec3(1, 0, 0.5);
  auto ops = build_style_operator(c, Positions::Zero(1, 3), 1);
  EXPECT_EQ(ops[0].diagonal, Vec3(2, 0, 1));
  c.frames = {axis_angle_rotation(Vec3::UnitZ(), 30)};
  ops = build_style_operator(c, Positions::Zero(1, 3), 1);
  EXPECT_EQ(ops[0].kind, StyleKind::kRotatedDiagonal);
}

TEST(Style, PolyhedronKinds) {
  StyleControls c;
  c.lambda = 1.0;
  c.polyhedron = polyhedron_preset("cube");
  EXPECT_EQ(build_style_operator(c, Positions::Zero(1, 3), 1)[0].kind, StyleKind::kDiagonal);
  c.polyhedron = polyhedron_preset("tetrahedron");
  EXPECT_EQ(build_style_operator(c, Positions::Zero(1, 3), 1)[0].kind, StyleKind::kGeneral);
  EXPECT_EQ(style_rows(c), 4);
}

TEST(Style, PresetsHaveUnitRows) {
  const std::pair<const char*, int> presets[] = {
      {"cube", 3}, {"tetrahedron", 4}, {"dodecahedron", 6}, {"icosahedron", 10}};
  for (const auto& [name, rows] : presets) {
    const Eigen::MatrixX3d b = polyhedron_preset(name);
    EXPECT_EQ(b.rows(), rows);
    for (int r = 0; r < rows; ++r) EXPECT_NEAR(b.row(r).norm(), 1.0, 1e-15);
  }
  EXPECT_THROW(polyhedron_preset("octahedron"), InvalidArgument);
}

TEST(Style, RejectsInconsistentControls) {
  StyleControls c;
  c.lambda = -1;
  EXPECT_THROW(validate_controls(c, 3), InvalidArgument);
  c = {};
  c.lambda_field = {1, 2};
  EXPECT_THROW(validate_controls(c, 3), InvalidArgument);
  c = {};
  c.frames = {Vec3(1, 1, -1).asDiagonal().toDenseMatrix()};
  EXPECT_THROW(validate_controls(c, 3), InvalidArgument);
  c = {};
  c.polyhedron = Eigen::MatrixX3d::Zero(2, 3);
  EXPECT_THROW(validate_controls(c, 3), InvalidArgument);
  c.polyhedron = Eigen::MatrixX3d::Ones(17, 3);
  EXPECT_THROW(validate_controls(c, 3), InvalidArgument);
  c.polyhedron = polyhedron_preset("tetrahedron");
  c.axis_lambda = Vec3::Ones();
  EXPECT_THROW(validate_controls(c, 3), InvalidArgument);
}

// Property: every operator kind minimises its own z objective.
TEST(Style, ZStepMinimisesPenaltyPlusProximal) {
  testing::Gen gen(73);
  for (int trial = 0; trial < 60; ++trial) {
    StyleControls c;
    c.lambda = gen.uniform(0.1, 1);
    switch (trial % 3) {
      case 0: break;
      case 1: c.frames = {gen.rotation()}; break;
      case 2: c.polyhedron = polyhedron_preset("dodecahedron"); break;
    }
    const StyleOperator op = build_style_operator(c, Positions::Zero(1, 3), 1)[0];
    const Vec3 v = gen.vec3();
    const double rho = gen.uniform(0.5, 3), area = gen.uniform(0.1, 2);
    const Vec3 z = style_z_step(op, v, rho, area);
    auto obj = [&](const Vec3& y) { return style_penalty(op, y, area) + 0.5 * rho * (v - y).squaredNorm(); };
    for (int k = 0; k < 300; ++k) EXPECT_GE(obj(z + gen.vec3(1e-3)), obj(z) - 1e-12);
  }
}

TEST(Style, ParsesJsonSidecar) {
  const StyleControls c = parse_controls_json(
      R"({"lambda": 0.5, "axis_lambda": [1, 0, 1], "frames": [[1, 0, 0, 0]]})");
  EXPECT_DOUBLE_EQ(c.lambda, 0.5);
  EXPECT_EQ(*c.axis_lambda, Vec3(1, 0, 1));
  ASSERT_EQ(c.frames.size(), 1u);
  EXPECT_TRUE(c.frames[0].isApprox(Mat3::Identity()));
  const StyleControls p = parse_controls_json(R"({"B": "icosahedron"})");
  EXPECT_EQ(p.polyhedron->rows(), 10);
  const StyleControls g =
      parse_controls_json(R"({"gauss_ramp": {"dir": [0, 0, 1], "lo": 0.1, "hi": 0.9}})");
  EXPECT_DOUBLE_EQ(g.gauss_ramp->high, 0.9);
  EXPECT_THROW(parse_controls_json("[1, 2]"), ParseError);
  EXPECT_THROW(parse_controls_json("{"), ParseError);
  EXPECT_THROW(parse_controls_json(R"({"B": [1, 2]})"), InvalidArgument);
}

}  // namespace
}  // namespace cubify
