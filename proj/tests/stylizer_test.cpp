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
#include "cubify/geometry.hpp"
#include "cubify/rotation.hpp"
#include "cubify/shapes.hpp"
#include "cubify/stylizer.hpp"
#include "test_support.hpp"

namespace cubify {
namespace {

StyleControls uniform(double lambda) {
  StyleControls c;
  c.lambda = lambda;
  return c;
}

const TriangleMesh& sphere() {
  static const TriangleMesh m = shapes::icosphere(2);
  return m;
}

TEST(Stylizer, ZeroLambdaKeepsRestPose) {
  const StylizeResult r = stylize(sphere(), StylizeParams{}, {}, uniform(0.0));
  EXPECT_TRUE(r.converged);
  EXPECT_LE(testing::max_row_distance(r.positions, sphere().positions), 1e-12);
}

TEST(Stylizer, AxisAlignedCubeIsAFixedPoint) {
  for (int n : {1, 4}) {
    const TriangleMesh cube = shapes::cube(n);
    const StylizeResult r = stylize(cube, StylizeParams{}, {}, uniform(0.5));
    EXPECT_TRUE(r.converged);
    EXPECT_LE(testing::max_row_distance(r.positions, cube.positions), 1e-12);
  }
}

TEST(Stylizer, LowersCubenessAndGlobalStepNeverRaisesEnergy) {
  const StylizeResult r = stylize(sphere(), StylizeParams{}, {}, uniform(0.2));
  EXPECT_TRUE(r.converged);
  ASSERT_EQ(static_cast<int>(r.trace.size()), r.iterations);
  for (const IterationRecord& rec : r.trace) {
    EXPECT_LE(rec.energy, rec.energy_before_global * (1 + 1e-12) + 1e-15);
  }
  EXPECT_LT(cubeness_score(r.positions, sphere().faces), 0.97 * cubeness_score(sphere()));
}

TEST(Stylizer, LargerLambdaIsMoreCubic) {
  double previous = cubeness_score(sphere());
  for (double lambda : {0.05, 0.2, 0.8}) {
    const StylizeResult r = stylize(sphere(), StylizeParams{}, {}, uniform(lambda));
    const double score = cubeness_score(r.positions, sphere().faces);
    EXPECT_LT(score, previous);
    previous = score;
  }
}

// Oracle: for fixed rotations no perturbation of the positions lowers the
// ARAP energy of the global step's output.
TEST(Stylizer, GlobalStepMinimisesArap) {
  testing::Gen gen(79);
  const SolverContext ctx(sphere(), {}, uniform(0.3));
  std::vector<Mat3> rotations(static_cast<std::size_t>(ctx.num_vertices()));
  for (auto& r : rotations) r = axis_angle_rotation(gen.unit(), gen.uniform(0, 20));
  const Positions x = ctx.global_step(rotations);
  const double e0 = ctx.arap_energy(x, rotations);
  for (int k = 0; k < 200; ++k) {
    Positions y = x;
    for (int i = 0; i < 5; ++i) y.row(gen.integer(0, ctx.num_vertices() - 1)) += gen.vec3(1e-3).transpose();
    EXPECT_GE(ctx.arap_energy(y, rotations), e0 - 1e-12);
  }
  // Identity rotations reproduce the rest pose.
  const std::vector<Mat3> id(rotations.size(), Mat3::Identity());
  EXPECT_LE(testing::max_row_distance(ctx.global_step(id), sphere().positions), 1e-12);
}

TEST(Stylizer, ConstraintsHoldExactly) {
  Constraints c;
  c.fixed = {0, 5};
  c.points = {{7, Vec3(0.1, 1.3, -0.2)}};
  c.planes = {{20, 2, 0.75}, {21, 0, -0.6}};
  const StylizeResult r = stylize(sphere(), StylizeParams{}, c, uniform(0.3));
  EXPECT_EQ(r.positions.row(0), sphere().positions.row(0));
  EXPECT_EQ(r.positions.row(5), sphere().positions.row(5));
  EXPECT_EQ(r.positions.row(7), Eigen::RowVector3d(0.1, 1.3, -0.2));
  EXPECT_EQ(r.positions(20, 2), 0.75);
  EXPECT_EQ(r.positions(21, 0), -0.6);
}

TEST(Stylizer, ScaleEquivariant) {
  StylizeParams p;
  p.admm.adapt_penalty = false;
  const StylizeResult a = stylize(sphere(), p, {}, uniform(0.2));
  TriangleMesh big = sphere();
  big.positions *= 37.5;
  const StylizeResult b = stylize(big, p, {}, uniform(0.2));
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_LE(testing::max_row_distance(b.positions / 37.5, a.positions), 1e-9);
}

TEST(Stylizer, TranslationInvariant) {
  const StylizeResult a = stylize(sphere(), StylizeParams{}, {}, uniform(0.2));
  TriangleMesh moved = sphere();
  const Eigen::RowVector3d t(3.0, -2.0, 10.0);
  moved.positions.rowwise() += t;
  const StylizeResult b = stylize(moved, StylizeParams{}, {}, uniform(0.2));
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_LE(testing::max_row_distance(b.positions.rowwise() - t, a.positions), 1e-9);
}

// The l1 norm is invariant under signed axis permutations, so a quarter turn
// of the input gives a quarter turn of the output.
TEST(Stylizer, EquivariantUnderQuarterTurns) {
  const Mat3 q = axis_angle_rotation(Vec3::UnitZ(), 90);
  const StylizeResult a = stylize(sphere(), StylizeParams{}, {}, uniform(0.2));
  const StylizeResult b = stylize(apply_orientation(sphere(), q), StylizeParams{}, {}, uniform(0.2));
  EXPECT_LE(testing::max_row_distance(undo_orientation(b.positions, q), a.positions), 1e-6);
}

TEST(Stylizer, OrientationRoundTrip) {
  testing::Gen gen(83);
  const Mat3 r = gen.rotation();
  const TriangleMesh m = apply_orientation(sphere(), r);
  EXPECT_LE(testing::max_row_distance(undo_orientation(m.positions, r), sphere().positions), 1e-14);
  EXPECT_THROW(apply_orientation(sphere(), 2.0 * Mat3::Identity()), InvalidArgument);
}

TEST(Stylizer, PreemptionMatchesIterationCap) {
  const int k = 5;
  StylizeParams capped;
  capped.max_iterations = k;
  const StylizeResult a = stylize(sphere(), capped, {}, uniform(0.2));
  EXPECT_FALSE(a.converged);
  EXPECT_EQ(a.iterations, k);
  int seen = 0;
  const StylizeResult b = stylize(sphere(), StylizeParams{}, {}, uniform(0.2), nullptr,
                                  [&](const IterationRecord& rec, const Positions&) {
                                    seen = rec.iteration;
                                    return rec.iteration < k;
                                  });
  EXPECT_TRUE(b.stopped);
  EXPECT_EQ(b.iterations, k);
  EXPECT_EQ(seen, k);
  EXPECT_EQ(a.positions, b.positions);
}

TEST(Stylizer, ObserverSeesReportedPositions) {
  Positions last;
  const StylizeResult r = stylize(sphere(), StylizeParams{}, {}, uniform(0.2), nullptr,
                                  [&](const IterationRecord&, const Positions& p) {
                                    last = p;
                                    return true;
                                  });
  EXPECT_EQ(last, r.positions);
}

TEST(Stylizer, ThreadCountDoesNotChangeResult) {
  StylizeParams one, many;
  many.threads = 3;
  const StylizeResult a = stylize(sphere(), one, {}, uniform(0.2));
  const StylizeResult b = stylize(sphere(), many, {}, uniform(0.2));
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.positions, b.positions);
}

TEST(Stylizer, WarmStartReachesColdResult) {
  const StylizeResult first = stylize(sphere(), StylizeParams{}, {}, uniform(0.2));
  const StylizeResult cold = stylize(sphere(), StylizeParams{}, {}, uniform(0.3));
  const StylizeResult warm = stylize(sphere(), StylizeParams{}, {}, uniform(0.3), &first.state);
  const double sc = cubeness_score(cold.positions, sphere().faces);
  const double sw = cubeness_score(warm.positions, sphere().faces);
  EXPECT_NEAR(sw, sc, 0.01 * sc);
  EXPECT_THROW(stylize(shapes::icosphere(1), StylizeParams{}, {}, uniform(0.3), &first.state),
               InvalidArgument);
}

TEST(Stylizer, ContextReuseWithNewControls) {
  SolverContext ctx(sphere(), {}, uniform(0.2));
  const StylizeResult a = stylize(ctx, StylizeParams{});
  ctx.set_controls(uniform(0.2));
  const StylizeResult b = stylize(ctx, StylizeParams{});
  EXPECT_EQ(a.positions, b.positions);
  ctx.set_controls(uniform(0.0));
  EXPECT_LE(testing::max_row_distance(stylize(ctx, StylizeParams{}).positions, sphere().positions),
            1e-12);
}

TEST(Stylizer, EachComponentGetsAGaugePin) {
  TriangleMesh b = shapes::icosphere(1);
  b.positions.col(0).array() += 4.0;
  const TriangleMesh two = shapes::merge(shapes::icosphere(1), b);
  const SolverContext ctx(two, {}, uniform(0.2));
  EXPECT_EQ(ctx.factorizations(), 1);
  ASSERT_GE(ctx.auto_pinned().size(), 2u);
  const StylizeResult r = stylize(ctx, StylizeParams{});
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.positions.allFinite());
}

TEST(Stylizer, OpenAndNonOrientableSurfaces) {
  const StylizeResult g = stylize(shapes::grid(8, 8), StylizeParams{}, {}, uniform(0.2));
  EXPECT_TRUE(g.positions.allFinite());
  const TriangleMesh klein = shapes::klein_bottle(24, 11);
  const StylizeResult k = stylize(klein, StylizeParams{}, {}, uniform(0.2));
  EXPECT_TRUE(k.positions.allFinite());
}

TEST(Stylizer, PolyhedralStyleLowersItsOwnNorm) {
  StyleControls c = uniform(0.3);
  c.polyhedron = polyhedron_preset("tetrahedron");
  const StylizeResult r = stylize(sphere(), StylizeParams{}, {}, c);
  // Area-weighted mean of |B n|_1 over face normals.
  auto mean_norm = [&](const Positions& p) {
    const Eigen::VectorXd area = face_areas(p, sphere().faces);
    double s = 0;
    for (int f = 0; f < sphere().num_faces(); ++f) {
      const Vec3 a = p.row(sphere().faces(f, 0)), b = p.row(sphere().faces(f, 1)),
                 d = p.row(sphere().faces(f, 2));
      s += area[f] * (*c.polyhedron * (b - a).cross(d - a).normalized()).lpNorm<1>();
    }
    return s / area.sum();
  };
  EXPECT_LT(mean_norm(r.positions), 0.97 * mean_norm(sphere().positions));
}

TEST(Stylizer, RejectsInvalidInput) {
  StylizeParams p;
  p.stop_tolerance = 0;
  EXPECT_THROW(stylize(sphere(), p, {}, uniform(0.2)), InvalidArgument);
  Constraints c;
  c.fixed = {100000};
  EXPECT_THROW(stylize(sphere(), StylizeParams{}, c, uniform(0.2)), InvalidArgument);
  StyleControls bad = uniform(-1);
  EXPECT_THROW(stylize(sphere(), StylizeParams{}, {}, bad), InvalidArgument);
}

}  // namespace
}  // namespace cubify
