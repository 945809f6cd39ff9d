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

#include <fstream>
#include <set>

#include "cubify/error.hpp"
#include "cubify/geometry.hpp"
#include "cubify/progressive.hpp"
#include "cubify/shapes.hpp"
#include "cubify/validate.hpp"
#include "test_support.hpp"

namespace cubify {
namespace {

const TriangleMesh& fine() {
  static const TriangleMesh m = shapes::icosphere(4);  // 5120 faces
  return m;
}

const CollapseLog& fine_log() {
  static const CollapseLog log = decimate(fine(), 1024);
  return log;
}

int euler_characteristic(const TriangleMesh& m) {
  std::set<std::pair<int, int>> edges;
  for (int f = 0; f < m.num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) edges.insert(std::minmax(m.faces(f, c), m.faces(f, (c + 1) % 3)));
  }
  return m.num_vertices() - static_cast<int>(edges.size()) + m.num_faces();
}

TEST(AffineFit, ReproducesLinearMaps) {
  testing::Gen gen(89);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = gen.integer(3, 10);
    Eigen::Matrix3Xd q(3, k);
    for (int c = 0; c < k; ++c) q.col(c) = gen.vec3();
    bool regularized = true;
    const Eigen::Matrix3Xd a = affine_fit(q, &regularized);
    EXPECT_FALSE(regularized);
    EXPECT_TRUE((a * q.transpose()).isApprox(Mat3::Identity(), 1e-10));
    // For a deformed ring T q the reconstruction T q A^T recovers T.
    const Mat3 t = gen.matrix();
    EXPECT_TRUE(((t * q) * a.transpose()).isApprox(t, 1e-9));
  }
}

TEST(AffineFit, RegularizesPlanarRings) {
  Eigen::Matrix3Xd q(3, 4);
  q << 1, 0, -1, 0,  0, 1, 0, -1,  0, 0, 0, 0;
  bool regularized = false;
  const Eigen::Matrix3Xd a = affine_fit(q, &regularized);
  EXPECT_TRUE(regularized);
  EXPECT_TRUE(a.allFinite());
  // In-plane directions are still reproduced.
  EXPECT_NEAR((a * q.transpose())(0, 0), 1.0, 1e-6);
  EXPECT_THROW(affine_fit(Eigen::Matrix3Xd(3, 0)), InvalidArgument);
}

TEST(Decimate, ReachesTargetWithValidCoarseMesh) {
  const CollapseLog& log = fine_log();
  EXPECT_EQ(log.coarse.num_faces(), 1024);
  const ValidationReport r = validate(log.coarse);
  EXPECT_TRUE(r.ok()) << r.summary();
  EXPECT_EQ(euler_characteristic(log.coarse), 2);
  EXPECT_EQ(log.original_vertices, fine().num_vertices());
  EXPECT_EQ(static_cast<int>(log.coarse_ids.size()), log.coarse.num_vertices());
  EXPECT_EQ(log.regularized_count(), 0);
}

TEST(Decimate, KeepsTopologyOfTorusAndBoundary) {
  const CollapseLog t = decimate(shapes::torus(40, 20), 600);
  EXPECT_TRUE(validate(t.coarse).ok());
  EXPECT_EQ(euler_characteristic(t.coarse), 0);
  const TriangleMesh g = shapes::grid(30, 30);
  const CollapseLog b = decimate(g, 600);
  const ValidationReport r = validate(b.coarse);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.boundary_loops, 1);
  // Planar rings take the regularized fit, which biases the split by ~1e-8.
  EXPECT_GT(b.regularized_count(), 0);
  EXPECT_LE((reinflate(b.coarse.positions, b) - g.positions).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Decimate, RejectsBadTargets) {
  EXPECT_THROW(decimate(fine(), 5120), InvalidArgument);
  EXPECT_THROW(decimate(fine(), 400), InvalidArgument);
  DecimateOptions low;
  low.min_faces = 100;
  EXPECT_NO_THROW(decimate(fine(), 400, low));
  DecimateOptions bad;
  bad.locked = {fine().num_vertices()};
  EXPECT_THROW(decimate(fine(), 1024, bad), InvalidArgument);
}

TEST(Decimate, LockedVerticesSurvive) {
  DecimateOptions o;
  o.locked = {0, 17, 2000, 2561};
  o.audit = true;
  const CollapseLog log = decimate(fine(), 1024, o);
  const std::vector<int> index = log.coarse_index_of_original();
  for (int v : o.locked) {
    ASSERT_GE(index[v], 0);
    EXPECT_EQ(log.coarse.positions.row(index[v]), fine().positions.row(v));
  }
}

TEST(Decimate, Deterministic) {
  EXPECT_EQ(serialize_log(decimate(fine(), 1024)), serialize_log(fine_log()));
}

TEST(Reinflate, IdentityOnUndeformedCoarseMesh) {
  const Positions back = reinflate(fine_log().coarse.positions, fine_log());
  EXPECT_LE((back - fine().positions).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Reinflate, CommutesWithAffineMaps) {
  testing::Gen gen(97);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat3 t = Mat3::Identity() + 0.3 * gen.matrix();
    const Eigen::RowVector3d shift = gen.vec3().transpose();
    const Positions coarse = (fine_log().coarse.positions * t.transpose()).rowwise() + shift;
    const Positions expect = (fine().positions * t.transpose()).rowwise() + shift;
    EXPECT_LE(testing::max_row_distance(reinflate(coarse, fine_log()), expect), 1e-10);
  }
  EXPECT_THROW(reinflate(Positions::Zero(3, 3), fine_log()), InvalidArgument);
}

TEST(Reinflate, ConnectivityReplaysExactly) {
  EXPECT_EQ(replay_connectivity(fine_log()), fine().faces);
}

TEST(Reinflate, RepresentativesAreOriginal) {
  const CollapseLog& log = fine_log();
  for (int id = 0; id < log.id_count(); ++id) {
    const int r = log.representative(id);
    EXPECT_GE(r, 0);
    EXPECT_LT(r, log.original_vertices);
  }
}

TEST(CollapseLogFile, RoundTrip) {
  const std::string bytes = serialize_log(fine_log());
  const CollapseLog back = deserialize_log(bytes);
  EXPECT_EQ(serialize_log(back), bytes);
  EXPECT_EQ(back.fingerprint, fine_log().fingerprint);
  EXPECT_EQ(replay_connectivity(back), fine().faces);
  const auto dir = testing::scratch_dir("pmcache");
  save_log(fine_log(), (dir / "a.pmcache").string());
  EXPECT_EQ(serialize_log(load_log((dir / "a.pmcache").string())), bytes);
  EXPECT_THROW(load_log((dir / "none.pmcache").string()), Error);
}

TEST(CollapseLogFile, RejectsCorruptBytes) {
  const std::string bytes = serialize_log(fine_log());
  EXPECT_THROW(deserialize_log("XXXX" + bytes.substr(4)), Error);
  EXPECT_THROW(deserialize_log(bytes.substr(0, bytes.size() / 2)), Error);
  EXPECT_THROW(deserialize_log(bytes + "x"), Error);
  std::string version = bytes;
  version[4] = 9;
  EXPECT_THROW(deserialize_log(version), Error);
  EXPECT_THROW(deserialize_log(""), Error);
}

TEST(CollapseLogFile, FingerprintTracksInputs) {
  const DecimateOptions o;
  const std::uint64_t base = decimation_fingerprint(fine(), 1024, o);
  EXPECT_EQ(base, fine_log().fingerprint);
  EXPECT_NE(decimation_fingerprint(fine(), 1026, o), base);
  TriangleMesh moved = fine();
  moved.positions(3, 1) += 1e-9;
  EXPECT_NE(decimation_fingerprint(moved, 1024, o), base);
  DecimateOptions locked;
  locked.locked = {5};
  EXPECT_NE(decimation_fingerprint(fine(), 1024, locked), base);
}

TEST(CoarseMapping, ConstraintsAndControls) {
  Constraints c;
  c.fixed = {3};
  c.points = {{9, Vec3(1, 2, 3)}};
  c.planes = {{30, 1, 0.5}};
  EXPECT_EQ(constrained_vertices(c), (std::vector<int>{3, 9, 30}));
  DecimateOptions o;
  o.locked = constrained_vertices(c);
  const CollapseLog log = decimate(fine(), 1024, o);
  const std::vector<int> index = log.coarse_index_of_original();
  const Constraints cc = coarse_constraints(c, log);
  EXPECT_EQ(cc.fixed, (std::vector<int>{index[3]}));
  EXPECT_EQ(cc.points[0].vertex, index[9]);
  EXPECT_EQ(cc.planes[0].vertex, index[30]);
  Constraints unlocked;
  unlocked.fixed = {4};
  if (index[4] < 0) EXPECT_THROW(coarse_constraints(unlocked, log), InvalidArgument);

  StyleControls s;
  s.lambda_field.resize(static_cast<std::size_t>(fine().num_vertices()));
  for (int v = 0; v < fine().num_vertices(); ++v) s.lambda_field[v] = 0.001 * v;
  const StyleControls sc = coarse_controls(s, log);
  ASSERT_EQ(static_cast<int>(sc.lambda_field.size()), log.coarse.num_vertices());
  for (int c2 = 0; c2 < log.coarse.num_vertices(); ++c2) {
    EXPECT_DOUBLE_EQ(sc.lambda_field[c2], 0.001 * log.representative(log.coarse_ids[c2]));
  }
}

TEST(FastStylize, CachesAndHonoursConstraints) {
  StyleControls s;
  s.lambda = 0.2;
  Constraints c;
  c.fixed = {0, 100};
  FastStylizeOptions o;
  o.target_faces = 1024;
  CollapseLog cache;
  o.cache = &cache;
  const StylizeResult a = fast_stylize(fine(), StylizeParams{}, c, s, o);
  EXPECT_NE(cache.fingerprint, 0u);
  EXPECT_EQ(a.positions.rows(), fine().num_vertices());
  EXPECT_EQ(a.positions.row(0), fine().positions.row(0));
  EXPECT_EQ(a.positions.row(100), fine().positions.row(100));
  EXPECT_LT(cubeness_score(a.positions, fine().faces), 0.95 * cubeness_score(fine()));
  const std::string before = serialize_log(cache);
  const StylizeResult b = fast_stylize(fine(), StylizeParams{}, c, s, o);
  EXPECT_EQ(serialize_log(cache), before);
  EXPECT_EQ(a.positions, b.positions);
  EXPECT_EQ(b.state.size(), cache.coarse.num_vertices());
}

}  // namespace
}  // namespace cubify
