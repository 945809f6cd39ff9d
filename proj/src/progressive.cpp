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

#include "cubify/progressive.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <queue>
#include <set>
#include <tuple>

#include "cubify/error.hpp"
#include "cubify/validate.hpp"

namespace cubify {
namespace {

using Quadric = Eigen::Matrix4d;

struct Candidate {
  double cost;
  int a;
  int b;
  Vec3 placement;

  bool operator>(const Candidate& o) const {
    return std::tie(cost, a, b) > std::tie(o.cost, o.a, o.b);
  }
};

Quadric plane_quadric(const Vec3& normal, const Vec3& point, double weight) {
  Eigen::Vector4d p;
  p << normal, -normal.dot(point);
  return weight * p * p.transpose();
}

class Decimator {
 public:
  Decimator(const TriangleMesh& mesh, const DecimateOptions& options)
      : options_(options), n_(mesh.num_vertices()) {
    pos_.resize(n_);
    for (int v = 0; v < n_; ++v) pos_[v] = mesh.positions.row(v).transpose();
    quadric_.assign(n_, Quadric::Zero());
    alive_.assign(n_, 1);
    locked_.assign(n_, 0);
    for (int v : options.locked) {
      if (v < 0 || v >= n_) throw InvalidArgument("locked vertex " + std::to_string(v) + " out of range");
      locked_[v] = 1;
    }
    vf_.resize(n_);
    faces_.resize(mesh.num_faces());
    face_alive_.assign(mesh.num_faces(), 1);
    for (int f = 0; f < mesh.num_faces(); ++f) {
      faces_[f] = mesh.faces.row(f).transpose();
      for (int c = 0; c < 3; ++c) vf_[faces_[f][c]].push_back(f);
    }
    alive_faces_ = mesh.num_faces();
    init_quadrics();
  }

  CollapseLog run(int target) {
    for (int v = 0; v < n_; ++v) {
      for (int u : neighbors(v)) {
        if (v < u) push(v, u);
      }
    }
    while (!queue_.empty() && alive_faces_ > target) {
      Candidate c = queue_.top();
      queue_.pop();
      if (!alive_[c.a] || !alive_[c.b]) continue;
      const int shared = shared_faces(c.a, c.b).size();
      if (alive_faces_ - shared < target) continue;
      if (!collapsible(c.a, c.b, c.placement)) {
        failed_.insert({c.a, c.b});
        continue;
      }
      collapse(c.a, c.b, c.placement);
    }
    return finish();
  }

 private:
  void init_quadrics() {
    for (size_t f = 0; f < faces_.size(); ++f) {
      const Vec3& p0 = pos_[faces_[f][0]];
      const Vec3 n = (pos_[faces_[f][1]] - p0).cross(pos_[faces_[f][2]] - p0);
      const double len = n.norm();
      if (len == 0.0) continue;
      const Quadric q = plane_quadric(n / len, p0, 0.5 * len);
      for (int c = 0; c < 3; ++c) quadric_[faces_[f][c]] += q;
    }
    // Boundary edges get a perpendicular plane so open borders keep their shape.
    for (int v = 0; v < n_; ++v) {
      for (int u : neighbors(v)) {
        if (u < v) continue;
        const std::vector<int> s = shared_faces(v, u);
        if (s.size() != 1) continue;
        const Eigen::Vector3i& t = faces_[s[0]];
        const Vec3 fn = (pos_[t[1]] - pos_[t[0]]).cross(pos_[t[2]] - pos_[t[0]]);
        const Vec3 e = pos_[u] - pos_[v];
        const Vec3 m = e.cross(fn);
        if (m.norm() == 0.0) continue;
        const Quadric q = plane_quadric(m.normalized(), pos_[v], e.squaredNorm());
        quadric_[v] += q;
        quadric_[u] += q;
      }
    }
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (int f : vf_[v]) {
      for (int c = 0; c < 3; ++c) {
        if (faces_[f][c] != v) out.push_back(faces_[f][c]);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<int> shared_faces(int a, int b) const {
    std::vector<int> out;
    for (int f : vf_[a]) {
      const Eigen::Vector3i& t = faces_[f];
      if (t[0] == b || t[1] == b || t[2] == b) out.push_back(f);
    }
    return out;
  }

  bool on_boundary(int v) const {
    for (int u : neighbors(v)) {
      if (shared_faces(v, u).size() == 1) return true;
    }
    return false;
  }

  static int opposite(const Eigen::Vector3i& t, int a, int b) {
    for (int c = 0; c < 3; ++c) {
      if (t[c] != a && t[c] != b) return t[c];
    }
    return -1;
  }

  void push(int a, int b) {
    if (a > b) std::swap(a, b);
    if (locked_[a] || locked_[b]) return;
    const Quadric q = quadric_[a] + quadric_[b];
    const Mat3 h = q.topLeftCorner<3, 3>();
    const Vec3 g = q.topRightCorner<3, 1>();
    const Vec3 mid = 0.5 * (pos_[a] + pos_[b]);
    Vec3 p = mid;
    Eigen::SelfAdjointEigenSolver<Mat3> eig(h);
    const Vec3 ev = eig.eigenvalues();
    if (ev[2] > 0.0 && ev[0] > 1e-8 * ev[2]) {
      const Vec3 opt = -eig.eigenvectors() *
                       (eig.eigenvalues().cwiseInverse().asDiagonal() * (eig.eigenvectors().transpose() * g));
      // A placement far outside the edge means the quadric is nearly singular.
      if ((opt - mid).norm() <= (pos_[b] - pos_[a]).norm()) p = opt;
    }
    Eigen::Vector4d ph;
    ph << p, 1.0;
    const double cost = std::max(0.0, ph.dot(q * ph));
    queue_.push(Candidate{cost, a, b, p});
  }

  bool collapsible(int a, int b, const Vec3& p) const {
    const std::vector<int> shared = shared_faces(a, b);
    if (shared.empty() || shared.size() > 2) return false;
    std::vector<int> opposite_vertices;
    for (int f : shared) opposite_vertices.push_back(opposite(faces_[f], a, b));
    std::sort(opposite_vertices.begin(), opposite_vertices.end());

    const std::vector<int> na = neighbors(a);
    const std::vector<int> nb = neighbors(b);
    std::vector<int> common;
    std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(common));
    if (common != opposite_vertices) return false;
    if (shared.size() == 2 && on_boundary(a) && on_boundary(b)) return false;
    if (na.size() + nb.size() - 2 - common.size() < 3) return false;
    for (int o : opposite_vertices) {
      if (neighbors(o).size() <= 3) return false;
    }
    for (int v : {a, b}) {
      for (int f : vf_[v]) {
        const Eigen::Vector3i& t = faces_[f];
        if (std::find(shared.begin(), shared.end(), f) != shared.end()) continue;
        Vec3 q[3];
        for (int c = 0; c < 3; ++c) q[c] = pos_[t[c]];
        const Vec3 before = (q[1] - q[0]).cross(q[2] - q[0]);
        for (int c = 0; c < 3; ++c) {
          if (t[c] == v) q[c] = p;
        }
        const Vec3 after = (q[1] - q[0]).cross(q[2] - q[0]);
        const double nb4 = before.norm();
        const double na4 = after.norm();
        if (na4 <= 1e-12 * nb4 || na4 == 0.0) return false;
        if (before.dot(after) < options_.min_normal_cos * nb4 * na4) return false;
      }
    }
    return true;
  }

  void collapse(int a, int b, const Vec3& p) {
    const int id = static_cast<int>(pos_.size());
    pos_.push_back(p);
    quadric_.push_back(quadric_[a] + quadric_[b]);
    alive_.push_back(1);
    locked_.push_back(0);
    vf_.emplace_back();

    CollapseRecord rec;
    rec.inserted = id;
    rec.removed[0] = a;
    rec.removed[1] = b;
    rec.offset[0] = pos_[a] - p;
    rec.offset[1] = pos_[b] - p;

    std::vector<int> touched = vf_[a];
    touched.insert(touched.end(), vf_[b].begin(), vf_[b].end());
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int f : touched) {
      Eigen::Vector3i& t = faces_[f];
      const bool has_a = t[0] == a || t[1] == a || t[2] == a;
      const bool has_b = t[0] == b || t[1] == b || t[2] == b;
      if (has_a && has_b) {
        rec.removed_faces.emplace_back(f, t);
        face_alive_[f] = 0;
        --alive_faces_;
        auto& list = vf_[opposite(t, a, b)];
        list.erase(std::remove(list.begin(), list.end(), f), list.end());
      } else {
        rec.rewired_faces.emplace_back(f, t);
        for (int c = 0; c < 3; ++c) {
          if (t[c] == a || t[c] == b) t[c] = id;
        }
        vf_[id].push_back(f);
      }
    }
    alive_[a] = alive_[b] = 0;
    vf_[a].clear();
    vf_[b].clear();

    rec.ring = neighbors(id);
    Eigen::Matrix3Xd q(3, rec.ring.size());
    for (size_t c = 0; c < rec.ring.size(); ++c) q.col(c) = pos_[rec.ring[c]] - p;
    rec.affine = affine_fit(q, &rec.regularized);
    records_.push_back(std::move(rec));

    for (int r : records_.back().ring) {
      push(id, r);
      for (int s : neighbors(r)) {
        auto it = failed_.find({std::min(r, s), std::max(r, s)});
        if (it == failed_.end()) continue;
        failed_.erase(it);
        push(r, s);
      }
    }
    if (options_.audit) audit(records_.back().ring, id);
  }

  void audit(const std::vector<int>& ring, int id) const {
    std::vector<int> check = ring;
    check.push_back(id);
    for (int v : check) {
      for (int u : neighbors(v)) {
        const size_t s = shared_faces(v, u).size();
        if (s == 0 || s > 2) throw MeshError("collapse produced a non-manifold edge");
      }
    }
  }

  CollapseLog finish() {
    CollapseLog log;
    log.original_vertices = n_;
    log.original_faces = static_cast<int>(faces_.size());
    log.records = std::move(records_);
    std::vector<int> compact(pos_.size(), -1);
    for (size_t v = 0; v < pos_.size(); ++v) {
      if (!alive_[v]) continue;
      compact[v] = static_cast<int>(log.coarse_ids.size());
      log.coarse_ids.push_back(static_cast<int>(v));
    }
    for (size_t f = 0; f < faces_.size(); ++f) {
      if (face_alive_[f]) log.coarse_slots.push_back(static_cast<int>(f));
    }
    Positions cp(log.coarse_ids.size(), 3);
    for (size_t c = 0; c < log.coarse_ids.size(); ++c) cp.row(c) = pos_[log.coarse_ids[c]].transpose();
    Faces cf(log.coarse_slots.size(), 3);
    for (size_t f = 0; f < log.coarse_slots.size(); ++f) {
      for (int c = 0; c < 3; ++c) cf(f, c) = compact[faces_[log.coarse_slots[f]][c]];
    }
    log.coarse = make_mesh(std::move(cp), std::move(cf));
    return log;
  }

  DecimateOptions options_;
  int n_;
  std::vector<Vec3> pos_;
  std::vector<Quadric> quadric_;
  std::vector<char> alive_;
  std::vector<char> locked_;
  std::vector<std::vector<int>> vf_;
  std::vector<Eigen::Vector3i> faces_;
  std::vector<char> face_alive_;
  int alive_faces_ = 0;
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<Candidate>> queue_;
  std::set<std::pair<int, int>> failed_;
  std::vector<CollapseRecord> records_;
};

class Fnv {
 public:
  void bytes(const void* data, size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < size; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  template <typename T>
  void value(T v) { bytes(&v, sizeof(v)); }
  std::uint64_t hash() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

int CollapseLog::regularized_count() const {
  return static_cast<int>(std::count_if(records.begin(), records.end(),
                                        [](const CollapseRecord& r) { return r.regularized; }));
}

int CollapseLog::representative(int id) const {
  while (id >= original_vertices) id = records[id - original_vertices].removed[0];
  return id;
}

std::vector<int> CollapseLog::coarse_index_of_original() const {
  std::vector<int> out(original_vertices, -1);
  for (size_t c = 0; c < coarse_ids.size(); ++c) {
    if (coarse_ids[c] < original_vertices) out[coarse_ids[c]] = static_cast<int>(c);
  }
  return out;
}

Eigen::Matrix3Xd affine_fit(const Eigen::Matrix3Xd& q, bool* regularized) {
  if (q.cols() < 1) throw InvalidArgument("affine fit needs at least one column");
  Mat3 g = q * q.transpose();
  const double trace = g.trace();
  const double lambda_min = Eigen::SelfAdjointEigenSolver<Mat3>(g, Eigen::EigenvaluesOnly).eigenvalues()[0];
  const bool reg = !(lambda_min >= 1e-10 * trace) || trace == 0.0;
  if (reg) g += (trace > 0.0 ? 1e-8 * trace : 1e-300) * Mat3::Identity();
  if (regularized) *regularized = reg;
  return g.ldlt().solve(q);
}

CollapseLog decimate(const TriangleMesh& mesh, int target_faces, const DecimateOptions& options) {
  if (target_faces >= mesh.num_faces()) {
    throw InvalidArgument("target face count " + std::to_string(target_faces) +
                          " is not below the mesh face count " + std::to_string(mesh.num_faces()));
  }
  if (target_faces < options.min_faces) {
    throw InvalidArgument("target face count " + std::to_string(target_faces) +
                          " is below the floor of " + std::to_string(options.min_faces));
  }
  require_valid(mesh);
  Decimator d(mesh, options);
  CollapseLog log = d.run(target_faces);
  log.fingerprint = decimation_fingerprint(mesh, target_faces, options);
  return log;
}

Positions reinflate(const Positions& coarse_positions, const CollapseLog& log) {
  if (coarse_positions.rows() != static_cast<Eigen::Index>(log.coarse_ids.size())) {
    throw InvalidArgument("expected " + std::to_string(log.coarse_ids.size()) +
                          " coarse positions, got " + std::to_string(coarse_positions.rows()));
  }
  Positions p = Positions::Zero(log.id_count(), 3);
  for (size_t c = 0; c < log.coarse_ids.size(); ++c) p.row(log.coarse_ids[c]) = coarse_positions.row(c);
  for (auto it = log.records.rbegin(); it != log.records.rend(); ++it) {
    const CollapseRecord& r = *it;
    const Vec3 pi = p.row(r.inserted).transpose();
    Eigen::Matrix3Xd q(3, r.ring.size());
    for (size_t c = 0; c < r.ring.size(); ++c) q.col(c) = p.row(r.ring[c]).transpose() - pi;
    const Mat3 m = q * r.affine.transpose();
    for (int s = 0; s < 2; ++s) p.row(r.removed[s]) = (pi + m * r.offset[s]).transpose();
  }
  return p.topRows(log.original_vertices);
}

Faces replay_connectivity(const CollapseLog& log) {
  Faces f = Faces::Constant(log.original_faces, 3, -1);
  for (size_t c = 0; c < log.coarse_slots.size(); ++c) {
    for (int k = 0; k < 3; ++k) f(log.coarse_slots[c], k) = log.coarse_ids[log.coarse.faces(c, k)];
  }
  for (auto it = log.records.rbegin(); it != log.records.rend(); ++it) {
    for (const auto& [slot, t] : it->removed_faces) f.row(slot) = t.transpose();
    for (const auto& [slot, t] : it->rewired_faces) f.row(slot) = t.transpose();
  }
  return f;
}

std::uint64_t decimation_fingerprint(const TriangleMesh& mesh, int target_faces,
                                     const DecimateOptions& options) {
  Fnv h;
  h.value<std::int64_t>(mesh.num_vertices());
  h.value<std::int64_t>(mesh.num_faces());
  for (Eigen::Index i = 0; i < mesh.positions.size(); ++i) h.value(mesh.positions.data()[i]);
  for (Eigen::Index i = 0; i < mesh.faces.size(); ++i) h.value<std::int32_t>(mesh.faces.data()[i]);
  h.value<std::int32_t>(target_faces);
  h.value<std::int32_t>(options.min_faces);
  h.value(options.min_normal_cos);
  std::vector<int> locked = options.locked;
  std::sort(locked.begin(), locked.end());
  locked.erase(std::unique(locked.begin(), locked.end()), locked.end());
  for (int v : locked) h.value<std::int32_t>(v);
  return h.hash();
}

std::vector<int> constrained_vertices(const Constraints& constraints) {
  std::vector<int> out = constraints.fixed;
  for (const PointConstraint& p : constraints.points) out.push_back(p.vertex);
  for (const PlaneConstraint& p : constraints.planes) out.push_back(p.vertex);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Constraints coarse_constraints(const Constraints& constraints, const CollapseLog& log) {
  const std::vector<int> index = log.coarse_index_of_original();
  auto map = [&](int v) {
    if (v < 0 || v >= log.original_vertices || index[v] < 0) {
      throw InvalidArgument("constrained vertex " + std::to_string(v) + " is not in the coarse mesh");
    }
    return index[v];
  };
  Constraints out;
  for (int v : constraints.fixed) out.fixed.push_back(map(v));
  for (const PointConstraint& p : constraints.points) out.points.push_back({map(p.vertex), p.target});
  for (const PlaneConstraint& p : constraints.planes) out.planes.push_back({map(p.vertex), p.axis, p.value});
  return out;
}

StyleControls coarse_controls(const StyleControls& controls, const CollapseLog& log) {
  StyleControls out = controls;
  const auto per_vertex = [&](const auto& field, auto& target) {
    if (static_cast<int>(field.size()) != log.original_vertices) return;
    target.clear();
    for (int id : log.coarse_ids) target.push_back(field[log.representative(id)]);
  };
  per_vertex(controls.lambda_field, out.lambda_field);
  if (controls.frames.size() > 1) per_vertex(controls.frames, out.frames);
  return out;
}

StylizeResult fast_stylize(const TriangleMesh& mesh, const StylizeParams& params,
                           const Constraints& constraints, const StyleControls& controls,
                           const FastStylizeOptions& options, const AdmmState* warm,
                           const IterationObserver& observer) {
  using Clock = std::chrono::steady_clock;
  DecimateOptions dopt = options.decimate;
  const std::vector<int> pinned = constrained_vertices(constraints);
  dopt.locked.insert(dopt.locked.end(), pinned.begin(), pinned.end());

  const auto t0 = Clock::now();
  CollapseLog local;
  const CollapseLog* log = nullptr;
  if (options.cache && options.cache->fingerprint != 0 &&
      options.cache->fingerprint == decimation_fingerprint(mesh, options.target_faces, dopt)) {
    log = options.cache;
  } else {
    local = decimate(mesh, options.target_faces, dopt);
    if (options.cache) {
      *options.cache = std::move(local);
      log = options.cache;
    } else {
      log = &local;
    }
  }
  const double pre = std::chrono::duration<double>(Clock::now() - t0).count();

  const auto t1 = Clock::now();
  SolverContext ctx(log->coarse, coarse_constraints(constraints, *log), coarse_controls(controls, *log));
  StylizeResult result = stylize(ctx, params, warm, observer);
  result.positions = reinflate(result.positions, *log);
  result.preprocess_seconds = pre;
  result.online_seconds = std::chrono::duration<double>(Clock::now() - t1).count();
  return result;
}

}  // namespace cubify
