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

#include "cubify/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cubify/error.hpp"

namespace cubify {
namespace {

Vec3 corner(const TriangleMesh& mesh, int f, int c) {
  return mesh.positions.row(mesh.faces(f, c)).transpose();
}

// Twice the area vector of face f.
Vec3 area_vector(const Positions& p, const Faces& faces, int f) {
  Vec3 a = p.row(faces(f, 0)).transpose();
  Vec3 b = p.row(faces(f, 1)).transpose();
  Vec3 c = p.row(faces(f, 2)).transpose();
  return (b - a).cross(c - a);
}

}  // namespace

std::vector<std::vector<int>> vertex_faces(const TriangleMesh& mesh) {
  std::vector<std::vector<int>> vf(static_cast<std::size_t>(mesh.num_vertices()));
  for (int f = 0; f < mesh.num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) vf[mesh.faces(f, c)].push_back(f);
  }
  return vf;
}

Eigen::MatrixX3d half_cotangents(const TriangleMesh& mesh) {
  Eigen::MatrixX3d cot(mesh.num_faces(), 3);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) {
      Vec3 o = corner(mesh, f, c);
      Vec3 e1 = corner(mesh, f, (c + 1) % 3) - o;
      Vec3 e2 = corner(mesh, f, (c + 2) % 3) - o;
      double cross = e1.cross(e2).norm();
      if (!(cross > 0.0)) {
        throw MeshError("degenerate triangle " + std::to_string(f) + " (zero area)");
      }
      double value = std::clamp(e1.dot(e2) / cross, -kCotangentClamp, kCotangentClamp);
      cot(f, c) = 0.5 * value;
    }
  }
  return cot;
}

SpokesRims build_neighborhoods(const TriangleMesh& mesh) {
  const Eigen::MatrixX3d cot = half_cotangents(mesh);
  const auto vf = vertex_faces(mesh);
  SpokesRims sr;
  sr.offsets.resize(static_cast<std::size_t>(mesh.num_vertices()) + 1, 0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    sr.offsets[v + 1] = sr.offsets[v] + 3 * static_cast<int>(vf[v].size());
  }
  sr.edges.reserve(static_cast<std::size_t>(sr.offsets.back()));
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const std::size_t begin = sr.edges.size();
    for (int f : vf[v]) {
      for (int c = 0; c < 3; ++c) {
        sr.edges.push_back({mesh.faces(f, (c + 1) % 3), mesh.faces(f, (c + 2) % 3), f,
                            cot(f, c)});
      }
    }
    std::sort(sr.edges.begin() + static_cast<std::ptrdiff_t>(begin), sr.edges.end(),
              [](const RimEdge& a, const RimEdge& b) {
                return std::tie(a.j, a.k, a.face) < std::tie(b.j, b.k, b.face);
              });
  }
  return sr;
}

Eigen::VectorXd face_areas(const Positions& positions, const Faces& faces) {
  Eigen::VectorXd area(faces.rows());
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    area[f] = 0.5 * area_vector(positions, faces, static_cast<int>(f)).norm();
  }
  return area;
}

Eigen::VectorXd vertex_areas(const TriangleMesh& mesh) {
  const Eigen::VectorXd fa = face_areas(mesh.positions, mesh.faces);
  Eigen::VectorXd area = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) area[mesh.faces(f, c)] += fa[f] / 3.0;
  }
  return area;
}

Positions vertex_normals(const TriangleMesh& mesh, std::vector<int>* fallbacks) {
  const auto vf = vertex_faces(mesh);
  Positions normals = Positions::Zero(mesh.num_vertices(), 3);
  if (fallbacks) fallbacks->clear();

  std::vector<int> sign;
  std::vector<int> queue;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto& fan = vf[v];
    if (fan.empty()) continue;
    // Direction in which face f traverses its edge between v and x:
    // +1 for v -> x, -1 for x -> v, 0 if x is not in f.
    auto direction = [&](int f, int x) {
      for (int c = 0; c < 3; ++c) {
        if (mesh.faces(f, c) != v) continue;
        if (mesh.faces(f, (c + 1) % 3) == x) return 1;
        if (mesh.faces(f, (c + 2) % 3) == x) return -1;
      }
      return 0;
    };
    sign.assign(fan.size(), 0);
    for (std::size_t seed = 0; seed < fan.size(); ++seed) {
      if (sign[seed] != 0) continue;
      sign[seed] = 1;
      queue.assign(1, static_cast<int>(seed));
      while (!queue.empty()) {
        std::size_t a = static_cast<std::size_t>(queue.back());
        queue.pop_back();
        for (int c = 0; c < 3; ++c) {
          int x = mesh.faces(fan[a], c);
          if (x == v) continue;
          int da = direction(fan[a], x);
          for (std::size_t b = 0; b < fan.size(); ++b) {
            if (sign[b] != 0) continue;
            int db = direction(fan[b], x);
            if (db == 0) continue;
            // Co-oriented faces traverse the shared edge in opposite directions.
            sign[b] = (da == -db) ? sign[a] : -sign[a];
            queue.push_back(static_cast<int>(b));
          }
        }
      }
    }
    Vec3 sum = Vec3::Zero();
    for (std::size_t a = 0; a < fan.size(); ++a) {
      sum += sign[a] * area_vector(mesh.positions, mesh.faces, fan[a]);
    }
    double len = sum.norm();
    if (len > 0.0) {
      normals.row(v) = (sum / len).transpose();
    } else {
      normals.row(v) = area_vector(mesh.positions, mesh.faces, fan[0]).normalized().transpose();
      if (fallbacks) fallbacks->push_back(v);
    }
  }
  return normals;
}

double cubeness_score(const Positions& positions, const Faces& faces) {
  double weighted = 0.0;
  double total = 0.0;
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    Vec3 av = area_vector(positions, faces, static_cast<int>(f));
    double len = av.norm();
    if (!(len > 0.0)) continue;
    weighted += av.lpNorm<1>();  // |area vector|_1 = area * |unit normal|_1 (x2)
    total += len;
  }
  return total > 0.0 ? weighted / total : 0.0;
}

}  // namespace cubify
