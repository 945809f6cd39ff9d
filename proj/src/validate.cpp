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

#include "cubify/validate.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>

#include "cubify/error.hpp"

namespace cubify {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

struct HalfEdge {
  int lo, hi;
  int face;
  bool forward;  // face traverses lo -> hi
  bool operator<(const HalfEdge& o) const {
    return std::tie(lo, hi, face) < std::tie(o.lo, o.hi, o.face);
  }
};

bool face_indices_valid(const TriangleMesh& mesh, int f) {
  const int n = mesh.num_vertices();
  auto t = mesh.faces.row(f);
  for (int c = 0; c < 3; ++c) {
    if (t[c] < 0 || t[c] >= n) return false;
  }
  return t[0] != t[1] && t[1] != t[2] && t[0] != t[2];
}

}  // namespace

std::vector<int> vertex_components(const TriangleMesh& mesh, int* count) {
  const int n = mesh.num_vertices();
  DisjointSets sets(n);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (!face_indices_valid(mesh, f)) continue;
    sets.unite(mesh.faces(f, 0), mesh.faces(f, 1));
    sets.unite(mesh.faces(f, 1), mesh.faces(f, 2));
  }
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<int> root_label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int v = 0; v < n; ++v) {
    int r = sets.find(v);
    if (root_label[r] < 0) root_label[r] = next++;
    label[v] = root_label[r];
  }
  if (count) *count = next;
  return label;
}

ValidationReport validate(const TriangleMesh& mesh) {
  ValidationReport report;
  const int nv = mesh.num_vertices();
  const int nf = mesh.num_faces();
  report.num_vertices = nv;
  report.num_faces = nf;

  std::vector<char> good(static_cast<std::size_t>(nf), 1);
  for (int f = 0; f < nf; ++f) {
    if (!face_indices_valid(mesh, f)) {
      report.invalid_faces.push_back(f);
      good[f] = 0;
    }
  }

  const double diag = bbox_diagonal(mesh.positions);
  const double area_floor = kDegenerateAreaRatio * diag * diag;
  for (int f = 0; f < nf; ++f) {
    if (!good[f]) continue;
    Vec3 a = mesh.positions.row(mesh.faces(f, 0));
    Vec3 b = mesh.positions.row(mesh.faces(f, 1));
    Vec3 c = mesh.positions.row(mesh.faces(f, 2));
    double area = 0.5 * (b - a).cross(c - a).norm();
    if (!(area > area_floor)) report.degenerate_faces.push_back(f);
  }

  // Edge incidence.
  std::vector<HalfEdge> edges;
  edges.reserve(static_cast<std::size_t>(nf) * 3);
  std::vector<int> valence(static_cast<std::size_t>(nv), 0);
  for (int f = 0; f < nf; ++f) {
    if (!good[f]) continue;
    for (int c = 0; c < 3; ++c) {
      int a = mesh.faces(f, c);
      int b = mesh.faces(f, (c + 1) % 3);
      edges.push_back({std::min(a, b), std::max(a, b), f, a < b});
      ++valence[a];
    }
  }
  std::sort(edges.begin(), edges.end());

  // Face adjacency across manifold edges, with whether the two faces agree
  // on orientation (they traverse the shared edge in opposite directions).
  std::vector<std::vector<std::pair<int, bool>>> face_adj(static_cast<std::size_t>(nf));
  DisjointSets boundary_sets(nv);
  std::vector<char> on_boundary(static_cast<std::size_t>(nv), 0);
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j].lo == edges[i].lo && edges[j].hi == edges[i].hi) ++j;
    const std::size_t count = j - i;
    if (count > 2) {
      report.non_manifold_edges.push_back({edges[i].lo, edges[i].hi});
    } else if (count == 2) {
      bool agree = edges[i].forward != edges[i + 1].forward;
      face_adj[edges[i].face].emplace_back(edges[i + 1].face, agree);
      face_adj[edges[i + 1].face].emplace_back(edges[i].face, agree);
    } else {
      boundary_sets.unite(edges[i].lo, edges[i].hi);
      on_boundary[edges[i].lo] = on_boundary[edges[i].hi] = 1;
    }
    i = j;
  }

  std::vector<int> loop_roots;
  for (int v = 0; v < nv; ++v) {
    if (on_boundary[v]) loop_roots.push_back(boundary_sets.find(v));
  }
  std::sort(loop_roots.begin(), loop_roots.end());
  report.boundary_loops = static_cast<int>(
      std::unique(loop_roots.begin(), loop_roots.end()) - loop_roots.begin());

  // Vertex manifoldness: the incident faces of a vertex must form a single
  // fan when linked through shared edges at that vertex.
  std::vector<std::vector<int>> vf(static_cast<std::size_t>(nv));
  for (int f = 0; f < nf; ++f) {
    if (!good[f]) continue;
    for (int c = 0; c < 3; ++c) vf[mesh.faces(f, c)].push_back(f);
  }
  for (int v = 0; v < nv; ++v) {
    if (vf[v].empty()) {
      report.isolated_vertices.push_back(v);
      continue;
    }
    const auto& fan = vf[v];
    std::vector<char> seen(fan.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      std::size_t a = stack.back();
      stack.pop_back();
      for (const auto& [g, agree] : face_adj[fan[a]]) {
        (void)agree;
        for (std::size_t b = 0; b < fan.size(); ++b) {
          if (seen[b] || fan[b] != g) continue;
          // The shared edge must contain v for the faces to be fan neighbours.
          auto fa = mesh.faces.row(fan[a]);
          auto fb = mesh.faces.row(g);
          int shared = 0;
          for (int x = 0; x < 3; ++x) {
            if (fa[x] == v) continue;
            for (int y = 0; y < 3; ++y) shared += (fa[x] == fb[y]);
          }
          if (shared >= 1) {
            seen[b] = 1;
            ++reached;
            stack.push_back(b);
          }
        }
      }
    }
    if (reached != fan.size()) report.non_manifold_vertices.push_back(v);
  }

  // Orientability by propagating a sign per face.
  std::vector<int> sign(static_cast<std::size_t>(nf), 0);
  for (int seed = 0; seed < nf; ++seed) {
    if (!good[seed] || sign[seed] != 0) continue;
    sign[seed] = 1;
    std::queue<int> queue;
    queue.push(seed);
    while (!queue.empty()) {
      int f = queue.front();
      queue.pop();
      for (const auto& [g, agree] : face_adj[f]) {
        int want = agree ? sign[f] : -sign[f];
        if (sign[g] == 0) {
          sign[g] = want;
          queue.push(g);
        } else if (sign[g] != want) {
          report.orientable = false;
        }
      }
    }
  }

  vertex_components(mesh, &report.components);
  return report;
}

std::string ValidationReport::summary() const {
  std::ostringstream ss;
  ss << num_vertices << " vertices, " << num_faces << " faces, " << components
     << " component(s), " << boundary_loops << " boundary loop(s), "
     << (orientable ? "orientable" : "non-orientable");
  if (!invalid_faces.empty()) ss << "; " << invalid_faces.size() << " invalid face(s)";
  if (!non_manifold_edges.empty()) {
    ss << "; " << non_manifold_edges.size() << " non-manifold edge(s)";
    for (std::size_t i = 0; i < std::min<std::size_t>(non_manifold_edges.size(), 8); ++i) {
      ss << (i ? ", " : ": ") << '(' << non_manifold_edges[i][0] << ','
         << non_manifold_edges[i][1] << ')';
    }
  }
  if (!non_manifold_vertices.empty()) {
    ss << "; " << non_manifold_vertices.size() << " non-manifold vertex(es)";
  }
  if (!degenerate_faces.empty()) {
    ss << "; " << degenerate_faces.size() << " degenerate face(s)";
  }
  return ss.str();
}

void require_valid(const TriangleMesh& mesh) {
  ValidationReport report = validate(mesh);
  if (!report.ok()) throw MeshError("invalid mesh: " + report.summary());
}

}  // namespace cubify
