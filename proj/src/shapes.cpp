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

#include "cubify/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace cubify::shapes {
namespace {

TriangleMesh from_lists(const std::vector<Vec3>& v, const std::vector<Eigen::Vector3i>& f) {
  Positions p(static_cast<Eigen::Index>(v.size()), 3);
  for (std::size_t i = 0; i < v.size(); ++i) p.row(i) = v[i].transpose();
  Faces faces(static_cast<Eigen::Index>(f.size()), 3);
  for (std::size_t i = 0; i < f.size(); ++i) faces.row(i) = f[i].transpose();
  return make_mesh(std::move(p), std::move(faces));
}

void icosahedron_lists(std::vector<Vec3>& v, std::vector<Eigen::Vector3i>& f) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  v = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
       {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
}

}  // namespace

TriangleMesh icosahedron(double radius) {
  std::vector<Vec3> v;
  std::vector<Eigen::Vector3i> f;
  icosahedron_lists(v, f);
  for (auto& p : v) p *= radius;
  return from_lists(v, f);
}

TriangleMesh icosphere(int level, double radius) {
  std::vector<Vec3> v;
  std::vector<Eigen::Vector3i> f;
  icosahedron_lists(v, f);
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(f.size() * 4);
    for (const auto& t : f) {
      int a = mid(t[0], t[1]);
      int b = mid(t[1], t[2]);
      int c = mid(t[2], t[0]);
      next.emplace_back(t[0], a, c);
      next.emplace_back(t[1], b, a);
      next.emplace_back(t[2], c, b);
      next.emplace_back(a, b, c);
    }
    f = std::move(next);
  }
  for (auto& p : v) p *= radius;
  return from_lists(v, f);
}

TriangleMesh tetrahedron() {
  // Alternate corners of a cube with edge 1/sqrt(2) give unit tetrahedron edges.
  const double s = 0.5 / std::sqrt(2.0);
  std::vector<Vec3> v = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<Eigen::Vector3i> f = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return from_lists(v, f);
}

TriangleMesh cube(int n, double h) {
  std::vector<Vec3> v;
  std::vector<Eigen::Vector3i> f;
  std::map<std::tuple<int, int, int>, int> index;  // lattice coords -> vertex
  auto vertex = [&](int i, int j, int k) {
    auto key = std::make_tuple(i, j, k);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    v.emplace_back(-h + 2.0 * h * i / n, -h + 2.0 * h * j / n, -h + 2.0 * h * k / n);
    int id = static_cast<int>(v.size()) - 1;
    index.emplace(key, id);
    return id;
  };
  // Each side: fixed axis, its value (0 or n), and two in-plane axes ordered
  // so that (u x w) points outward.
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      int u_axis = (axis + 1) % 3;
      int w_axis = (axis + 2) % 3;
      if (side == 0) std::swap(u_axis, w_axis);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          auto at = [&](int da, int db) {
            int c[3];
            c[axis] = side * n;
            c[u_axis] = a + da;
            c[w_axis] = b + db;
            return vertex(c[0], c[1], c[2]);
          };
          int p00 = at(0, 0), p10 = at(1, 0), p11 = at(1, 1), p01 = at(0, 1);
          // Diagonals run through the corners with coordinate sign product
          // +1, so all eight cube corners see a symmetric fan.
          if (side == 1) {
            f.emplace_back(p00, p10, p11);
            f.emplace_back(p00, p11, p01);
          } else {
            f.emplace_back(p00, p10, p01);
            f.emplace_back(p10, p11, p01);
          }
        }
      }
    }
  }
  return from_lists(v, f);
}

TriangleMesh grid(int nx, int ny, double sx, double sy) {
  std::vector<Vec3> v;
  std::vector<Eigen::Vector3i> f;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) v.emplace_back(sx * i / nx, sy * j / ny, 0.0);
  }
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      f.emplace_back(id(i, j), id(i + 1, j), id(i + 1, j + 1));
      f.emplace_back(id(i, j), id(i + 1, j + 1), id(i, j + 1));
    }
  }
  return from_lists(v, f);
}

TriangleMesh torus(int nu, int nv, double major, double minor) {
  std::vector<Vec3> v;
  std::vector<Eigen::Vector3i> f;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < nu; ++i) {
    double u = two_pi * i / nu;
    for (int j = 0; j < nv; ++j) {
      double w = two_pi * j / nv;
      double r = major + minor * std::cos(w);
      v.emplace_back(r * std::cos(u), r * std::sin(u), minor * std::sin(w));
    }
  }
  auto id = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      f.emplace_back(id(i, j), id(i + 1, j), id(i + 1, j + 1));
      f.emplace_back(id(i, j), id(i + 1, j + 1), id(i, j + 1));
    }
  }
  return from_lists(v, f);
}

TriangleMesh klein_bottle(int nu, int nv, double radius) {
  std::vector<Vec3> v;
  std::vector<Eigen::Vector3i> f;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < nu; ++i) {
    double u = two_pi * i / nu;
    for (int j = 0; j < nv; ++j) {
      double w = two_pi * j / nv;
      double c = std::cos(u / 2), s = std::sin(u / 2);
      double r = radius + c * std::sin(w) - s * std::sin(2 * w);
      v.emplace_back(r * std::cos(u), r * std::sin(u), s * std::sin(w) + c * std::sin(2 * w));
    }
  }
  // Going once around u maps parameter w to -w.
  auto id = [&](int i, int j) {
    j = ((j % nv) + nv) % nv;
    if (i >= nu) {
      i -= nu;
      j = (nv - j) % nv;
    }
    return i * nv + j;
  };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      f.emplace_back(id(i, j), id(i + 1, j), id(i + 1, j + 1));
      f.emplace_back(id(i, j), id(i + 1, j + 1), id(i, j + 1));
    }
  }
  return from_lists(v, f);
}

TriangleMesh merge(const TriangleMesh& a, const TriangleMesh& b) {
  Positions p(a.num_vertices() + b.num_vertices(), 3);
  p << a.positions, b.positions;
  Faces f(a.num_faces() + b.num_faces(), 3);
  f << a.faces, (b.faces.array() + a.num_vertices()).matrix();
  return make_mesh(std::move(p), std::move(f));
}

}  // namespace cubify::shapes
