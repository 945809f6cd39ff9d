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

#pragma once

#include "cubify/mesh.hpp"

namespace cubify::shapes {

/// Unit-radius sphere from a subdivided icosahedron: 20 * 4^level faces.
TriangleMesh icosphere(int level, double radius = 1.0);

TriangleMesh icosahedron(double radius = 1.0);

/// Regular tetrahedron with unit edge length.
TriangleMesh tetrahedron();

/// Axis-aligned cube [-h, h]^3 with each face split into n x n quads
/// (12 n^2 triangles).
TriangleMesh cube(int n = 1, double half_extent = 0.5);

/// Flat grid in the z = 0 plane covering [0, sx] x [0, sy] with nx x ny
/// quads, each split into two triangles.
TriangleMesh grid(int nx, int ny, double sx = 1.0, double sy = 1.0);

/// Torus around the z axis: 2 * nu * nv faces.
TriangleMesh torus(int nu, int nv, double major = 1.0, double minor = 0.4);

/// Figure-eight immersion of a Klein bottle (non-orientable, closed).
/// `nv` should be odd so no two vertices coincide.
TriangleMesh klein_bottle(int nu, int nv, double radius = 2.0);

/// Concatenates meshes into one multi-component mesh.
TriangleMesh merge(const TriangleMesh& a, const TriangleMesh& b);

}  // namespace cubify::shapes
