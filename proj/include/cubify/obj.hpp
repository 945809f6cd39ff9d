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

#include <optional>
#include <string>
#include <string_view>

#include "cubify/mesh.hpp"

namespace cubify {

/// Parses Wavefront OBJ text. Polygons are fan-triangulated, `vt`
/// corners are kept per triangle, and all other records are retained for
/// save_obj. Throws ParseError (with the offending line) on bad input and
/// on files without any face.
TriangleMesh load_obj(std::string_view text);

TriangleMesh load_obj_file(const std::string& path);

/// Writes the mesh as OBJ. When the mesh came from load_obj the original
/// records are reproduced in order with only `v` coordinates replaced.
/// `positions_override` must have one row per vertex.
std::string save_obj(const TriangleMesh& mesh,
                     const Positions* positions_override = nullptr);

void save_obj_file(const std::string& path, const TriangleMesh& mesh,
                   const Positions* positions_override = nullptr);

}  // namespace cubify
