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

namespace cubify {

/// Rotation R in SO(3) maximising Tr(R * M). With M = U S V^T this is
/// V U^T, flipping the column of U for the smallest singular value when
/// needed so that det R = +1.
Mat3 orthogonal_procrustes(const Mat3& m);

/// True when |Q^T Q - I|_F <= tol and det Q > 0.
bool is_rotation(const Mat3& q, double tol = 1e-8);

/// Rotation by `degrees` about `axis` (need not be unit length).
Mat3 axis_angle_rotation(const Vec3& axis, double degrees);

}  // namespace cubify
