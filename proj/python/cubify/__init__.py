# Copyright 2026 The Cubify Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Cubic stylization of triangle meshes."""

from ._cubify import (
    CollapseLog,
    Error,
    InvalidArgument,
    Mesh,
    MeshError,
    ParseError,
    affine_fit,
    cube,
    cubeness_score,
    decimate,
    fast_stylize,
    icosphere,
    load_obj,
    load_obj_file,
    orthogonal_procrustes,
    qp_z_step,
    shrinkage,
    stylize,
    torus,
    validate,
    vertex_normals,
)

__all__ = [
    "CollapseLog",
    "Error",
    "InvalidArgument",
    "Mesh",
    "MeshError",
    "ParseError",
    "affine_fit",
    "cube",
    "cubeness_score",
    "decimate",
    "fast_stylize",
    "icosphere",
    "load_obj",
    "load_obj_file",
    "orthogonal_procrustes",
    "qp_z_step",
    "shrinkage",
    "stylize",
    "torus",
    "validate",
    "vertex_normals",
]
