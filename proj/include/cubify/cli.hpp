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

#include <iosfwd>
#include <string>
#include <vector>

namespace cubify {

/// Exit codes of the command-line front-end.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitIterationCap = 2;

/// Runs the `cubify` command with `args` (argv without the program name).
/// Writes `<out>.obj` and `<out>.report.json`; messages go to `out`/`err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Path of the decimation cache for `input` at target `faces`.
std::string pmcache_path(const std::string& input, int faces);

}  // namespace cubify
