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

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace cubify {

/// Runs fn(i) for i in [0, n) on up to `threads` threads, each taking a
/// contiguous block. fn must not touch shared mutable state.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(static_cast<std::size_t>(threads) - 1);
  const int block = (n + threads - 1) / threads;
  for (int t = 1; t < threads; ++t) {
    const int begin = t * block;
    const int end = std::min(n, begin + block);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] {
      for (int i = begin; i < end; ++i) fn(i);
    });
  }
  for (int i = 0; i < std::min(n, block); ++i) fn(i);
}

}  // namespace cubify
