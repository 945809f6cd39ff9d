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

#include <cstddef>
#include <memory>
#include <string>

namespace cubify {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::size_t max_upload_bytes = std::size_t{256} << 20;
  double long_poll_seconds = 10.0;
  int solver_threads = 1;
  int min_coarse_faces = 500;
  int max_iterations = 1000;
};

/// HTTP facade over the solver. Endpoints:
///   POST /sessions                        upload an OBJ body
///   GET  /sessions/{id}                   session descriptor and status
///   DELETE /sessions/{id}
///   POST /sessions/{id}/job               {lambda, m?, controls?, constraints?, restart?}
///   GET  /sessions/{id}/progress?since=k  long-polled iteration records
///   GET  /sessions/{id}/result?format=obj|positions
/// Every session owns one worker thread that runs its jobs in order.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and starts serving on a background thread; returns the bound port.
  int start();
  /// Stops the listener and all session workers.
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cubify
