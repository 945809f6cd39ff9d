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

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "cubify/service.hpp"

int main(int argc, char** argv) {
  cubify::ServiceOptions options;
  double max_upload_mb = 256.0;
  CLI::App app{"Local HTTP service for interactive cubic stylization", "cubify-serve"};
  app.add_option("--host", options.host, "Bind address")->capture_default_str();
  app.add_option("--port", options.port, "Port (0 picks a free one)")->capture_default_str();
  app.add_option("--max-upload-mb", max_upload_mb, "Largest accepted OBJ upload")->capture_default_str();
  app.add_option("--poll-seconds", options.long_poll_seconds, "Long-poll timeout")->capture_default_str();
  app.add_option("--threads", options.solver_threads, "Local-step threads per solve")->capture_default_str();
  app.add_option("--min-coarse-faces", options.min_coarse_faces, "Smallest accepted m")->capture_default_str();
  app.add_option("--max-iters", options.max_iterations, "Default outer iteration cap")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  options.max_upload_bytes = static_cast<std::size_t>(max_upload_mb * 1024.0 * 1024.0);

  // Handle SIGINT/SIGTERM synchronously in this thread; workers inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  cubify::Service service(options);
  int port = 0;
  try {
    port = service.start();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "listening on http://" << options.host << ":" << port << std::endl;
  int received = 0;
  sigwait(&signals, &received);
  service.stop();
  return 0;
}
