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

#include "cubify/service.hpp"

#include <atomic>
#include <bit>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <stop_token>
#include <thread>

#include "cubify/constraints.hpp"
#include "cubify/error.hpp"
#include "cubify/obj.hpp"
#include "cubify/progressive.hpp"
#include "cubify/style.hpp"
#include "cubify/stylizer.hpp"
#include "cubify/validate.hpp"
#include "json.hpp"

// After Eigen: <resolv.h> (pulled in by httplib) defines a `_res` macro.
#include <httplib.h>

namespace cubify {
namespace {

using json = nlohmann::json;

json validation_json(const ValidationReport& r) {
  json edges = json::array();
  for (const auto& e : r.non_manifold_edges) edges.push_back({e[0], e[1]});
  return {
      {"ok", r.ok()},
      {"manifold", r.manifold()},
      {"vertices", r.num_vertices},
      {"faces", r.num_faces},
      {"components", r.components},
      {"boundary_loops", r.boundary_loops},
      {"orientable", r.orientable},
      {"invalid_faces", r.invalid_faces},
      {"non_manifold_edges", edges},
      {"non_manifold_vertices", r.non_manifold_vertices},
      {"degenerate_faces", r.degenerate_faces},
      {"isolated_vertices", r.isolated_vertices},
      {"summary", r.summary()},
  };
}

/// Little-endian "CPOS" stream: magic, u32 vertex count, float32 xyz triples.
std::string encode_positions(const Positions& p) {
  std::string out = "CPOS";
  const auto put32 = [&out](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  put32(static_cast<std::uint32_t>(p.rows()));
  out.reserve(8 + 12 * p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (int c = 0; c < 3; ++c) put32(std::bit_cast<std::uint32_t>(static_cast<float>(p(i, c))));
  }
  return out;
}

enum class Status { kIdle, kRunning, kConverged, kStopped, kFailed };

const char* status_name(Status s) {
  switch (s) {
    case Status::kIdle: return "idle";
    case Status::kRunning: return "running";
    case Status::kConverged: return "converged";
    case Status::kStopped: return "stopped";
    case Status::kFailed: return "failed";
  }
  return "idle";
}

// Jobs sharing a key can reuse each other's z, u and rho.
struct StructureKey {
  int m = 0;
  std::string constraints;
  int polyhedron_rows = 0;
  bool operator==(const StructureKey&) const = default;
};

struct Job {
  int id = 0;
  int m = 0;
  StyleControls controls;
  Constraints constraints;
  StructureKey key;
  bool restart = false;
  int max_iterations = 1000;
  double stop_tolerance = 3e-3;
};

struct ProgressRecord {
  long seq = 0;
  int job = 0;
  IterationRecord rec;
};

class Session {
 public:
  Session(std::string id, TriangleMesh mesh, ValidationReport report, const ServiceOptions& options)
      : id_(std::move(id)), mesh_(std::move(mesh)), report_(std::move(report)), options_(options) {
    worker_ = std::jthread([this](std::stop_token st) { worker_loop(st); });
  }

  ~Session() {
    worker_.request_stop();
    cv_.notify_all();
  }

  const TriangleMesh& mesh() const { return mesh_; }
  const ServiceOptions& options() const { return options_; }

  json descriptor() const {
    const Eigen::RowVector3d lo = mesh_.positions.colwise().minCoeff();
    const Eigen::RowVector3d hi = mesh_.positions.colwise().maxCoeff();
    std::lock_guard lock(mu_);
    return {
        {"id", id_},
        {"nv", mesh_.num_vertices()},
        {"nf", mesh_.num_faces()},
        {"bbox", {{"min", {lo[0], lo[1], lo[2]}}, {"max", {hi[0], hi[1], hi[2]}}, {"diagonal", (hi - lo).norm()}}},
        {"validation", validation_json(report_)},
        {"status", status_name(visible_status())},
        {"job_id", last_job_},
        {"latest", seq_},
    };
  }

  json submit(Job job) {
    std::lock_guard lock(mu_);
    job.id = ++last_job_;
    const bool warm = !job.restart && submitted_key_.has_value() && *submitted_key_ == job.key;
    submitted_key_ = job.key;
    queue_.push_back(std::move(job));
    cv_.notify_all();
    return {{"job_id", last_job_}, {"warm", warm}};
  }

  json progress(long since, double timeout_seconds) {
    std::unique_lock lock(mu_);
    const auto ready = [&] {
      return (!trace_.empty() && trace_.back().seq > since) || visible_status() != Status::kRunning;
    };
    cv_.wait_for(lock, std::chrono::duration<double>(timeout_seconds), ready);
    json records = json::array();
    for (const ProgressRecord& p : trace_) {
      if (p.seq <= since) continue;
      records.push_back({
          {"iter", p.seq},
          {"job_id", p.job},
          {"job_iter", p.rec.iteration},
          {"rel_displacement", p.rec.rel_displacement},
          {"energy", p.rec.energy},
          {"energy_before_global", p.rec.energy_before_global},
          {"cubeness", p.rec.cubeness},
          {"millis", p.rec.millis},
      });
    }
    json out = {{"records", records}, {"status", status_name(visible_status())},
                {"job_id", running_job_ > 0 ? running_job_ : finished_job_}, {"latest", seq_}};
    if (!error_.empty()) out["error"] = error_;
    return out;
  }

  /// Full-resolution positions of the latest iteration, if any.
  std::optional<Positions> latest() const {
    std::unique_lock lock(mu_);
    if (!latest_) return std::nullopt;
    const Positions p = *latest_;
    const std::shared_ptr<const CollapseLog> log = latest_log_;
    lock.unlock();
    return log ? reinflate(p, *log) : p;
  }

 private:
  Status visible_status() const {
    if (running_job_ > 0 || !queue_.empty()) return Status::kRunning;
    return status_;
  }

  void worker_loop(std::stop_token st) {
    while (true) {
      Job job;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, st, [&] { return !queue_.empty(); });
        if (st.stop_requested()) return;
        job = std::move(queue_.front());
        queue_.pop_front();
        running_job_ = job.id;
        error_.clear();
      }
      Status final_status = Status::kStopped;
      std::string error;
      try {
        final_status = run_job(job, st);
      } catch (const std::exception& e) {
        final_status = Status::kFailed;
        error = e.what();
      }
      std::lock_guard lock(mu_);
      status_ = final_status;
      error_ = error;
      finished_job_ = job.id;
      running_job_ = 0;
      cv_.notify_all();
    }
  }

  Status run_job(const Job& job, const std::stop_token& st) {
    std::shared_ptr<const CollapseLog> log;
    Constraints constraints = job.constraints;
    StyleControls controls = job.controls;
    if (job.m > 0) {
      auto& slot = logs_[{job.m, job.key.constraints}];
      if (!slot) {
        DecimateOptions d;
        d.min_faces = options_.min_coarse_faces;
        d.locked = constrained_vertices(job.constraints);
        slot = std::make_shared<const CollapseLog>(decimate(mesh_, job.m, d));
      }
      log = slot;
      constraints = coarse_constraints(job.constraints, *log);
      controls = coarse_controls(job.controls, *log);
    }
    const StructureKey context_key{job.m, job.key.constraints, 0};
    if (!context_ || !(context_key_ == context_key)) {
      context_.reset();
      context_ = std::make_unique<SolverContext>(log ? log->coarse : mesh_, constraints, controls);
      context_key_ = context_key;
    } else {
      context_->set_controls(controls);
    }

    StylizeParams params;
    params.max_iterations = job.max_iterations;
    params.stop_tolerance = job.stop_tolerance;
    params.threads = options_.solver_threads;
    const bool warm = !job.restart && state_ && state_key_ == job.key &&
                      state_->size() == context_->num_vertices();

    const auto observer = [&](const IterationRecord& rec, const Positions& x) {
      std::lock_guard lock(mu_);
      trace_.push_back({++seq_, job.id, rec});
      latest_ = x;
      latest_log_ = log;
      cv_.notify_all();
      return queue_.empty() && !st.stop_requested();
    };
    StylizeResult result = stylize(*context_, params, warm ? &*state_ : nullptr, observer);
    state_ = std::move(result.state);
    state_key_ = job.key;
    return result.converged ? Status::kConverged : Status::kStopped;
  }

  const std::string id_;
  const TriangleMesh mesh_;
  const ValidationReport report_;
  const ServiceOptions options_;

  mutable std::mutex mu_;
  std::condition_variable_any cv_;
  std::deque<Job> queue_;
  Status status_ = Status::kIdle;
  std::string error_;
  int last_job_ = 0;
  int running_job_ = 0;
  int finished_job_ = 0;
  std::optional<StructureKey> submitted_key_;
  std::vector<ProgressRecord> trace_;
  long seq_ = 0;
  std::optional<Positions> latest_;
  std::shared_ptr<const CollapseLog> latest_log_;

  // Owned by the worker thread.
  std::map<std::pair<int, std::string>, std::shared_ptr<const CollapseLog>> logs_;
  std::unique_ptr<SolverContext> context_;
  StructureKey context_key_;
  std::optional<AdmmState> state_;
  StructureKey state_key_;

  std::jthread worker_;  // last member: joins before the state above is destroyed
};

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, status, {{"error", message}});
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  httplib::Server server;
  std::thread listener;
  std::mutex mu;
  std::condition_variable stopped_cv;
  bool running = false;
  long next_id = 0;
  std::map<std::string, std::shared_ptr<Session>> sessions;

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(mu);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  void upload(const httplib::Request& req, httplib::Response& res) {
    TriangleMesh mesh;
    try {
      mesh = load_obj(req.body);
    } catch (const ParseError& e) {
      reply_json(res, 400, {{"error", e.what()}, {"line", e.line()}});
      return;
    } catch (const std::exception& e) {
      reply_error(res, 400, e.what());
      return;
    }
    ValidationReport report = validate(mesh);
    if (!report.ok()) {
      reply_json(res, 400, {{"error", "invalid mesh: " + report.summary()}, {"validation", validation_json(report)}});
      return;
    }
    std::shared_ptr<Session> session;
    {
      std::lock_guard lock(mu);
      const std::string id = "s" + std::to_string(++next_id);
      session = std::make_shared<Session>(id, std::move(mesh), std::move(report), options);
      sessions[id] = session;
    }
    reply_json(res, 201, session->descriptor());
  }

  void job(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<Session> session = find(id);
    if (!session) return reply_error(res, 404, "no session " + id);
    json body;
    try {
      body = json::parse(req.body.empty() ? std::string("{}") : req.body);
    } catch (const json::exception& e) {
      return reply_error(res, 400, std::string("malformed JSON: ") + e.what());
    }
    Job job;
    job.max_iterations = options.max_iterations;
    try {
      if (!body.is_object()) throw InvalidArgument("job must be a JSON object");
      if (!body.contains("lambda") || !body["lambda"].is_number()) throw InvalidArgument("lambda must be a number");
      const double lambda = body["lambda"].get<double>();
      if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be >= 0");
      job.controls.lambda = lambda;
      if (body.contains("controls") && !body["controls"].is_null()) {
        job.controls = parse_controls_json(body["controls"].dump(), job.controls);
      }
      validate_controls(job.controls, session->mesh().num_vertices());
      if (body.contains("constraints") && !body["constraints"].is_null()) {
        job.constraints = parse_constraints_json(body["constraints"].dump());
        resolve_constraints(job.constraints, session->mesh().positions);
        job.key.constraints = body["constraints"].dump();
      }
      if (body.contains("m") && !body["m"].is_null()) {
        if (!body["m"].is_number_integer()) throw InvalidArgument("m must be an integer or null");
        job.m = body["m"].get<int>();
        const int nf = session->mesh().num_faces();
        if (job.m != 0 && (job.m >= nf || job.m < options.min_coarse_faces)) {
          throw InvalidArgument("m must lie in [" + std::to_string(options.min_coarse_faces) + ", " +
                                std::to_string(nf) + ")");
        }
      }
      if (body.contains("restart")) job.restart = body["restart"].get<bool>();
      if (body.contains("max_iterations")) {
        job.max_iterations = body["max_iterations"].get<int>();
        if (job.max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
      }
      if (body.contains("stop_tol")) {
        job.stop_tolerance = body["stop_tol"].get<double>();
        if (!(job.stop_tolerance > 0.0)) throw InvalidArgument("stop_tol must be positive");
      }
    } catch (const std::exception& e) {
      return reply_error(res, 422, e.what());
    }
    job.key.m = job.m;
    job.key.polyhedron_rows = job.controls.polyhedron ? static_cast<int>(job.controls.polyhedron->rows()) : 0;
    reply_json(res, 200, session->submit(std::move(job)));
  }

  void progress(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<Session> session = find(id);
    if (!session) return reply_error(res, 404, "no session " + id);
    long since = 0;
    if (req.has_param("since")) {
      try {
        since = std::stol(req.get_param_value("since"));
      } catch (const std::exception&) {
        return reply_error(res, 400, "since must be an integer");
      }
    }
    reply_json(res, 200, session->progress(since, options.long_poll_seconds));
  }

  void result(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<Session> session = find(id);
    if (!session) return reply_error(res, 404, "no session " + id);
    const std::string format = req.has_param("format") ? req.get_param_value("format") : "obj";
    if (format != "obj" && format != "positions") return reply_error(res, 400, "format must be obj or positions");
    std::optional<Positions> p = session->latest();
    if (!p) return reply_error(res, 409, "no iteration has completed yet");
    if (format == "positions") {
      res.set_content(encode_positions(*p), "application/octet-stream");
    } else {
      res.set_content(save_obj(session->mesh(), &*p), "text/plain");
    }
  }

  void routes() {
    server.set_payload_max_length(options.max_upload_bytes);
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) { reply_json(res, 200, {{"ok", true}}); });
    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) { upload(req, res); });
    server.Get(R"(/sessions/([A-Za-z0-9]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::shared_ptr<Session> s = find(req.matches[1]);
      if (!s) return reply_error(res, 404, "no session " + std::string(req.matches[1]));
      reply_json(res, 200, s->descriptor());
    });
    server.Delete(R"(/sessions/([A-Za-z0-9]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::shared_ptr<Session> s;
      {
        std::lock_guard lock(mu);
        auto it = sessions.find(req.matches[1]);
        if (it != sessions.end()) {
          s = std::move(it->second);
          sessions.erase(it);
        }
      }
      if (!s) return reply_error(res, 404, "no session " + std::string(req.matches[1]));
      res.status = 204;
    });
    server.Post(R"(/sessions/([A-Za-z0-9]+)/job)", [this](const httplib::Request& req, httplib::Response& res) {
      job(req.matches[1], req, res);
    });
    server.Get(R"(/sessions/([A-Za-z0-9]+)/progress)", [this](const httplib::Request& req, httplib::Response& res) {
      progress(req.matches[1], req, res);
    });
    server.Get(R"(/sessions/([A-Za-z0-9]+)/result)", [this](const httplib::Request& req, httplib::Response& res) {
      result(req.matches[1], req, res);
    });
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  impl_->routes();
}

Service::~Service() { stop(); }

int Service::start() {
  int port = impl_->options.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(impl_->options.host);
  } else if (!impl_->server.bind_to_port(impl_->options.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error("cannot bind " + impl_->options.host + ":" + std::to_string(impl_->options.port));
  }
  {
    std::lock_guard lock(impl_->mu);
    impl_->running = true;
  }
  impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
  return port;
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
  std::map<std::string, std::shared_ptr<Session>> sessions;
  {
    std::lock_guard lock(impl_->mu);
    sessions.swap(impl_->sessions);
    impl_->running = false;
  }
  sessions.clear();
  impl_->stopped_cv.notify_all();
}

void Service::wait() {
  std::unique_lock lock(impl_->mu);
  impl_->stopped_cv.wait(lock, [this] { return !impl_->running; });
}

}  // namespace cubify
