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

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstring>
#include <map>
#include <string>
#include <thread>

#include "cubify/geometry.hpp"
#include "cubify/obj.hpp"
#include "cubify/service.hpp"
#include "cubify/shapes.hpp"
#include "json.hpp"

namespace cubify {
namespace {

using json = nlohmann::json;

struct HttpResponse {
  int status = 0;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
  json as_json() const { return json::parse(body); }
};

// Minimal HTTP/1.1 client over a plain socket: one request per connection.
HttpResponse http(int port, const std::string& method, const std::string& target,
                  const std::string& body = {}, const std::string& content_type = "application/json") {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  EXPECT_GE(fd, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  EXPECT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
  std::string request = method + " " + target + " HTTP/1.1\r\nHost: 127.0.0.1\r\nConnection: close\r\n";
  if (!body.empty() || method == "POST") {
    request += "Content-Type: " + content_type + "\r\nContent-Length: " + std::to_string(body.size()) + "\r\n";
  }
  request += "\r\n" + body;
  for (std::size_t sent = 0; sent < request.size();) {
    const ssize_t n = ::send(fd, request.data() + sent, request.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) break;  // the server may close early, e.g. on an oversized body
    sent += static_cast<std::size_t>(n);
  }
  std::string raw;
  char buf[65536];
  for (ssize_t n; (n = ::recv(fd, buf, sizeof buf, 0)) > 0;) raw.append(buf, static_cast<std::size_t>(n));
  ::close(fd);

  HttpResponse r;
  const std::size_t head_end = raw.find("\r\n\r\n");
  if (head_end == std::string::npos) return r;
  std::string head = raw.substr(0, head_end);
  r.status = std::stoi(head.substr(head.find(' ') + 1, 3));
  std::size_t pos = head.find("\r\n");
  while (pos != std::string::npos) {
    const std::size_t next = head.find("\r\n", pos + 2);
    const std::string line = head.substr(pos + 2, next == std::string::npos ? std::string::npos : next - pos - 2);
    const std::size_t colon = line.find(':');
    if (colon != std::string::npos) {
      std::string name = line.substr(0, colon);
      std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
      r.headers[name] = line.substr(line.find_first_not_of(' ', colon + 1));
    }
    pos = next;
  }
  r.body = raw.substr(head_end + 4);
  if (r.headers.count("content-length")) r.body.resize(std::stoul(r.headers["content-length"]));
  return r;
}

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ServiceOptions o;
    o.port = 0;
    o.long_poll_seconds = 2.0;
    o.min_coarse_faces = 300;
    o.max_upload_bytes = 1 << 20;
    service_ = new Service(o);
    port_ = service_->start();
  }
  static void TearDownTestSuite() {
    service_->stop();
    delete service_;
  }

  static std::string sphere_obj() { return save_obj(shapes::icosphere(3)); }

  std::string upload() {
    const HttpResponse r = http(port_, "POST", "/sessions", sphere_obj(), "text/plain");
    EXPECT_EQ(r.status, 201) << r.body;
    return r.as_json()["id"].get<std::string>();
  }

  // Long-polls until the session is no longer running; returns every record.
  json wait_idle(const std::string& id) {
    json records = json::array();
    long since = 0;
    for (int round = 0; round < 600; ++round) {
      const HttpResponse r = http(port_, "GET", "/sessions/" + id + "/progress?since=" + std::to_string(since));
      EXPECT_EQ(r.status, 200);
      const json j = r.as_json();
      for (const auto& rec : j["records"]) records.push_back(rec);
      since = j["latest"].get<long>();
      if (j["status"] != "running") {
        last_status_ = j["status"].get<std::string>();
        return records;
      }
    }
    ADD_FAILURE() << "session never went idle";
    return records;
  }

  static Service* service_;
  static int port_;
  std::string last_status_;
};

Service* ServiceTest::service_ = nullptr;
int ServiceTest::port_ = 0;

TEST_F(ServiceTest, HealthAndCors) {
  HttpResponse r = http(port_, "GET", "/health");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.headers["access-control-allow-origin"], "*");
  HttpResponse o = http(port_, "OPTIONS", "/sessions/s1/job");
  EXPECT_EQ(o.status, 204);
  EXPECT_NE(o.headers["access-control-allow-methods"].find("POST"), std::string::npos);
}

TEST_F(ServiceTest, UploadDescribesSession) {
  const HttpResponse r = http(port_, "POST", "/sessions", sphere_obj(), "text/plain");
  ASSERT_EQ(r.status, 201);
  const json d = r.as_json();
  EXPECT_EQ(d["nv"], 642);
  EXPECT_EQ(d["nf"], 1280);
  EXPECT_NEAR(d["bbox"]["diagonal"].get<double>(), std::sqrt(12.0), 1e-2);
  EXPECT_TRUE(d["validation"]["ok"].get<bool>());
  EXPECT_EQ(d["status"], "idle");
  EXPECT_EQ(d["latest"], 0);
  const HttpResponse g = http(port_, "GET", "/sessions/" + d["id"].get<std::string>());
  EXPECT_EQ(g.status, 200);
  EXPECT_EQ(g.as_json()["nf"], 1280);
}

TEST_F(ServiceTest, UploadErrors) {
  HttpResponse r = http(port_, "POST", "/sessions", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 5\n", "text/plain");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.as_json()["line"], 4);
  r = http(port_, "POST", "/sessions",
           "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nf 1 2 3\nf 2 1 4\nf 1 2 5\n", "text/plain");
  EXPECT_EQ(r.status, 400);
  EXPECT_FALSE(r.as_json()["validation"]["manifold"].get<bool>());
  r = http(port_, "POST", "/sessions", std::string(2 << 20, '#'), "text/plain");
  EXPECT_EQ(r.status, 413);
}

TEST_F(ServiceTest, UnknownSessionsAndDelete) {
  EXPECT_EQ(http(port_, "GET", "/sessions/nope").status, 404);
  EXPECT_EQ(http(port_, "POST", "/sessions/nope/job", R"({"lambda": 0.2})").status, 404);
  EXPECT_EQ(http(port_, "GET", "/sessions/nope/progress").status, 404);
  EXPECT_EQ(http(port_, "GET", "/sessions/nope/result").status, 404);
  const std::string id = upload();
  EXPECT_EQ(http(port_, "DELETE", "/sessions/" + id).status, 204);
  EXPECT_EQ(http(port_, "GET", "/sessions/" + id).status, 404);
  EXPECT_EQ(http(port_, "DELETE", "/sessions/" + id).status, 404);
}

TEST_F(ServiceTest, JobValidation) {
  const std::string id = upload();
  const std::string path = "/sessions/" + id + "/job";
  EXPECT_EQ(http(port_, "POST", path, "{lambda").status, 400);
  EXPECT_EQ(http(port_, "POST", path, "{}").status, 422);
  EXPECT_EQ(http(port_, "POST", path, R"({"lambda": -1})").status, 422);
  EXPECT_EQ(http(port_, "POST", path, R"({"lambda": "x"})").status, 422);
  EXPECT_EQ(http(port_, "POST", path, R"({"lambda": 0.2, "m": 100})").status, 422);
  EXPECT_EQ(http(port_, "POST", path, R"({"lambda": 0.2, "m": 5000})").status, 422);
  EXPECT_EQ(http(port_, "POST", path, R"({"lambda": 0.2, "constraints": {"fixed": [9999]}})").status, 422);
  EXPECT_EQ(http(port_, "POST", path, R"({"lambda": 0.2, "controls": {"lambda_field": [1]}})").status, 422);
  EXPECT_EQ(http(port_, "POST", path, R"({"lambda": 0.2, "stop_tol": 0})").status, 422);
  EXPECT_EQ(http(port_, "GET", "/sessions/" + id + "/progress?since=abc").status, 400);
  EXPECT_EQ(http(port_, "GET", "/sessions/" + id + "/result").status, 409);
  EXPECT_EQ(http(port_, "GET", "/sessions/" + id + "/result?format=png").status, 400);
  // Nothing was queued by the rejected jobs.
  EXPECT_EQ(http(port_, "GET", "/sessions/" + id).as_json()["job_id"], 0);
}

TEST_F(ServiceTest, JobRunsToConvergenceAndServesResults) {
  const std::string id = upload();
  const HttpResponse j = http(port_, "POST", "/sessions/" + id + "/job", R"({"lambda": 0.2})");
  ASSERT_EQ(j.status, 200);
  EXPECT_EQ(j.as_json()["job_id"], 1);
  EXPECT_FALSE(j.as_json()["warm"].get<bool>());
  const json records = wait_idle(id);
  EXPECT_EQ(last_status_, "converged");
  ASSERT_FALSE(records.empty());
  for (std::size_t k = 0; k < records.size(); ++k) {
    EXPECT_EQ(records[k]["iter"], static_cast<long>(k + 1));
    EXPECT_EQ(records[k]["job_iter"], static_cast<long>(k + 1));
    EXPECT_LE(records[k]["energy"].get<double>(), records[k]["energy_before_global"].get<double>() * (1 + 1e-12));
  }

  const HttpResponse obj = http(port_, "GET", "/sessions/" + id + "/result?format=obj");
  ASSERT_EQ(obj.status, 200);
  const TriangleMesh result = load_obj(obj.body);
  EXPECT_EQ(result.faces, shapes::icosphere(3).faces);
  EXPECT_LT(cubeness_score(result), 0.9 * cubeness_score(shapes::icosphere(3)));
  EXPECT_NEAR(cubeness_score(result), records.back()["cubeness"].get<double>(), 1e-9);

  const HttpResponse pos = http(port_, "GET", "/sessions/" + id + "/result?format=positions");
  ASSERT_EQ(pos.status, 200);
  ASSERT_EQ(pos.body.size(), 8u + 12u * 642u);
  EXPECT_EQ(pos.body.substr(0, 4), "CPOS");
  std::uint32_t count = 0;
  std::memcpy(&count, pos.body.data() + 4, 4);
  EXPECT_EQ(count, 642u);
  for (int v = 0; v < 642; v += 97) {
    for (int a = 0; a < 3; ++a) {
      float f = 0;
      std::memcpy(&f, pos.body.data() + 8 + 12 * v + 4 * a, 4);
      EXPECT_EQ(f, static_cast<float>(result.positions(v, a)));
    }
  }
}

TEST_F(ServiceTest, WarmStartFlags) {
  const std::string id = upload();
  const std::string path = "/sessions/" + id + "/job";
  auto submit = [&](const std::string& body) {
    const HttpResponse r = http(port_, "POST", path, body);
    EXPECT_EQ(r.status, 200) << r.body;
    const bool warm = r.as_json()["warm"].get<bool>();
    wait_idle(id);
    return warm;
  };
  EXPECT_FALSE(submit(R"({"lambda": 0.2, "max_iterations": 3})"));
  EXPECT_TRUE(submit(R"({"lambda": 0.4, "max_iterations": 3})"));
  EXPECT_FALSE(submit(R"({"lambda": 0.4, "max_iterations": 3, "restart": true})"));
  EXPECT_FALSE(submit(R"({"lambda": 0.4, "max_iterations": 3, "m": 640})"));
  EXPECT_TRUE(submit(R"({"lambda": 0.3, "max_iterations": 3, "m": 640})"));
  EXPECT_FALSE(submit(R"({"lambda": 0.3, "max_iterations": 3, "m": 640, "constraints": {"fixed": [0]}})"));
  EXPECT_FALSE(submit(R"({"lambda": 0.3, "max_iterations": 3, "m": 640, "constraints": {"fixed": [0]},
                          "controls": {"B": "tetrahedron"}})"));
  EXPECT_EQ(last_status_, "stopped");
}

TEST_F(ServiceTest, CoarseJobReturnsFullResolution) {
  const std::string id = upload();
  ASSERT_EQ(http(port_, "POST", "/sessions/" + id + "/job", R"({"lambda": 0.3, "m": 640})").status, 200);
  wait_idle(id);
  EXPECT_EQ(last_status_, "converged");
  const HttpResponse pos = http(port_, "GET", "/sessions/" + id + "/result?format=positions");
  EXPECT_EQ(pos.body.size(), 8u + 12u * 642u);
}

TEST_F(ServiceTest, NewJobPreemptsRunningJob) {
  const std::string id = upload();
  const std::string path = "/sessions/" + id + "/job";
  ASSERT_EQ(http(port_, "POST", path, R"({"lambda": 0.2, "stop_tol": 1e-12, "max_iterations": 100000})").status, 200);
  // Let the first job produce a few iterations.
  json first;
  for (int k = 0; k < 100; ++k) {
    first = http(port_, "GET", "/sessions/" + id + "/progress?since=2").as_json();
    if (!first["records"].empty()) break;
  }
  ASSERT_FALSE(first["records"].empty());
  ASSERT_EQ(http(port_, "POST", path, R"({"lambda": 0.5})").status, 200);
  const json records = wait_idle(id);
  EXPECT_EQ(last_status_, "converged");
  int job1 = 0, job2 = 0;
  for (const auto& r : records) (r["job_id"] == 1 ? job1 : job2)++;
  EXPECT_LT(job1, 100000);
  EXPECT_GT(job2, 0);
  EXPECT_EQ(records.back()["job_id"], 2);
}

TEST_F(ServiceTest, SessionsAreIsolated) {
  const std::string a = upload();
  const std::string b = upload();
  ASSERT_EQ(http(port_, "POST", "/sessions/" + a + "/job", R"({"lambda": 0.2})").status, 200);
  wait_idle(a);
  EXPECT_EQ(http(port_, "GET", "/sessions/" + b + "/result").status, 409);
  const json db = http(port_, "GET", "/sessions/" + b).as_json();
  EXPECT_EQ(db["status"], "idle");
  EXPECT_EQ(db["latest"], 0);
  EXPECT_EQ(http(port_, "GET", "/sessions/" + b + "/progress").as_json()["records"].size(), 0u);
}

TEST_F(ServiceTest, IdleProgressReturnsImmediately) {
  const std::string id = upload();
  const auto t0 = std::chrono::steady_clock::now();
  const json p = http(port_, "GET", "/sessions/" + id + "/progress?since=0").as_json();
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
  EXPECT_EQ(p["status"], "idle");
}

}  // namespace
}  // namespace cubify
