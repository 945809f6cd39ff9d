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

#include "cubify/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "cubify/error.hpp"

namespace cubify {

AxisPins resolve_constraints(const Constraints& c, const Positions& rest) {
  const int n = static_cast<int>(rest.rows());
  std::map<int, double> pins[3];
  auto check_index = [n](int v, const char* kind) {
    if (v < 0 || v >= n) {
      throw InvalidArgument(std::string(kind) + " constraint references vertex " +
                            std::to_string(v) + " of " + std::to_string(n));
    }
  };
  auto pin = [&](int v, int axis, double value, const char* kind) {
    check_index(v, kind);
    if (axis < 0 || axis > 2) throw InvalidArgument("plane constraint axis must be 0, 1 or 2");
    if (!std::isfinite(value)) throw InvalidArgument("constraint value is not finite");
    auto [it, inserted] = pins[axis].emplace(v, value);
    if (!inserted && it->second != value) {
      throw InvalidArgument("conflicting constraints on vertex " + std::to_string(v) +
                            " axis " + std::to_string(axis));
    }
  };
  for (int v : c.fixed) {
    check_index(v, "fixed");
    for (int a = 0; a < 3; ++a) pin(v, a, rest(v, a), "fixed");
  }
  for (const auto& p : c.points) {
    for (int a = 0; a < 3; ++a) pin(p.vertex, a, p.target[a], "point");
  }
  for (const auto& p : c.planes) pin(p.vertex, p.axis, p.value, "plane");

  AxisPins out;
  for (int a = 0; a < 3; ++a) out.axis[a].assign(pins[a].begin(), pins[a].end());
  return out;
}

Constraints parse_constraints_json(const std::string& text) {
  using nlohmann::json;
  Constraints c;
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ParseError(0, "constraints JSON must be an object");
    if (j.contains("fixed")) c.fixed = j["fixed"].get<std::vector<int>>();
    if (j.contains("points")) {
      for (const json& p : j["points"]) {
        auto t = p.at("target").get<std::vector<double>>();
        if (t.size() != 3) throw ParseError(0, "point target must have 3 entries");
        c.points.push_back({p.at("idx").get<int>(), Vec3(t[0], t[1], t[2])});
      }
    }
    if (j.contains("planes")) {
      for (const json& p : j["planes"]) {
        int axis = -1;
        const json& a = p.at("axis");
        if (a.is_string()) {
          std::string s = a.get<std::string>();
          if (s == "x") axis = 0;
          if (s == "y") axis = 1;
          if (s == "z") axis = 2;
        } else {
          axis = a.get<int>();
        }
        if (axis < 0 || axis > 2) throw ParseError(0, "plane axis must be x, y or z");
        c.planes.push_back({p.at("idx").get<int>(), axis, p.at("value").get<double>()});
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("constraints JSON: ") + e.what());
  }
  return c;
}

Constraints load_constraints_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_constraints_json(ss.str());
}

}  // namespace cubify
