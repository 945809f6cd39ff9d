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

#include "cubify/style.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cubify/admm.hpp"
#include "cubify/error.hpp"
#include "cubify/qp.hpp"
#include "cubify/rotation.hpp"

namespace cubify {
namespace {

using nlohmann::json;

bool off_diagonal_zero(const Eigen::MatrixX3d& w) {
  if (w.rows() != 3) return false;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (r != c && w(r, c) != 0.0) return false;
    }
  }
  return true;
}

Mat3 frame_from_quaternion(const json& q) {
  if (!q.is_array() || q.size() != 4) {
    throw InvalidArgument("frame quaternions must be [w, x, y, z]");
  }
  Eigen::Quaterniond quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                          q[3].get<double>());
  if (!(quat.norm() > 0.0)) throw InvalidArgument("zero frame quaternion");
  // The quaternion orients the frame's axes in world space; the operator
  // needs the world-to-frame map.
  return quat.normalized().toRotationMatrix().transpose();
}

Vec3 vec3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw InvalidArgument(std::string(what) + " must have 3 entries");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

int style_rows(const StyleControls& controls) {
  return controls.polyhedron ? static_cast<int>(controls.polyhedron->rows()) : 3;
}

void validate_controls(const StyleControls& c, int n) {
  auto check_lambda = [](double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument(std::string(what) + " must be finite and non-negative");
    }
  };
  check_lambda(c.lambda, "lambda");
  if (!c.lambda_field.empty()) {
    if (static_cast<int>(c.lambda_field.size()) != n) {
      throw InvalidArgument("lambda field has " + std::to_string(c.lambda_field.size()) +
                            " entries for " + std::to_string(n) + " vertices");
    }
    for (double v : c.lambda_field) check_lambda(v, "lambda field entries");
    if (c.gauss_ramp) throw InvalidArgument("lambda field and Gauss ramp are exclusive");
  }
  if (c.gauss_ramp) {
    check_lambda(c.gauss_ramp->low, "Gauss ramp low");
    check_lambda(c.gauss_ramp->high, "Gauss ramp high");
    if (!(c.gauss_ramp->direction.norm() > 0.0) || !c.gauss_ramp->direction.allFinite()) {
      throw InvalidArgument("Gauss ramp direction must be a non-zero vector");
    }
  }
  if (c.axis_lambda) {
    for (int k = 0; k < 3; ++k) check_lambda((*c.axis_lambda)[k], "axis lambda");
  }
  if (!c.frames.empty()) {
    if (c.frames.size() != 1 && static_cast<int>(c.frames.size()) != n) {
      throw InvalidArgument("frames must be given once or per vertex");
    }
    for (const Mat3& f : c.frames) {
      if (!is_rotation(f)) throw InvalidArgument("frames must be rotations");
    }
  }
  if (c.polyhedron) {
    const auto& b = *c.polyhedron;
    if (b.rows() < 1 || b.rows() > kMaxPolyhedronRows) {
      throw InvalidArgument("polyhedral matrix needs 1.." +
                            std::to_string(kMaxPolyhedronRows) + " rows");
    }
    if (!b.allFinite()) throw InvalidArgument("polyhedral matrix has non-finite entries");
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      if (b.row(r).squaredNorm() == 0.0) throw InvalidArgument("polyhedral matrix has a zero row");
    }
    if (c.axis_lambda) {
      throw InvalidArgument("per-axis lambda cannot be combined with a polyhedral matrix");
    }
  }
}

std::vector<StyleOperator> build_style_operator(const StyleControls& c,
                                                const Positions& rest_normals, int n) {
  validate_controls(c, n);
  if (c.gauss_ramp && rest_normals.rows() != n) {
    throw InvalidArgument("Gauss ramp needs one rest normal per vertex");
  }
  const Vec3 axis = c.axis_lambda.value_or(Vec3::Ones());
  const Vec3 ramp_dir = c.gauss_ramp ? c.gauss_ramp->direction.normalized() : Vec3::Zero();

  std::vector<StyleOperator> ops(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double lambda = c.lambda;
    if (!c.lambda_field.empty()) {
      lambda = c.lambda_field[i];
    } else if (c.gauss_ramp) {
      const double t = 0.5 * (1.0 + ramp_dir.dot(rest_normals.row(i).transpose()));
      lambda = c.gauss_ramp->low + (c.gauss_ramp->high - c.gauss_ramp->low) * t;
    }
    const bool has_frame = !c.frames.empty();
    const Mat3 frame = has_frame ? c.frames[c.frames.size() == 1 ? 0 : i] : Mat3::Identity();

    StyleOperator& op = ops[i];
    if (c.polyhedron) {
      op.matrix = lambda * (*c.polyhedron) * frame;
      if (off_diagonal_zero(op.matrix)) {
        op.kind = StyleKind::kDiagonal;
        op.diagonal = op.matrix.diagonal();
      } else {
        op.kind = StyleKind::kGeneral;
      }
      continue;
    }
    op.diagonal = lambda * axis;
    op.matrix = op.diagonal.asDiagonal() * frame;
    if (!has_frame || off_diagonal_zero(op.matrix)) {
      op.kind = StyleKind::kDiagonal;
      op.diagonal = op.matrix.diagonal();
    } else {
      op.kind = StyleKind::kRotatedDiagonal;
      op.frame = frame;
    }
  }
  return ops;
}

Vec3 style_z_step(const StyleOperator& op, const Vec3& v, double rho, double area) {
  switch (op.kind) {
    case StyleKind::kDiagonal: {
      const Vec3 kappa = (op.diagonal.cwiseAbs() * area) / rho;
      return shrinkage(v, kappa);
    }
    case StyleKind::kRotatedDiagonal: {
      const Vec3 kappa = (op.diagonal.cwiseAbs() * area) / rho;
      return op.frame.transpose() * shrinkage(op.frame * v, kappa);
    }
    case StyleKind::kGeneral:
      break;
  }
  return qp_z_step(v, rho, area, op.matrix);
}

double style_penalty(const StyleOperator& op, const Vec3& z, double area) {
  if (op.kind == StyleKind::kDiagonal) return area * op.diagonal.cwiseProduct(z).lpNorm<1>();
  return area * (op.matrix * z).lpNorm<1>();
}

Eigen::MatrixX3d polyhedron_preset(const std::string& name) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  Eigen::MatrixX3d b;
  if (name == "cube") {
    b = Eigen::Matrix3d::Identity();
  } else if (name == "tetrahedron") {
    b.resize(4, 3);
    b << 1, 1, 1,  1, -1, -1,  -1, 1, -1,  -1, -1, 1;
  } else if (name == "dodecahedron") {
    b.resize(6, 3);
    b << 0, 1, phi,  0, 1, -phi,  1, phi, 0,  1, -phi, 0,  phi, 0, 1,  phi, 0, -1;
  } else if (name == "icosahedron") {
    const double ip = 1.0 / phi;
    b.resize(10, 3);
    b << 1, 1, 1,  1, 1, -1,  1, -1, 1,  1, -1, -1,
         0, ip, phi,  0, ip, -phi,
         ip, phi, 0,  ip, -phi, 0,
         phi, 0, ip,  phi, 0, -ip;
  } else {
    throw InvalidArgument("unknown polyhedron preset '" + name + "'");
  }
  b.rowwise().normalize();
  return b;
}

StyleControls parse_controls_json(const std::string& text, const StyleControls& base) {
  StyleControls c = base;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("controls JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(0, "controls JSON must be an object");
  try {
    if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
    if (j.contains("lambda_field")) c.lambda_field = j["lambda_field"].get<std::vector<double>>();
    if (j.contains("axis_lambda")) c.axis_lambda = vec3_from(j["axis_lambda"], "axis_lambda");
    if (j.contains("gauss_ramp")) {
      const json& g = j["gauss_ramp"];
      GaussRamp ramp;
      ramp.direction = vec3_from(g.at("dir"), "gauss_ramp.dir");
      ramp.low = g.at("lo").get<double>();
      ramp.high = g.at("hi").get<double>();
      c.gauss_ramp = ramp;
    }
    if (j.contains("frames")) {
      const json& fr = j["frames"];
      c.frames.clear();
      if (fr.is_object()) {
        // Part labels with one quaternion per label.
        auto labels = fr.at("labels").get<std::vector<int>>();
        std::vector<Mat3> per_label;
        for (const json& q : fr.at("quaternions")) per_label.push_back(frame_from_quaternion(q));
        for (int label : labels) {
          if (label < 0 || label >= static_cast<int>(per_label.size())) {
            throw InvalidArgument("frame label " + std::to_string(label) + " has no quaternion");
          }
          c.frames.push_back(per_label[label]);
        }
      } else if (fr.is_array() && !fr.empty() && fr[0].is_number()) {
        c.frames.push_back(frame_from_quaternion(fr));
      } else {
        for (const json& q : fr) c.frames.push_back(frame_from_quaternion(q));
      }
    }
    if (j.contains("B")) {
      const json& bj = j["B"];
      if (bj.is_string()) {
        c.polyhedron = polyhedron_preset(bj.get<std::string>());
      } else {
        auto flat = bj.get<std::vector<double>>();
        if (flat.empty() || flat.size() % 3 != 0) {
          throw InvalidArgument("B must be a row-major m x 3 matrix");
        }
        Eigen::MatrixX3d b(static_cast<Eigen::Index>(flat.size() / 3), 3);
        for (std::size_t k = 0; k < flat.size(); ++k) b(k / 3, k % 3) = flat[k];
        c.polyhedron = b;
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("controls JSON: ") + e.what());
  }
  return c;
}

StyleControls load_controls_file(const std::string& path, const StyleControls& base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_controls_json(ss.str(), base);
}

}  // namespace cubify
