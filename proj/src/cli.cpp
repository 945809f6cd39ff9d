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

#include "cubify/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cubify/constraints.hpp"
#include "cubify/error.hpp"
#include "cubify/geometry.hpp"
#include "cubify/obj.hpp"
#include "cubify/progressive.hpp"
#include "cubify/rotation.hpp"
#include "cubify/style.hpp"
#include "cubify/stylizer.hpp"
#include "json.hpp"

namespace cubify {
namespace {

using json = nlohmann::json;

struct CliOptions {
  std::string input;
  std::string output;
  double lambda = 0.2;
  int coarse_faces = 0;
  int min_faces = 500;
  int max_iters = 1000;
  double stop_tol = 3e-3;
  double eps_abs = 1e-5;
  std::string rotate;
  std::string controls;
  std::string constraints;
  int threads = 1;
  std::uint64_t seed = 0;
  bool bbox_stop = false;
  bool no_cache = false;
};

// "z 45", "0 0 1 45" or "x,90".
Mat3 parse_rotation(const std::string& text) {
  std::string s = text;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  Vec3 axis;
  double degrees = 0.0;
  try {
    if (tokens.size() == 2 && tokens[0].size() == 1 && std::string("xyzXYZ").find(tokens[0]) != std::string::npos) {
      axis = Vec3::Unit(std::tolower(tokens[0][0]) - 'x');
      degrees = std::stod(tokens[1]);
    } else if (tokens.size() == 4) {
      axis = Vec3(std::stod(tokens[0]), std::stod(tokens[1]), std::stod(tokens[2]));
      degrees = std::stod(tokens[3]);
    } else {
      throw InvalidArgument("");
    }
  } catch (const std::exception&) {
    throw InvalidArgument("--rotate expects \"axis angle\", e.g. \"z 45\" or \"0 0 1 45\"");
  }
  if (!(axis.norm() > 0.0) || !std::isfinite(degrees)) throw InvalidArgument("--rotate needs a nonzero axis");
  return axis_angle_rotation(axis, degrees);
}

std::string report_path(const std::string& output) {
  std::filesystem::path p(output);
  if (p.extension() == ".obj") p.replace_extension();
  return p.string() + ".report.json";
}

Constraints rotate_constraints(const Constraints& c, const Mat3& q) {
  if (!c.planes.empty()) throw InvalidArgument("plane constraints cannot be combined with --rotate");
  Constraints out = c;
  for (PointConstraint& p : out.points) p.target = q * p.target;
  return out;
}

int run(const CliOptions& o, std::ostream& out, std::ostream& err) {
  if (!(o.lambda >= 0.0) || !std::isfinite(o.lambda)) {
    err << "error: --lambda must be a finite value >= 0\n";
    return kExitInputError;
  }
  TriangleMesh mesh = load_obj_file(o.input);
  const double cubeness_before = cubeness_score(mesh);

  StyleControls controls;
  controls.lambda = o.lambda;
  if (!o.controls.empty()) controls = load_controls_file(o.controls, controls);
  Constraints constraints;
  if (!o.constraints.empty()) constraints = load_constraints_file(o.constraints);

  StylizeParams params;
  params.max_iterations = o.max_iters;
  params.stop_tolerance = o.stop_tol;
  params.admm.eps_abs = o.eps_abs;
  params.threads = o.threads;
  if (o.bbox_stop) params.stop_measure = StopMeasure::kBoundingBox;

  TriangleMesh solve_mesh = mesh;
  Mat3 orientation = Mat3::Identity();
  const bool rotated = !o.rotate.empty();
  if (rotated) {
    orientation = parse_rotation(o.rotate);
    solve_mesh = apply_orientation(mesh, orientation);
    constraints = rotate_constraints(constraints, orientation);
  }

  StylizeResult result;
  std::string cache_status = "none";
  int coarse_faces = mesh.num_faces();
  if (o.coarse_faces > 0) {
    FastStylizeOptions fast;
    fast.target_faces = o.coarse_faces;
    fast.decimate.min_faces = o.min_faces;
    CollapseLog log;
    const std::string cache = pmcache_path(o.input, o.coarse_faces);
    const auto t0 = std::chrono::steady_clock::now();
    if (!o.no_cache && std::filesystem::exists(cache)) {
      try {
        log = load_log(cache);
      } catch (const Error& e) {
        err << "warning: ignoring unreadable cache " << cache << ": " << e.what() << "\n";
      }
    }
    const double load_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::uint64_t cached = log.fingerprint;
    fast.cache = &log;
    result = fast_stylize(solve_mesh, params, constraints, controls, fast);
    if (cached != 0 && cached == log.fingerprint) {
      cache_status = "hit";
      result.preprocess_seconds = load_seconds;
    } else {
      cache_status = "miss";
      if (!o.no_cache) save_log(log, cache);
    }
    coarse_faces = log.coarse.num_faces();
  } else {
    result = stylize(solve_mesh, params, constraints, controls);
    result.preprocess_seconds = 0.0;
  }
  if (rotated) result.positions = undo_orientation(result.positions, orientation);

  save_obj_file(o.output, mesh, &result.positions);
  const IterationRecord last = result.trace.empty() ? IterationRecord{} : result.trace.back();
  json report = {
      {"input", o.input},
      {"output", o.output},
      {"vertices", mesh.num_vertices()},
      {"faces", mesh.num_faces()},
      {"lambda", o.lambda},
      {"m", o.coarse_faces > 0 ? json(o.coarse_faces) : json("full")},
      {"coarse_faces", coarse_faces},
      {"iterations", result.iterations},
      {"converged", result.converged},
      {"preprocess_seconds", result.preprocess_seconds},
      {"online_seconds", result.online_seconds},
      {"rel_displacement", result.rel_displacement},
      {"energy", last.energy},
      {"cubeness_before", cubeness_before},
      {"cubeness_after", cubeness_score(result.positions, mesh.faces)},
      {"stop_tolerance", o.stop_tol},
      {"stop_measure", o.bbox_stop ? "bbox" : "from_rest"},
      {"threads", o.threads},
      {"seed", o.seed},
      {"cache", cache_status},
  };
  std::ofstream rf(report_path(o.output));
  if (!rf) throw Error("cannot write " + report_path(o.output));
  rf << report.dump(2) << "\n";

  out << o.output << ": " << result.iterations << " iterations, "
      << (result.converged ? "converged" : "iteration cap reached") << ", cubeness "
      << cubeness_before << " -> " << report["cubeness_after"].get<double>() << "\n";
  return result.converged ? kExitConverged : kExitIterationCap;
}

}  // namespace

std::string pmcache_path(const std::string& input, int faces) {
  return input + "." + std::to_string(faces) + ".pmcache";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cubic stylization of triangle meshes", "cubify"};
  CliOptions o;
  app.add_option("input", o.input, "Input OBJ")->required();
  app.add_option("-o,--output", o.output, "Output OBJ (default <input>.cubified.obj)");
  app.add_option("--lambda", o.lambda, "Cubeness weight")->capture_default_str();
  app.add_option("--coarse-faces", o.coarse_faces, "Solve on a decimated mesh with this many faces");
  app.add_option("--min-faces", o.min_faces, "Smallest accepted --coarse-faces")->capture_default_str();
  app.add_option("--max-iters", o.max_iters, "Outer iteration cap")->capture_default_str();
  app.add_option("--stop-tol", o.stop_tol, "Relative displacement stop tolerance")->capture_default_str();
  app.add_flag("--bbox-stop", o.bbox_stop, "Normalise displacements by the bounding-box diagonal");
  app.add_option("--eps-abs", o.eps_abs, "ADMM absolute tolerance")->capture_default_str();
  app.add_option("--rotate", o.rotate, "Pre-rotation \"axis angle\" in degrees");
  app.add_option("--controls", o.controls, "Style controls JSON");
  app.add_option("--constraints", o.constraints, "Constraints JSON");
  app.add_option("--threads", o.threads, "Local-step threads")->capture_default_str()->check(CLI::Range(1, 256));
  app.add_option("--seed", o.seed, "Seed recorded in the report")->capture_default_str();
  app.add_flag("--no-cache", o.no_cache, "Neither read nor write the decimation cache");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitConverged;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  if (o.output.empty()) {
    std::filesystem::path p(o.input);
    p.replace_extension();
    o.output = p.string() + ".cubified.obj";
  }
  try {
    return run(o, out, err);
  } catch (const ParseError& e) {
    err << "error: " << o.input << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitInputError;
}

}  // namespace cubify
