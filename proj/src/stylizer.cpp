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

#include "cubify/stylizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "cubify/error.hpp"
#include "cubify/parallel.hpp"
#include "cubify/rotation.hpp"
#include "cubify/validate.hpp"

namespace cubify {
namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_params(const StylizeParams& p) {
  const AdmmSettings& a = p.admm;
  if (!(p.stop_tolerance > 0.0)) throw InvalidArgument("stop tolerance must be positive");
  if (p.max_iterations < 1) throw InvalidArgument("max iterations must be at least 1");
  if (!(a.rho0 > 0.0)) throw InvalidArgument("initial penalty must be positive");
  if (!(a.eps_abs > 0.0) || !(a.eps_rel > 0.0)) {
    throw InvalidArgument("ADMM tolerances must be positive");
  }
  if (!(a.mu > 1.0) || !(a.tau_incr > 1.0) || !(a.tau_decr > 1.0)) {
    throw InvalidArgument("penalty update needs mu > 1 and tau > 1");
  }
  if (a.max_iterations < 1) throw InvalidArgument("inner iteration cap must be at least 1");
}

}  // namespace

AdmmState AdmmState::cold(int vertex_count, double rho0) {
  AdmmState s;
  VertexAdmm v;
  v.rho = rho0;
  s.vertices.assign(static_cast<std::size_t>(vertex_count), v);
  return s;
}

SolverContext::SolverContext(const TriangleMesh& mesh, const Constraints& constraints,
                             const StyleControls& controls)
    : mesh_(mesh) {
  require_valid(mesh);
  const int n = mesh.num_vertices();
  const double total_area = face_areas(mesh.positions, mesh.faces).sum();
  if (!(total_area > 0.0)) throw MeshError("mesh has zero surface area");
  scale_ = std::sqrt(total_area);
  bbox_diagonal_ = cubify::bbox_diagonal(mesh.positions);
  rest_ = to_internal(mesh.positions);

  const TriangleMesh internal = make_mesh(rest_, mesh.faces);
  neighborhoods_ = build_neighborhoods(internal);
  areas_ = vertex_areas(internal);
  normals_ = vertex_normals(internal, &normal_fallbacks_);

  weighted_rest_edges_.reserve(neighborhoods_.edges.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(neighborhoods_.edges.size() * 4);
  for (const RimEdge& e : neighborhoods_.edges) {
    const Vec3 d = (rest_.row(e.k) - rest_.row(e.j)).transpose();
    weighted_rest_edges_.push_back(e.weight * d);
    triplets.emplace_back(e.j, e.j, e.weight);
    triplets.emplace_back(e.k, e.k, e.weight);
    triplets.emplace_back(e.j, e.k, -e.weight);
    triplets.emplace_back(e.k, e.j, -e.weight);
  }
  laplacian_.resize(n, n);
  laplacian_.setFromTriplets(triplets.begin(), triplets.end());

  // Pins: user constraints first, then one gauge pin per unconstrained
  // (component, axis).
  const AxisPins user = resolve_constraints(constraints, mesh.positions);
  int num_components = 0;
  const std::vector<int> component = vertex_components(mesh, &num_components);
  std::vector<Vec3> centroid(static_cast<std::size_t>(num_components), Vec3::Zero());
  std::vector<int> members(static_cast<std::size_t>(num_components), 0);
  for (int v = 0; v < n; ++v) {
    centroid[component[v]] += rest_.row(v).transpose();
    ++members[component[v]];
  }
  std::vector<int> nearest(static_cast<std::size_t>(num_components), -1);
  std::vector<double> best(static_cast<std::size_t>(num_components),
                           std::numeric_limits<double>::infinity());
  for (int c = 0; c < num_components; ++c) centroid[c] /= members[c];
  // Near-ties go to the lowest index so that symmetric shapes pick the same
  // vertex whatever rounding the centroid carries.
  const double tie = 1e-9 * std::pow(cubify::bbox_diagonal(rest_), 2);
  for (int v = 0; v < n; ++v) {
    const int c = component[v];
    const double d = (rest_.row(v).transpose() - centroid[c]).squaredNorm();
    if (d < best[c] - tie) {
      best[c] = d;
      nearest[c] = v;
    }
  }

  std::vector<std::vector<int>> pinned_sets(3);
  for (int a = 0; a < 3; ++a) {
    pinned_value_[a].assign(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
    std::vector<char> covered(static_cast<std::size_t>(num_components), 0);
    for (const auto& [v, value] : user.axis[a]) {
      pinned_value_[a][v] = value / scale_;
      model_pins_[a].emplace_back(v, value);
      covered[component[v]] = 1;
    }
    for (int c = 0; c < num_components; ++c) {
      if (covered[c]) continue;
      const int v = nearest[c];
      pinned_value_[a][v] = rest_(v, a);
      model_pins_[a].emplace_back(v, mesh.positions(v, a));
      auto_pinned_.push_back(v);
    }
    for (int v = 0; v < n; ++v) {
      if (!std::isnan(pinned_value_[a][v])) pinned_sets[a].push_back(v);
    }
  }
  std::sort(auto_pinned_.begin(), auto_pinned_.end());
  auto_pinned_.erase(std::unique(auto_pinned_.begin(), auto_pinned_.end()), auto_pinned_.end());

  // Axes with identical pinned sets share one factorisation.
  for (int a = 0; a < 3; ++a) {
    bool shared = false;
    for (AxisSystem& s : systems_) {
      if (s.pinned_vertices == pinned_sets[a]) {
        s.axes.push_back(a);
        shared = true;
        break;
      }
    }
    if (shared) continue;
    AxisSystem s;
    s.axes = {a};
    s.pinned_vertices = pinned_sets[a];
    s.free_index.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> pinned_index(static_cast<std::size_t>(n), -1);
    for (std::size_t k = 0; k < s.pinned_vertices.size(); ++k) {
      pinned_index[s.pinned_vertices[k]] = static_cast<int>(k);
    }
    for (int v = 0; v < n; ++v) {
      if (pinned_index[v] < 0) {
        s.free_index[v] = static_cast<int>(s.free_vertices.size());
        s.free_vertices.push_back(v);
      }
    }
    const int nf = static_cast<int>(s.free_vertices.size());
    const int np = static_cast<int>(s.pinned_vertices.size());
    std::vector<Eigen::Triplet<double>> ff, fp;
    for (int col = 0; col < laplacian_.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(laplacian_, col); it; ++it) {
        const int r = s.free_index[it.row()];
        if (r < 0) continue;
        if (s.free_index[col] >= 0) {
          ff.emplace_back(r, s.free_index[col], it.value());
        } else {
          fp.emplace_back(r, pinned_index[col], it.value());
        }
      }
    }
    Eigen::SparseMatrix<double> lff(nf, nf);
    lff.setFromTriplets(ff.begin(), ff.end());
    s.coupling.resize(nf, np);
    s.coupling.setFromTriplets(fp.begin(), fp.end());
    s.solver = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    if (nf > 0) {
      s.solver->compute(lff);
      if (s.solver->info() != Eigen::Success) {
        throw NumericalError("global system factorisation failed");
      }
    }
    systems_.push_back(std::move(s));
  }

  set_controls(controls);
}

void SolverContext::set_controls(const StyleControls& controls) {
  style_ = build_style_operator(controls, normals_, num_vertices());
  controls_ = controls;
}

int SolverContext::factorizations() const { return static_cast<int>(systems_.size()); }

void SolverContext::internal_local_step(AdmmState& state, const Positions& x,
                                        const AdmmSettings& settings, int threads,
                                        IterationRecord* stats) const {
  const int n = num_vertices();
  std::vector<LocalFitInfo> info(static_cast<std::size_t>(n));
  parallel_for(n, threads, [&](int i) {
    Mat3 cov = Mat3::Zero();
    for (int e = neighborhoods_.offsets[i]; e < neighborhoods_.offsets[i + 1]; ++e) {
      const RimEdge& edge = neighborhoods_.edges[e];
      cov += weighted_rest_edges_[e] * (x.row(edge.k) - x.row(edge.j));
    }
    info[i] = fit_rotation_l1(cov, normals_.row(i).transpose(), areas_[i], style_[i],
                              state.vertices[i], settings);
  });
  if (stats) {
    for (const LocalFitInfo& f : info) {
      stats->local_iterations += f.iterations;
      stats->local_unconverged += f.converged ? 0 : 1;
    }
  }
}

void SolverContext::local_step(AdmmState& state, const Positions& positions,
                               const AdmmSettings& settings, int threads,
                               IterationRecord* stats) const {
  if (state.size() != num_vertices()) {
    throw InvalidArgument("ADMM state size does not match the mesh");
  }
  if (positions.rows() != num_vertices()) {
    throw InvalidArgument("positions do not match the mesh");
  }
  internal_local_step(state, to_internal(positions), settings, threads, stats);
}

Positions SolverContext::internal_global_step(const std::vector<Mat3>& rotations) const {
  const int n = num_vertices();
  Eigen::MatrixX3d rhs = Eigen::MatrixX3d::Zero(n, 3);
  for (int i = 0; i < n; ++i) {
    const Mat3& r = rotations[i];
    for (int e = neighborhoods_.offsets[i]; e < neighborhoods_.offsets[i + 1]; ++e) {
      const RimEdge& edge = neighborhoods_.edges[e];
      const Eigen::RowVector3d t = (r * weighted_rest_edges_[e]).transpose();
      rhs.row(edge.k) += t;
      rhs.row(edge.j) -= t;
    }
  }

  Positions x(n, 3);
  for (const AxisSystem& s : systems_) {
    const Eigen::Index nf = static_cast<Eigen::Index>(s.free_vertices.size());
    const Eigen::Index np = static_cast<Eigen::Index>(s.pinned_vertices.size());
    const Eigen::Index na = static_cast<Eigen::Index>(s.axes.size());
    Eigen::MatrixXd b(nf, na);
    Eigen::MatrixXd pinned(np, na);
    for (Eigen::Index c = 0; c < na; ++c) {
      const int a = s.axes[c];
      for (Eigen::Index k = 0; k < nf; ++k) b(k, c) = rhs(s.free_vertices[k], a);
      for (Eigen::Index k = 0; k < np; ++k) pinned(k, c) = pinned_value_[a][s.pinned_vertices[k]];
    }
    if (nf > 0) {
      if (np > 0) b -= s.coupling * pinned;
      const Eigen::MatrixXd sol = s.solver->solve(b);
      for (Eigen::Index c = 0; c < na; ++c) {
        for (Eigen::Index k = 0; k < nf; ++k) x(s.free_vertices[k], s.axes[c]) = sol(k, c);
      }
    }
    for (Eigen::Index c = 0; c < na; ++c) {
      for (Eigen::Index k = 0; k < np; ++k) x(s.pinned_vertices[k], s.axes[c]) = pinned(k, c);
    }
  }
  return x;
}

Positions SolverContext::global_step(const std::vector<Mat3>& rotations) const {
  if (static_cast<int>(rotations.size()) != num_vertices()) {
    throw InvalidArgument("need one rotation per vertex");
  }
  return to_model(internal_global_step(rotations));
}

Positions SolverContext::to_model(const Positions& x) const {
  Positions out = x * scale_;
  // Pinned coordinates are reported exactly rather than through the scaling round trip.
  for (int a = 0; a < 3; ++a) {
    for (const auto& [v, value] : model_pins_[a]) out(v, a) = value;
  }
  return out;
}

Positions SolverContext::global_step(const AdmmState& state) const {
  std::vector<Mat3> r;
  r.reserve(state.vertices.size());
  for (const VertexAdmm& v : state.vertices) r.push_back(v.rotation);
  return global_step(r);
}

double SolverContext::internal_arap(const Positions& x, const std::vector<Mat3>& rotations) const {
  double energy = 0.0;
  for (int i = 0; i < num_vertices(); ++i) {
    const Mat3& r = rotations[i];
    for (int e = neighborhoods_.offsets[i]; e < neighborhoods_.offsets[i + 1]; ++e) {
      const RimEdge& edge = neighborhoods_.edges[e];
      const Vec3 d = (rest_.row(edge.k) - rest_.row(edge.j)).transpose();
      const Vec3 dt = (x.row(edge.k) - x.row(edge.j)).transpose();
      energy += 0.5 * edge.weight * (r * d - dt).squaredNorm();
    }
  }
  return energy;
}

double SolverContext::arap_energy(const Positions& positions,
                                  const std::vector<Mat3>& rotations) const {
  if (static_cast<int>(rotations.size()) != num_vertices() || positions.rows() != num_vertices()) {
    throw InvalidArgument("energy inputs do not match the mesh");
  }
  return internal_arap(to_internal(positions), rotations) * (scale_ * scale_);
}

double SolverContext::internal_cubeness(const std::vector<Mat3>& rotations) const {
  double energy = 0.0;
  for (int i = 0; i < num_vertices(); ++i) {
    energy += style_penalty(style_[i], rotations[i] * normals_.row(i).transpose(), areas_[i]);
  }
  return energy;
}

double SolverContext::cubeness_energy(const std::vector<Mat3>& rotations) const {
  if (static_cast<int>(rotations.size()) != num_vertices()) {
    throw InvalidArgument("need one rotation per vertex");
  }
  return internal_cubeness(rotations) * (scale_ * scale_);
}

StylizeResult stylize(const SolverContext& ctx, const StylizeParams& params,
                      const AdmmState* warm, const IterationObserver& observer) {
  check_params(params);
  const auto start = Clock::now();
  const int n = ctx.num_vertices();
  StylizeResult result;
  if (warm) {
    if (warm->size() != n) throw InvalidArgument("warm-start state does not match the mesh");
    result.state = *warm;
  } else {
    result.state = AdmmState::cold(n, params.admm.rho0);
  }
  AdmmState& state = result.state;

  const double s = ctx.scale_;
  const double s2 = s * s;
  // Bounding-box diagonal in internal units.
  const double diag = ctx.bbox_diagonal_ / s;

  Positions x = ctx.rest_;
  std::vector<Mat3> rotations(static_cast<std::size_t>(n));
  for (int it = 1; it <= params.max_iterations; ++it) {
    IterationRecord rec;
    rec.iteration = it;
    ctx.internal_local_step(state, x, params.admm, params.threads, &rec);
    for (int i = 0; i < n; ++i) rotations[i] = state.vertices[i].rotation;

    const double cube = ctx.internal_cubeness(rotations);
    const double before = ctx.internal_arap(x, rotations);
    Positions next = ctx.internal_global_step(rotations);
    double disp = 0.0;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      disp = std::max(disp, (next.row(i) - x.row(i)).cwiseAbs().maxCoeff());
      total = std::max(total, (next.row(i) - ctx.rest_.row(i)).cwiseAbs().maxCoeff());
    }
    x = std::move(next);

    const double norm = params.stop_measure == StopMeasure::kBoundingBox
                            ? diag
                            : std::max(total, kStopFloor * diag);
    rec.rel_displacement = disp / norm;
    rec.arap_energy = ctx.internal_arap(x, rotations) * s2;
    rec.energy_before_global = (before + cube) * s2;
    rec.energy = rec.arap_energy + cube * s2;
    rec.cubeness = cubeness_score(x, ctx.mesh_.faces);
    rec.millis = millis_since(start);
    result.trace.push_back(rec);
    result.iterations = it;
    result.rel_displacement = rec.rel_displacement;
    result.converged = rec.rel_displacement < params.stop_tolerance;

    if (observer && !observer(rec, ctx.to_model(x))) {
      result.stopped = !result.converged;
      break;
    }
    if (result.converged) break;
  }
  result.positions = ctx.to_model(x);
  result.online_seconds = millis_since(start) / 1000.0;
  return result;
}

StylizeResult stylize(const TriangleMesh& mesh, const StylizeParams& params,
                      const Constraints& constraints, const StyleControls& controls,
                      const AdmmState* warm, const IterationObserver& observer) {
  SolverContext ctx(mesh, constraints, controls);
  return stylize(ctx, params, warm, observer);
}

TriangleMesh apply_orientation(const TriangleMesh& mesh, const Mat3& rotation) {
  if (!is_rotation(rotation)) throw InvalidArgument("orientation must be a rotation matrix");
  TriangleMesh out = mesh;
  out.positions = mesh.positions * rotation.transpose();
  return out;
}

Positions undo_orientation(const Positions& positions, const Mat3& rotation) {
  if (!is_rotation(rotation)) throw InvalidArgument("orientation must be a rotation matrix");
  return positions * rotation;
}

}  // namespace cubify
