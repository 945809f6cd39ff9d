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

#include "cubify/qp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cubify/error.hpp"

namespace cubify {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  Eigen::VectorXd x;
  std::vector<int> working;
  int iterations = 0;
  bool converged = false;
};

// Orthonormal basis of the null space of the rows of `a` indexed by `rows`.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                           Eigen::Index n) {
  if (rows.empty()) return Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd at(n, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) at.col(r) = a.row(rows[r]).transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(at);
  const Eigen::Index rank = qr.rank();
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - rank);
}

Outcome active_set(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                   const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                   Eigen::VectorXd x, const QpOptions& opt) {
  const Eigen::Index n = x.size();
  const Eigen::Index p = a.rows();
  Outcome out;
  std::vector<char> in_set(static_cast<std::size_t>(p), 0);
  const double scale = 1.0 + h.cwiseAbs().maxCoeff() + f.cwiseAbs().maxCoeff() +
                       (p ? a.cwiseAbs().maxCoeff() : 0.0);
  const double tol = opt.tolerance * scale;

  for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
    const Eigen::VectorXd g = h * x + f;
    Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
    bool newton = true;
    const Eigen::MatrixXd z = null_space(a, out.working, n);
    if (z.cols() > 0) {
      const Eigen::MatrixXd hr = z.transpose() * h * z;
      const Eigen::VectorXd gr = z.transpose() * g;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hr);
      const Eigen::VectorXd& lam = eig.eigenvalues();
      const Eigen::MatrixXd& vec = eig.eigenvectors();
      const double lam_tol = 1e-12 * std::max(1.0, lam.cwiseAbs().maxCoeff());
      Eigen::VectorXd flat = Eigen::VectorXd::Zero(gr.size());
      Eigen::VectorXd curved = Eigen::VectorXd::Zero(gr.size());
      for (Eigen::Index k = 0; k < lam.size(); ++k) {
        const double c = vec.col(k).dot(gr);
        if (lam[k] <= lam_tol) {
          flat += c * vec.col(k);
        } else {
          curved += (c / lam[k]) * vec.col(k);
        }
      }
      if (flat.norm() > tol) {
        // Descent along a direction of zero curvature: only a constraint
        // can stop it.
        step = -z * flat;
        newton = false;
      } else {
        step = -z * curved;
      }
    }

    if (step.norm() <= tol * (1.0 + x.norm())) {
      if (out.working.empty()) {
        out.converged = true;
        break;
      }
      // Multipliers from g + A_W^T mu = 0.
      Eigen::MatrixXd awt(n, static_cast<Eigen::Index>(out.working.size()));
      for (std::size_t r = 0; r < out.working.size(); ++r) {
        awt.col(r) = a.row(out.working[r]).transpose();
      }
      const Eigen::VectorXd mu = awt.colPivHouseholderQr().solve(-g);
      int leave = -1;
      double most_negative = -std::sqrt(tol);
      for (std::size_t r = 0; r < out.working.size(); ++r) {
        if (mu[r] < most_negative ||
            (leave >= 0 && mu[r] == most_negative && out.working[r] < out.working[leave])) {
          most_negative = mu[r];
          leave = static_cast<int>(r);
        }
      }
      if (leave < 0) {
        out.converged = true;
        break;
      }
      in_set[out.working[leave]] = 0;
      out.working.erase(out.working.begin() + leave);
      continue;
    }

    double alpha = newton ? 1.0 : kInf;
    int block = -1;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (in_set[i]) continue;
      const double slope = a.row(i).dot(step);
      if (slope <= tol * step.norm()) continue;
      const double ratio = std::max(0.0, (b[i] - a.row(i).dot(x)) / slope);
      if (ratio < alpha) {
        alpha = ratio;
        block = static_cast<int>(i);
      }
    }
    if (!std::isfinite(alpha)) throw NumericalError("quadratic program is unbounded below");
    x += alpha * step;
    if (block >= 0) {
      in_set[block] = 1;
      out.working.push_back(block);
    }
  }
  out.x = std::move(x);
  return out;
}

double kkt_residual(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                    const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& x, const std::vector<int>& working) {
  const Eigen::VectorXd g = h * x + f;
  double infeas = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    infeas = std::max(infeas, a.row(i).dot(x) - b[i]);
  }
  if (working.empty()) return std::max(infeas, g.cwiseAbs().maxCoeff());
  Eigen::MatrixXd awt(x.size(), static_cast<Eigen::Index>(working.size()));
  for (std::size_t r = 0; r < working.size(); ++r) awt.col(r) = a.row(working[r]).transpose();
  Eigen::VectorXd mu = awt.colPivHouseholderQr().solve(-g);
  double stationarity = (g + awt * mu).cwiseAbs().maxCoeff();
  double dual = std::max(0.0, -mu.minCoeff());
  double comp = 0.0;
  for (std::size_t r = 0; r < working.size(); ++r) {
    comp = std::max(comp, std::abs(mu[r] * (a.row(working[r]).dot(x) - b[working[r]])));
  }
  return std::max({infeas, stationarity, dual, comp});
}

}  // namespace

QpResult solve_small_qp(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                        const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd* start, const QpOptions& options) {
  const Eigen::Index n = f.size();
  if (h.rows() != n || h.cols() != n || a.cols() != n || a.rows() != b.size()) {
    throw InvalidArgument("quadratic program dimensions are inconsistent");
  }
  Eigen::VectorXd x0;
  if (start) {
    x0 = *start;
  } else if (b.size() == 0 || b.minCoeff() >= 0.0) {
    x0 = Eigen::VectorXd::Zero(n);
  } else {
    // Phase one: minimise s subject to A x - s <= b, s >= 0.
    const Eigen::Index p = a.rows();
    Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(p + 1, n + 1);
    a1.topLeftCorner(p, n) = a;
    a1.col(n).head(p).setConstant(-1.0);
    a1(p, n) = -1.0;
    Eigen::VectorXd b1(p + 1);
    b1 << b, 0.0;
    Eigen::VectorXd f1 = Eigen::VectorXd::Zero(n + 1);
    f1[n] = 1.0;
    Eigen::VectorXd s0 = Eigen::VectorXd::Zero(n + 1);
    s0[n] = -b.minCoeff();
    Outcome phase = active_set(Eigen::MatrixXd::Zero(n + 1, n + 1), f1, a1, b1, s0, options);
    if (phase.x[n] > 1e-9 * (1.0 + b.cwiseAbs().maxCoeff())) {
      throw NumericalError("quadratic program is infeasible");
    }
    x0 = phase.x.head(n);
  }

  Outcome out = active_set(h, f, a, b, std::move(x0), options);
  QpResult result;
  result.kkt_residual = kkt_residual(h, f, a, b, out.x, out.working);
  result.x = std::move(out.x);
  result.iterations = out.iterations;
  result.converged = out.converged;
  return result;
}

Vec3 qp_z_step(const Vec3& v, double rho, double weight, const Eigen::MatrixX3d& bmat,
               QpResult* diagnostics) {
  if (weight == 0.0) {
    if (diagnostics) *diagnostics = QpResult{};
    return v;
  }
  const Eigen::Index m = bmat.rows();
  const Eigen::Index n = 3 + m;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  h.topLeftCorner(3, 3).diagonal().setConstant(rho);
  Eigen::VectorXd f(n);
  f.head(3) = -rho * v;
  f.tail(m).setConstant(weight);
  Eigen::MatrixXd a(2 * m, n);
  a.topLeftCorner(m, 3) = bmat;
  a.bottomLeftCorner(m, 3) = -bmat;
  a.topRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  a.bottomRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * m);

  Eigen::VectorXd start(n);
  start.head(3) = v;
  start.tail(m) = (bmat * v).cwiseAbs();
  QpResult r = solve_small_qp(h, f, a, b, &start);
  Vec3 z = r.x.head(3);
  if (diagnostics) *diagnostics = std::move(r);
  return z;
}

}  // namespace cubify
