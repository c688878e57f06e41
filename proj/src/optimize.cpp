// Copyright 2026 snapsynth developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "snapsynth/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace snapsynth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Counts evaluations and maps non-finite values to +inf so the search
// backs away from them instead of propagating NaN.
class CountedObjective {
 public:
  CountedObjective(const Objective& f, int max_evals)
      : f_(f), max_evals_(max_evals) {}

  double operator()(const Eigen::VectorXd& x) {
    ++evals_;
    const double v = f_(x);
    return std::isfinite(v) ? v : kInf;
  }

  int evals() const { return evals_; }
  bool exhausted() const { return evals_ >= max_evals_; }

 private:
  const Objective& f_;
  int max_evals_;
  int evals_ = 0;
};

}  // namespace

void OptimizerConfig::validate() const {
  if (max_evals < 1) throw std::invalid_argument("max_evals must be >= 1");
  if (!(xtol > 0) || !(ftol > 0) || !(fd_step > 0)) {
    throw std::invalid_argument("xtol, ftol and fd_step must be positive");
  }
}

OptimResult minimize_local(const Objective& objective, const Eigen::VectorXd& x0,
                           const OptimizerConfig& config) {
  config.validate();
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw std::invalid_argument("empty parameter vector");

  CountedObjective f(objective, config.max_evals);
  const double f0 = f(x0);
  if (!std::isfinite(f0)) {
    throw std::invalid_argument("objective is not finite at the start point");
  }

  // Simplex: x0 plus one vertex per coordinate, displaced 5% (absolute
  // step for zero coordinates).
  std::vector<Eigen::VectorXd> verts(n + 1, x0);
  std::vector<double> fv(n + 1, f0);
  for (int i = 0; i < n; ++i) {
    double& c = verts[i + 1](i);
    c = (c != 0.0) ? 1.05 * c : 0.00025;
    fv[i + 1] = f(verts[i + 1]);
  }

  const double refl = 1.0, expa = 2.0, contr = 0.5, shrink = 0.5;
  std::vector<int> order(n + 1);
  std::iota(order.begin(), order.end(), 0);

  bool converged = false;
  while (!f.exhausted()) {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = order[0], worst = order[n], second = order[n - 1];

    double diam = 0.0;
    for (int i = 1; i <= n; ++i) {
      diam = std::max(diam, (verts[order[i]] - verts[best]).cwiseAbs().maxCoeff());
    }
    if (diam <= config.xtol && std::abs(fv[worst] - fv[best]) <= config.ftol) {
      converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += verts[order[i]];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + refl * (centroid - verts[worst]);
    const double fr = f(xr);

    if (fr < fv[best]) {
      const Eigen::VectorXd xe = centroid + expa * (xr - centroid);
      const double fe = f(xe);
      if (fe < fr) {
        verts[worst] = xe;
        fv[worst] = fe;
      } else {
        verts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      verts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    // contraction (outside if the reflection helped, inside otherwise)
    const Eigen::VectorXd xc = (fr < fv[worst])
                                   ? centroid + contr * (xr - centroid)
                                   : centroid + contr * (verts[worst] - centroid);
    const double fc = f(xc);
    if (fc < std::min(fr, fv[worst])) {
      verts[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (int i = 1; i <= n; ++i) {
      const int vi = order[i];
      verts[vi] = verts[best] + shrink * (verts[vi] - verts[best]);
      fv[vi] = f(verts[vi]);
    }
  }

  const int ibest = static_cast<int>(
      std::min_element(fv.begin(), fv.end()) - fv.begin());
  return OptimResult{verts[ibest], fv[ibest], f.evals(), converged};
}

OptimResult minimize_refine(const Objective& objective, const Eigen::VectorXd& x0,
                            const OptimizerConfig& config) {
  config.validate();
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw std::invalid_argument("empty parameter vector");

  CountedObjective f(objective, config.max_evals);
  Eigen::VectorXd x = x0;
  double fx = f(x);
  if (!std::isfinite(fx)) {
    throw std::invalid_argument("objective is not finite at the start point");
  }

  const double h = config.fd_step;
  // gradients below this are indistinguishable from finite-difference noise
  const double gtol = std::max(config.ftol, 10.0 * h * h);

  auto gradient = [&](const Eigen::VectorXd& at) {
    Eigen::VectorXd g(n), p = at;
    for (int i = 0; i < n; ++i) {
      const double orig = p(i);
      p(i) = orig + h;
      const double fp = f(p);
      p(i) = orig - h;
      const double fm = f(p);
      p(i) = orig;
      g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  Eigen::MatrixXd binv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = gradient(x);
  bool converged = g.cwiseAbs().maxCoeff() <= gtol;
  int small_improvements = 0;

  while (!converged && !f.exhausted()) {
    Eigen::VectorXd dir = -(binv * g);
    if (dir.dot(g) >= 0.0) {  // curvature estimate went bad; reset
      binv.setIdentity();
      dir = -g;
    }

    // backtracking Armijo line search
    const double slope = dir.dot(g);
    double t = 1.0;
    double fnew = kInf;
    Eigen::VectorXd xnew;
    bool accepted = false;
    for (int ls = 0; ls < 50 && !f.exhausted(); ++ls) {
      xnew = x + t * dir;
      fnew = f(xnew);
      if (fnew <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted || fnew > fx) break;  // no further progress

    const Eigen::VectorXd s = xnew - x;
    const Eigen::VectorXd gnew = gradient(xnew);
    const Eigen::VectorXd y = gnew - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      // Sherman-Morrison form of the inverse BFGS update
      const Eigen::VectorXd binv_y = binv * y;
      const double ybinvy = y.dot(binv_y);
      binv += ((sy + ybinvy) / (sy * sy)) * (s * s.transpose()) -
              (binv_y * s.transpose() + s * binv_y.transpose()) / sy;
    }

    const double df = fx - fnew;
    const double dx = s.cwiseAbs().maxCoeff();
    x = xnew;
    fx = fnew;
    g = gnew;

    if (g.cwiseAbs().maxCoeff() <= gtol) {
      converged = true;
      break;
    }
    small_improvements = (df <= config.ftol * (1.0 + std::abs(fx))) ? small_improvements + 1 : 0;
    if (small_improvements >= 2 || dx <= config.xtol) {
      converged = true;
      break;
    }
  }

  return OptimResult{x, fx, f.evals(), converged};
}

OptimResult multi_start(const Objective& objective,
                        const std::vector<Eigen::VectorXd>& seeds,
                        const OptimizerConfig& config) {
  if (seeds.empty()) throw std::invalid_argument("multi_start needs at least one seed");

  OptimResult best;
  bool have_best = false;
  std::ostringstream failures;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    try {
      OptimResult r = minimize_local(objective, seeds[i], config);
      if (!have_best || r.fval < best.fval) {
        best = std::move(r);
        have_best = true;
      }
    } catch (const std::exception& e) {
      failures << "seed " << i << ": " << e.what() << "; ";
    }
  }
  if (!have_best) {
    throw std::runtime_error("multi_start: every start failed: " + failures.str());
  }
  return best;
}

}  // namespace snapsynth
