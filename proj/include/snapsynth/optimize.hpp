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

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace snapsynth {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimizerConfig {
  int max_evals = 2000000;
  double xtol = 1e-9;    // parameter tolerance
  double ftol = 1e-12;   // objective tolerance
  double fd_step = 1e-6; // central-difference step
  std::uint64_t seed = 12345;

  void validate() const;
};

struct OptimResult {
  Eigen::VectorXd x;
  double fval = 0.0;
  int evals = 0;
  bool converged = false;
};

/**
 * Derivative-free Nelder-Mead simplex search. Deterministic: identical
 * (objective, x0, config) give bitwise-identical results. The returned
 * fval never exceeds objective(x0). Budget exhaustion is reported via
 * converged=false, not an error.
 */
OptimResult minimize_local(const Objective& objective, const Eigen::VectorXd& x0,
                           const OptimizerConfig& config = {});

/**
 * Quasi-Newton (BFGS) refinement with central finite-difference gradients.
 * Accepted objective values are monotone non-increasing.
 */
OptimResult minimize_refine(const Objective& objective, const Eigen::VectorXd& x0,
                            const OptimizerConfig& config = {});

/**
 * Run minimize_local from every seed point, return the best result
 * (ties broken by seed order). Throws if every start fails, with
 * per-seed diagnostics in the message.
 */
OptimResult multi_start(const Objective& objective,
                        const std::vector<Eigen::VectorXd>& seeds,
                        const OptimizerConfig& config = {});

}  // namespace snapsynth
