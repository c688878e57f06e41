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

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "snapsynth/optimize.hpp"
#include "snapsynth/sequence.hpp"

namespace snapsynth {

/** Target oscillator state sum c_n |n>, normalized within 1e-12. */
class TargetState {
 public:
  explicit TargetState(Eigen::VectorXcd coeffs);

  static TargetState fock(int n);
  static TargetState uniform(int max_level);

  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  int max_level() const { return static_cast<int>(coeffs_.size()) - 1; }

  /** Pad with zeros up to the cutoff dimension. */
  TruncatedState embed(CutoffDim cutoff) const;

 private:
  Eigen::VectorXcd coeffs_;
};

/** One SO(2) rung: D(a1) R_n(pi) D(a2) R_n(pi) D(a3), a1 applied first. */
struct LadderStep {
  int n = 0;
  double theta = 0.0;
  std::array<double, 3> alphas{0.0, 0.0, 0.0};
  double fidelity = 1.0;
};

/** One folding block of the sublinear scheme: D(beta) then a band SNAP. */
struct FoldStage {
  int k = 0;
  double beta = 0.0;
  int band_lo = 0;
  int band_hi = 0;
};

using PrepStage = std::variant<LadderStep, FoldStage>;

struct PrepPlan {
  GateSequence sequence;
  double fidelity = 0.0;           // re-simulated from the sequence
  int snap_count = 0;
  int displacement_count = 0;
  std::vector<PrepStage> stages;
  double chained_fidelity = 0.0;   // after per-step optimization, before refinement
  double cutoff_check_delta = 0.0; // |F(nc) - F(nc+5)| convergence probe
  std::uint64_t seed = 0;
};

class So2StepError : public std::runtime_error {
 public:
  So2StepError(const std::string& msg, LadderStep best)
      : std::runtime_error(msg), best_(best) {}
  const LadderStep& best_step() const { return best_; }

 private:
  LadderStep best_;
};

class FoldingBudgetError : public std::runtime_error {
 public:
  FoldingBudgetError(const std::string& msg, PrepPlan best)
      : std::runtime_error(msg), best_(std::move(best)) {}
  const PrepPlan& best_plan() const { return best_; }

 private:
  PrepPlan best_;
};

/** Default synthesis cutoff for targets reaching level N: max(2(N+1), N+15). */
CutoffDim default_prep_cutoff(int max_level);

/** Cutoff for the sublinear Fock scheme: ceil(n + 3*sqrt(n) + 15). */
CutoffDim sublinear_cutoff(int n);

struct PhaseUnrollResult {
  SnapGate snap;           // phases angle(c_n)
  TargetState nonnegative; // |c_n|
};

/** Split the target into a SNAP frame change and a non-negative target. */
PhaseUnrollResult phase_unroll(const TargetState& target);

struct LadderAmplitudes {
  std::vector<double> d;       // d_0 = 1 down to d_N, non-increasing
  std::vector<double> thetas;  // theta_n = arcsin(d_{n+1}/d_n), N entries
};

/** Residual amplitudes and SO(2) angles for a non-negative target. */
LadderAmplitudes ladder_amplitudes(const TargetState& nonnegative);

/**
 * Optimize (a1,a2,a3) of one SO(2) rung transferring |n> to
 * sin(theta)|n+1> + cos(theta)|n>. Multi-start Nelder-Mead from five
 * neutral seed patterns. Throws So2StepError (carrying the best step)
 * if the fidelity stays below 0.999.
 */
LadderStep optimize_so2_step(int n, double theta, CutoffDim cutoff,
                             const OptimizerConfig& config = {});

/**
 * Generic linear scheme: per-step local optimization, displacement
 * merging down to 2N+1 parameters, then global refinement, with the
 * phase-unroll SNAP appended last.
 */
PrepPlan compile_state_prep(const TargetState& target, CutoffDim cutoff,
                            const OptimizerConfig& config = {});

PrepPlan compile_state_prep(const TargetState& target,
                            const OptimizerConfig& config = {});

/**
 * Sublinear Fock-state scheme: D(sqrt(n)) followed by K folding blocks
 * (displacement + band-limited SNAP), K grown from ceil(sqrt(n)) until
 * the re-simulated fidelity reaches target_fidelity. Throws
 * FoldingBudgetError (carrying the best plan) when K hits 4*ceil(sqrt(n))
 * without reaching the target.
 */
PrepPlan compile_fock_sublinear(int n, double target_fidelity, CutoffDim cutoff,
                                const OptimizerConfig& config = {});

PrepPlan compile_fock_sublinear(int n, double target_fidelity,
                                const OptimizerConfig& config = {});

struct SweepRow {
  int n = 0;
  std::string scheme;     // "linear" | "sublinear"
  double target_fidelity = 0.0;
  int snap_count = 0;
  int displacement_count = 0;
  double achieved_fidelity = 0.0;
  int cutoff = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<std::string> failures;  // missing cells, one message each
};

/** Gate-count comparison harness; per-cell failures become missing cells. */
SweepTable gate_count_sweep(const std::vector<int>& n_values,
                            const std::vector<double>& fidelities,
                            const OptimizerConfig& config = {});

/** CSV: n,scheme,target_fidelity,snap_count,displacement_count,achieved_fidelity,cutoff */
std::string sweep_to_csv(const SweepTable& table);

/** Plan report JSON embedding the canonical gate-sequence format. */
nlohmann::json plan_to_json(const PrepPlan& plan, const std::string& scheme);

}  // namespace snapsynth
