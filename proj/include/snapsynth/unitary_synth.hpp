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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "snapsynth/optimize.hpp"
#include "snapsynth/sequence.hpp"

namespace snapsynth {

/** Target unitary acting on span{|0>..|d-1>}, embedded at a cutoff. */
class TargetUnitary {
 public:
  TargetUnitary(Eigen::MatrixXcd block, CutoffDim cutoff);

  static TargetUnitary fourier(int d, CutoffDim cutoff);
  static TargetUnitary fourier(int d) { return fourier(d, default_cutoff(d)); }
  static TargetUnitary cyclic_shift(int d, CutoffDim cutoff);
  static TargetUnitary cyclic_shift(int d) {
    return cyclic_shift(d, default_cutoff(d));
  }

  /**
   * Default synthesis cutoff max(2d, d+40). Larger than the state-prep
   * rule because the full-trace fidelity dilutes a fixed block error by
   * 1/nc and the zero-sum rotation form has a finite error floor.
   */
  static CutoffDim default_cutoff(int d);

  const Eigen::MatrixXcd& block() const { return block_; }
  int dim() const { return static_cast<int>(block_.rows()); }
  CutoffDim cutoff() const { return cutoff_; }

  /** [[block, 0], [0, I]] at the embedding cutoff. */
  Operator embed() const;

 private:
  Eigen::MatrixXcd block_;
  CutoffDim cutoff_;
};

struct RoundTrace {
  std::string name;
  double f_full = 0.0;
  double f_block = 0.0;
};

struct SynthReport {
  GateSequence sequence;
  double f_unitary_full = 0.0;
  double f_unitary_block = 0.0;
  std::vector<RoundTrace> rounds;
  int rotation_count = 0;  // scheduled SO(2) rotations: d(d-1)/2
  int snap_count = 0;      // emitted column-phase SNAPs (zero-phase ones elided)
  double cutoff_check_delta = 0.0;  // block fidelity change at nc+5
  std::uint64_t seed = 0;
};

class SynthError : public std::runtime_error {
 public:
  SynthError(const std::string& msg, SynthReport partial)
      : std::runtime_error(msg), partial_(std::move(partial)) {}
  const SynthReport& partial_report() const { return partial_; }

 private:
  SynthReport partial_;
};

/**
 * Maps alpha to the SO(2) angle realized by
 * V_k(alpha) = D(alpha) R_k(pi) D(-2*alpha) R_k(pi) D(alpha)
 * on the {|k>,|k+1>} block, via a 41-point table on alpha in [-1,1]
 * restricted to its monotone segment around 0, polished by bisection.
 */
class RotationCalibrator {
 public:
  explicit RotationCalibrator(CutoffDim cutoff);

  CutoffDim cutoff() const { return basis_.cutoff(); }

  Operator v_gate(int k, double alpha) const;
  double theta_of_alpha(int k, double alpha) const;

  /** Reachable angle interval [theta_min, theta_max] for level k. */
  std::pair<double, double> reachable(int k) const;

  /** Find alpha with theta(alpha) = theta. Throws CalibrationError. */
  double calibrate(int k, double theta) const;

 private:
  struct Table {
    std::vector<double> alphas;
    std::vector<double> thetas;
  };
  const Table& table(int k) const;

  RealDisplacementBasis basis_;
  mutable std::vector<Table> tables_;  // lazily built per level
};

class CalibrationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** One-shot calibration at a given cutoff (compilers share a calibrator). */
double calibrate_rotation(int k, double theta, CutoffDim cutoff,
                          const OptimizerConfig& config = {});

/**
 * SNAP making column `col` of the working matrix real non-negative:
 * phases -arg(w(r,col)) for rows r <= col, zero entries get phase 0.
 */
SnapGate column_phase_snap(const Operator& w, int col);

/**
 * Sum of |m(i,j)| over off-diagonal entries outside the top-left
 * d_active x d_active block, restricted to rows/cols < dim - buffer.
 */
double off_diagonal_cost(const Operator& m, int d_active, int buffer = 10);

struct ColumnElimination {
  std::vector<int> levels;
  std::vector<double> thetas;
  std::vector<double> alphas;
  GateSequence gates;  // realized V_k gates in application order, unmerged
  Operator reduced;
};

/**
 * Givens-style bottom-up elimination of column `col` (previously made
 * non-negative): rotations on {k,k+1} for k=0..col-1, each realized via
 * calibrate_rotation, then one refinement round over this column's
 * alphas against off_diagonal_cost.
 */
ColumnElimination eliminate_column(const Operator& w, int col, CutoffDim cutoff,
                                   const OptimizerConfig& config = {});

/** Column-wise synthesis with per-column and global optimization rounds. */
SynthReport compile_unitary(const TargetUnitary& target,
                            const OptimizerConfig& config = {});

/**
 * Decomposition schedule computed with ideal SO(2) rotations (exact 2x2
 * arithmetic, no gate realization). Feeding it to exact_construct
 * reproduces the embedded target to rounding accuracy; this isolates the
 * elimination logic from realization error.
 */
struct ExactSchedule {
  int dim = 0;
  std::vector<std::vector<double>> snap_phases;   // per column d-1..1, then row 0
  std::vector<std::pair<int, double>> rotations;  // (level, theta), application order
};

ExactSchedule decompose_exact(const TargetUnitary& target);
Operator exact_construct(const ExactSchedule& schedule, CutoffDim cutoff);

/** Parse {"dim": d, "matrix": [[[re,im],...],...]} (row-major). */
Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j);

/** Target matrix JSON with synthesis invariants applied. */
TargetUnitary target_from_json(const nlohmann::json& j, int cutoff_override = 0);
nlohmann::json report_to_json(const SynthReport& report);

}  // namespace snapsynth
