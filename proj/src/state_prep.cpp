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

#include "snapsynth/state_prep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace snapsynth {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kBuffer = 10;          // levels reserved above the target
constexpr double kStepThreshold = 0.999;
constexpr double kZeroPhase = 1e-12; // all-zero SNAPs below this are elided

// R_n(pi) applied in place: negate amplitudes of levels 0..n.
void apply_r_pi(StateVector& psi, int n) {
  psi.head(n + 1) = -psi.head(n + 1);
}

// Merged chain D(b0) R_0 D(b1) R_0 D(b2) R_1 D(b3) R_1 D(b4) ... on |0>.
StateVector ladder_chain_state(const Eigen::VectorXd& b, int nsteps,
                               const RealDisplacementBasis& basis) {
  StateVector psi = StateVector::Zero(basis.cutoff().nc);
  psi(0) = 1.0;
  psi = basis.apply(b(0), psi);
  for (int i = 0; i < nsteps; ++i) {
    apply_r_pi(psi, i);
    psi = basis.apply(b(2 * i + 1), psi);
    apply_r_pi(psi, i);
    psi = basis.apply(b(2 * i + 2), psi);
  }
  return psi;
}

LadderStep so2_step_impl(int n, double theta, const RealDisplacementBasis& basis,
                         const OptimizerConfig& config) {
  const int nc = basis.cutoff().nc;
  if (n < 0 || n >= nc - 1) {
    throw std::invalid_argument("so2 step level out of range for cutoff");
  }
  if (theta < -1e-12 || theta > kPi / 2 + 1e-12) {
    throw std::invalid_argument("so2 step angle must lie in [0, pi/2]");
  }
  theta = std::clamp(theta, 0.0, kPi / 2);
  if (theta == 0.0) {
    return LadderStep{n, 0.0, {0.0, 0.0, 0.0}, 1.0};
  }

  const double ct = std::cos(theta), st = std::sin(theta);
  Objective objective = [&](const Eigen::VectorXd& x) {
    StateVector psi = StateVector::Zero(nc);
    psi(n) = 1.0;
    psi = basis.apply(x(0), psi);
    apply_r_pi(psi, n);
    psi = basis.apply(x(1), psi);
    apply_r_pi(psi, n);
    psi = basis.apply(x(2), psi);
    return 1.0 - std::abs(ct * psi(n) + st * psi(n + 1));
  };

  // Neutral seed patterns, scaled down for small rotation angles.
  static const double kSeeds[5][3] = {{-0.3, 0.5, -0.3},
                                      {0.3, -0.5, 0.3},
                                      {-0.5, 0.7, -0.4},
                                      {-0.15, 0.25, -0.15},
                                      {0.5, -0.7, 0.4}};
  const double scale = std::clamp(theta / (kPi / 2), 0.1, 1.0);
  std::vector<Eigen::VectorXd> seeds;
  for (const auto& s : kSeeds) {
    seeds.push_back(scale * Eigen::Vector3d(s[0], s[1], s[2]));
  }

  const OptimResult best = multi_start(objective, seeds, config);
  LadderStep step{n, theta, {best.x(0), best.x(1), best.x(2)}, 1.0 - best.fval};
  if (step.fidelity < kStepThreshold) {
    std::ostringstream msg;
    msg << "so2 step n=" << n << " theta=" << theta
        << " stalled at fidelity " << step.fidelity;
    throw So2StepError(msg.str(), step);
  }
  return step;
}

double resimulate(const GateSequence& seq, const TargetState& target) {
  const TruncatedState out =
      apply_sequence(seq, TruncatedState::vacuum(seq.cutoff)).state;
  return state_fidelity(out, target.embed(seq.cutoff));
}

// Fidelity change when the same gates run at cutoff+5 (truncation probe).
double cutoff_probe(const GateSequence& seq, const TargetState& target,
                    double fidelity) {
  const GateSequence wider(seq.gates, CutoffDim(seq.cutoff.nc + 5));
  return std::abs(resimulate(wider, target) - fidelity);
}

double uniform_from_bits(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

}  // namespace

TargetState::TargetState(Eigen::VectorXcd coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 1) {
    throw std::invalid_argument("target state needs at least one coefficient");
  }
  if (!coeffs_.allFinite()) {
    throw std::invalid_argument("target coefficients must be finite");
  }
  if (std::abs(coeffs_.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("target state must be normalized within 1e-12");
  }
}

TargetState TargetState::fock(int n) {
  if (n < 0) throw std::invalid_argument("fock level must be non-negative");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n + 1);
  c(n) = 1.0;
  return TargetState(std::move(c));
}

TargetState TargetState::uniform(int max_level) {
  if (max_level < 0) throw std::invalid_argument("uniform level must be non-negative");
  return TargetState(Eigen::VectorXcd::Constant(
      max_level + 1, 1.0 / std::sqrt(static_cast<double>(max_level + 1))));
}

TruncatedState TargetState::embed(CutoffDim cutoff) const {
  if (cutoff.nc < coeffs_.size()) {
    throw std::invalid_argument("cutoff smaller than target support");
  }
  StateVector v = StateVector::Zero(cutoff.nc);
  v.head(coeffs_.size()) = coeffs_;
  return TruncatedState(std::move(v), cutoff);
}

CutoffDim default_prep_cutoff(int max_level) {
  return CutoffDim(std::max(2 * (max_level + 1), max_level + 15));
}

CutoffDim sublinear_cutoff(int n) {
  return CutoffDim(static_cast<int>(std::ceil(n + 3.0 * std::sqrt(n) + 15.0)));
}

PhaseUnrollResult phase_unroll(const TargetState& target) {
  const auto& c = target.coeffs();
  std::vector<double> phases(c.size());
  Eigen::VectorXcd mags(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    phases[i] = (c(i) == Complex(0, 0)) ? 0.0 : std::arg(c(i));
    mags(i) = std::abs(c(i));
  }
  return PhaseUnrollResult{SnapGate(std::move(phases)), TargetState(std::move(mags))};
}

LadderAmplitudes ladder_amplitudes(const TargetState& nonnegative) {
  const auto& c = nonnegative.coeffs();
  const int count = static_cast<int>(c.size());
  for (int i = 0; i < count; ++i) {
    if (c(i).imag() != 0.0 || c(i).real() < 0.0) {
      throw std::invalid_argument("ladder_amplitudes requires real non-negative coefficients");
    }
  }
  LadderAmplitudes out;
  out.d.resize(count);
  double suffix = 0.0;
  for (int i = count - 1; i >= 0; --i) {
    suffix += c(i).real() * c(i).real();
    out.d[i] = std::sqrt(suffix);
  }
  out.thetas.resize(count - 1);
  for (int i = 0; i + 1 < count; ++i) {
    if (out.d[i] <= 0.0) {
      out.thetas[i] = 0.0;  // 0/0 convention
    } else {
      out.thetas[i] = std::asin(std::clamp(out.d[i + 1] / out.d[i], 0.0, 1.0));
    }
  }
  return out;
}

LadderStep optimize_so2_step(int n, double theta, CutoffDim cutoff,
                             const OptimizerConfig& config) {
  return so2_step_impl(n, theta, RealDisplacementBasis(cutoff), config);
}

PrepPlan compile_state_prep(const TargetState& target, CutoffDim cutoff,
                            const OptimizerConfig& config) {
  config.validate();
  PhaseUnrollResult unrolled = phase_unroll(target);

  // trailing zero coefficients do not enter the ladder
  const auto& mags = unrolled.nonnegative.coeffs();
  int top = static_cast<int>(mags.size()) - 1;
  while (top > 0 && std::abs(mags(top)) < 1e-14) --top;
  const int nsteps = top;  // ladder levels 0..top-1

  if (cutoff.nc - kBuffer < top + 1) {
    throw std::invalid_argument("cutoff too small for target level plus buffer");
  }

  PrepPlan plan{GateSequence(cutoff)};
  plan.seed = config.seed;

  if (nsteps > 0) {
    const RealDisplacementBasis basis(cutoff);

    // stage 1: local per-step optimization
    const LadderAmplitudes ladder =
        ladder_amplitudes(TargetState(mags.head(top + 1).normalized()));
    std::vector<LadderStep> steps;
    for (int n = 0; n < nsteps; ++n) {
      steps.push_back(so2_step_impl(n, ladder.thetas[n], basis, config));
      plan.stages.emplace_back(steps.back());
    }

    // stage 2: merge adjacent displacements into 2N+1 parameters
    Eigen::VectorXd b(2 * nsteps + 1);
    b(0) = steps[0].alphas[0];
    b(1) = steps[0].alphas[1];
    for (int i = 0; i + 1 < nsteps; ++i) {
      b(2 * i + 2) = steps[i].alphas[2] + steps[i + 1].alphas[0];
      b(2 * i + 3) = steps[i + 1].alphas[1];
    }
    b(2 * nsteps) = steps[nsteps - 1].alphas[2];

    StateVector goal = StateVector::Zero(cutoff.nc);
    goal.head(top + 1) = mags.head(top + 1);
    Objective objective = [&](const Eigen::VectorXd& x) {
      return 1.0 - std::abs(goal.dot(ladder_chain_state(x, nsteps, basis)));
    };
    plan.chained_fidelity = 1.0 - objective(b);

    // stage 3: global refinement over all 2N+1 displacements
    const OptimResult refined = minimize_refine(objective, b, config);
    b = refined.x;

    plan.sequence.gates.emplace_back(DisplacementGate(b(0)));
    for (int i = 0; i < nsteps; ++i) {
      plan.sequence.gates.emplace_back(SnapGate(std::vector<double>(i + 1, kPi)));
      plan.sequence.gates.emplace_back(DisplacementGate(b(2 * i + 1)));
      plan.sequence.gates.emplace_back(SnapGate(std::vector<double>(i + 1, kPi)));
      plan.sequence.gates.emplace_back(DisplacementGate(b(2 * i + 2)));
    }
  } else {
    plan.chained_fidelity = 1.0;
  }

  // final frame-change SNAP, elided when trivially zero
  const auto& unroll_phases = unrolled.snap.phases;
  const bool nonzero = std::any_of(unroll_phases.begin(), unroll_phases.end(),
                                   [](double p) { return std::abs(p) > kZeroPhase; });
  if (nonzero) {
    plan.sequence.gates.emplace_back(unrolled.snap);
  }

  plan.fidelity = resimulate(plan.sequence, target);
  plan.snap_count = snap_count(plan.sequence);
  plan.displacement_count = displacement_count(plan.sequence);
  plan.cutoff_check_delta = cutoff_probe(plan.sequence, target, plan.fidelity);
  return plan;
}

PrepPlan compile_state_prep(const TargetState& target, const OptimizerConfig& config) {
  return compile_state_prep(target, default_prep_cutoff(target.max_level()), config);
}

PrepPlan compile_fock_sublinear(int n, double target_fidelity, CutoffDim cutoff,
                                const OptimizerConfig& config) {
  config.validate();
  if (n < 1) throw std::invalid_argument("sublinear scheme needs n >= 1");
  if (!(target_fidelity > 0.9 && target_fidelity < 1.0)) {
    throw std::invalid_argument("target fidelity must lie in (0.9, 1)");
  }
  if (cutoff.nc < sublinear_cutoff(n).nc) {
    throw std::invalid_argument("cutoff too small for sublinear scheme");
  }

  const int nc = cutoff.nc;
  const int dn = static_cast<int>(std::ceil(3.0 * std::sqrt(n)));
  const int lo = std::max(0, n - dn);
  const int hi = n + dn;
  const int band = hi - lo + 1;

  const RealDisplacementBasis basis(cutoff);
  StateVector psi0 = StateVector::Zero(nc);
  psi0(0) = 1.0;
  psi0 = basis.apply(std::sqrt(static_cast<double>(n)), psi0);

  const TargetState target = TargetState::fock(n);

  auto build_plan = [&](const Eigen::VectorXd& x, int blocks) {
    PrepPlan plan{GateSequence(cutoff)};
    plan.seed = config.seed;
    plan.chained_fidelity = 0.0;
    plan.sequence.gates.emplace_back(
        DisplacementGate(std::sqrt(static_cast<double>(n))));
    for (int k = 0; k < blocks; ++k) {
      plan.sequence.gates.emplace_back(DisplacementGate(x(k)));
      std::vector<double> phases(hi + 1, 0.0);
      for (int j = 0; j < band; ++j) {
        phases[lo + j] = x(blocks + k * band + j);
      }
      plan.sequence.gates.emplace_back(SnapGate(std::move(phases)));
      plan.stages.emplace_back(FoldStage{k, x(k), lo, hi});
    }
    plan.fidelity = resimulate(plan.sequence, target);
    plan.snap_count = snap_count(plan.sequence);
    plan.displacement_count = displacement_count(plan.sequence);
    plan.cutoff_check_delta = cutoff_probe(plan.sequence, target, plan.fidelity);
    return plan;
  };

  const int k_start = static_cast<int>(std::ceil(std::sqrt(n)));
  const int k_cap = 4 * k_start;

  Eigen::VectorXd warm;  // best parameters from the previous K
  int warm_blocks = 0;
  double best_f = -1.0;
  Eigen::VectorXd best_x;
  int best_blocks = 0;

  for (int blocks = k_start; blocks <= k_cap; ++blocks) {
    const int dim = blocks + blocks * band;
    Objective objective = [&, blocks](const Eigen::VectorXd& x) {
      StateVector psi = psi0;
      for (int k = 0; k < blocks; ++k) {
        psi = basis.apply(x(k), psi);
        for (int j = 0; j < band; ++j) {
          psi(lo + j) *= std::exp(Complex(0, x(blocks + k * band + j)));
        }
      }
      return 1.0 - std::abs(psi(n));
    };

    for (int attempt = 0; attempt < 2; ++attempt) {
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dim);
      for (int k = 0; k < blocks; ++k) x0(k) = 0.5 / std::pow(2.0, k);
      if (attempt == 0 && warm_blocks > 0) {
        x0.head(warm_blocks) = warm.head(warm_blocks);
        x0.segment(blocks, warm_blocks * band) = warm.tail(warm_blocks * band);
      } else if (attempt == 1) {
        std::mt19937_64 rng(config.seed + 1000ull * blocks);
        for (int j = 0; j < blocks * band; ++j) {
          x0(blocks + j) = uniform_from_bits(rng) - 0.5;
        }
      }

      const OptimResult res = minimize_refine(objective, x0, config);
      const double f = 1.0 - res.fval;
      if (f > best_f) {
        best_f = f;
        best_x = res.x;
        best_blocks = blocks;
      }
      if (f >= target_fidelity) {
        return build_plan(res.x, blocks);
      }
    }
    if (best_blocks == blocks) {
      warm = best_x;
      warm_blocks = blocks;
    }
  }

  std::ostringstream msg;
  msg << "sublinear folding for n=" << n << " exhausted K<=" << k_cap
      << " at fidelity " << best_f << " (target " << target_fidelity << ")";
  throw FoldingBudgetError(msg.str(), build_plan(best_x, best_blocks));
}

PrepPlan compile_fock_sublinear(int n, double target_fidelity,
                                const OptimizerConfig& config) {
  return compile_fock_sublinear(n, target_fidelity, sublinear_cutoff(n), config);
}

SweepTable gate_count_sweep(const std::vector<int>& n_values,
                            const std::vector<double>& fidelities,
                            const OptimizerConfig& config) {
  if (n_values.empty() || fidelities.empty()) {
    throw std::invalid_argument("sweep needs at least one n and one fidelity");
  }
  SweepTable table;
  for (int n : n_values) {
    std::optional<PrepPlan> linear;
    std::string linear_error;
    try {
      linear = compile_state_prep(TargetState::fock(n), config);
    } catch (const std::exception& e) {
      linear_error = e.what();
    }
    for (double ft : fidelities) {
      if (linear) {
        table.rows.push_back(SweepRow{n, "linear", ft, linear->snap_count,
                                      linear->displacement_count, linear->fidelity,
                                      linear->sequence.cutoff.nc});
      } else {
        std::ostringstream msg;
        msg << "n=" << n << " scheme=linear target=" << ft << ": " << linear_error;
        table.failures.push_back(msg.str());
      }
      try {
        const PrepPlan sub = compile_fock_sublinear(n, ft, config);
        table.rows.push_back(SweepRow{n, "sublinear", ft, sub.snap_count,
                                      sub.displacement_count, sub.fidelity,
                                      sub.sequence.cutoff.nc});
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "n=" << n << " scheme=sublinear target=" << ft << ": " << e.what();
        table.failures.push_back(msg.str());
      }
    }
  }
  return table;
}

nlohmann::json plan_to_json(const PrepPlan& plan, const std::string& scheme) {
  nlohmann::json stages = nlohmann::json::array();
  for (const PrepStage& s : plan.stages) {
    if (const auto* step = std::get_if<LadderStep>(&s)) {
      stages.push_back({{"type", "ladder"},
                        {"n", step->n},
                        {"theta", step->theta},
                        {"alphas", {step->alphas[0], step->alphas[1], step->alphas[2]}},
                        {"fidelity", step->fidelity}});
    } else {
      const auto& fold = std::get<FoldStage>(s);
      stages.push_back({{"type", "fold"},
                        {"k", fold.k},
                        {"beta", fold.beta},
                        {"band", {fold.band_lo, fold.band_hi}}});
    }
  }
  return {{"sequence", sequence_to_json(plan.sequence)},
          {"fidelity", plan.fidelity},
          {"snap_count", plan.snap_count},
          {"displacement_count", plan.displacement_count},
          {"chained_fidelity", plan.chained_fidelity},
          {"cutoff_check_delta", plan.cutoff_check_delta},
          {"stages", std::move(stages)},
          {"scheme", scheme},
          {"seed", plan.seed}};
}

std::string sweep_to_csv(const SweepTable& table) {
  std::ostringstream out;
  out << "n,scheme,target_fidelity,snap_count,displacement_count,"
         "achieved_fidelity,cutoff\n";
  char buf[64];
  for (const SweepRow& r : table.rows) {
    out << r.n << ',' << r.scheme << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", r.target_fidelity);
    out << buf << ',' << r.snap_count << ',' << r.displacement_count << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", r.achieved_fidelity);
    out << buf << ',' << r.cutoff << '\n';
  }
  return out.str();
}

}  // namespace snapsynth
