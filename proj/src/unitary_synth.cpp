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

#include "snapsynth/unitary_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace snapsynth {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kBuffer = 10;
constexpr double kZeroEntry = 1e-14;
constexpr double kZeroPhase = 1e-12;
constexpr double kZeroAlpha = 1e-12;
// realized rotations carry an O(1e-2) block error floor; deflation residue
// beyond this indicates a broken column, not ordinary realization noise
constexpr double kDeflationGuard = 0.25;

void scale_rows(Operator& m, const std::vector<double>& phases) {
  for (std::size_t r = 0; r < phases.size(); ++r) {
    if (phases[r] != 0.0) {
      m.row(static_cast<Eigen::Index>(r)) *= std::exp(Complex(0, phases[r]));
    }
  }
}

// Ideal SO(2) rotation acting on rows {k, k+1} from the left.
void apply_ideal_rotation(Operator& m, int k, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Eigen::RowVectorXcd upper = m.row(k);
  m.row(k) = c * upper - s * m.row(k + 1);
  m.row(k + 1) = s * upper + c * m.row(k + 1).eval();
}

struct ColumnRecord {
  std::vector<double> snap_phases;  // length col+1
  std::vector<int> levels;
  std::vector<double> thetas;
};

double column_deflation_error(const Operator& w, int col, int lim) {
  double err = 0.0;
  for (int r = 0; r < lim; ++r) {
    const double want = (r == col) ? 1.0 : 0.0;
    err = std::max(err, std::abs(w(r, col) - want));
    err = std::max(err, std::abs(w(col, r) - want));
  }
  return err;
}

}  // namespace

TargetUnitary::TargetUnitary(Eigen::MatrixXcd block, CutoffDim cutoff)
    : block_(std::move(block)), cutoff_(cutoff) {
  if (block_.rows() < 1 || block_.rows() != block_.cols()) {
    throw std::invalid_argument("target block must be square and non-empty");
  }
  if (!block_.allFinite()) {
    throw std::invalid_argument("target block must be finite");
  }
  const int d = static_cast<int>(block_.rows());
  if (d > cutoff_.nc - kBuffer) {
    throw std::invalid_argument("target dimension exceeds cutoff minus buffer");
  }
  const double dev = (block_.adjoint() * block_ -
                      Eigen::MatrixXcd::Identity(d, d))
                         .cwiseAbs()
                         .maxCoeff();
  if (dev > 1e-8) {
    std::ostringstream msg;
    msg << "target block is not unitary (|U^dag U - I|_max = " << dev << ")";
    throw std::invalid_argument(msg.str());
  }
}

CutoffDim TargetUnitary::default_cutoff(int d) {
  return CutoffDim(std::max(2 * d, d + 40));
}

TargetUnitary TargetUnitary::fourier(int d, CutoffDim cutoff) {
  Eigen::MatrixXcd f(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      f(i, j) = norm * std::exp(Complex(0, 2.0 * kPi * i * j / d));
    }
  }
  return TargetUnitary(std::move(f), cutoff);
}

TargetUnitary TargetUnitary::cyclic_shift(int d, CutoffDim cutoff) {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i) p((i + 1) % d, i) = 1.0;
  return TargetUnitary(std::move(p), cutoff);
}

Operator TargetUnitary::embed() const {
  Operator u = Operator::Identity(cutoff_.nc, cutoff_.nc);
  u.topLeftCorner(dim(), dim()) = block_;
  return u;
}

RotationCalibrator::RotationCalibrator(CutoffDim cutoff) : basis_(cutoff) {
  tables_.resize(cutoff.nc - 1);
}

Operator RotationCalibrator::v_gate(int k, double alpha) const {
  const int nc = basis_.cutoff().nc;
  if (k < 0 || k >= nc - 1) {
    throw std::invalid_argument("rotation level out of range");
  }
  const Operator d1 = basis_.displacement(alpha);
  Operator t = d1;
  t.topRows(k + 1) = -t.topRows(k + 1);
  t = basis_.displacement(-2.0 * alpha) * t;
  t.topRows(k + 1) = -t.topRows(k + 1);
  return d1 * t;
}

double RotationCalibrator::theta_of_alpha(int k, double alpha) const {
  const int nc = basis_.cutoff().nc;
  if (k < 0 || k >= nc - 1) {
    throw std::invalid_argument("rotation level out of range");
  }
  // only column k of V_k is needed
  StateVector v = StateVector::Zero(nc);
  v(k) = 1.0;
  v = basis_.apply(alpha, v);
  v.head(k + 1) = -v.head(k + 1);
  v = basis_.apply(-2.0 * alpha, v);
  v.head(k + 1) = -v.head(k + 1);
  v = basis_.apply(alpha, v);
  return std::atan2(v(k + 1).real(), v(k).real());
}

const RotationCalibrator::Table& RotationCalibrator::table(int k) const {
  Table& t = tables_.at(k);
  if (t.alphas.empty()) {
    std::vector<double> alphas(41), thetas(41);
    for (int i = 0; i < 41; ++i) {
      alphas[i] = -1.0 + i * 0.05;
      thetas[i] = theta_of_alpha(k, alphas[i]);
    }
    // keep the maximal monotone increasing segment containing alpha=0
    int lo = 20, hi = 20;
    while (lo > 0 && thetas[lo - 1] < thetas[lo]) --lo;
    while (hi < 40 && thetas[hi + 1] > thetas[hi]) ++hi;
    t.alphas.assign(alphas.begin() + lo, alphas.begin() + hi + 1);
    t.thetas.assign(thetas.begin() + lo, thetas.begin() + hi + 1);
  }
  return t;
}

std::pair<double, double> RotationCalibrator::reachable(int k) const {
  const Table& t = table(k);
  return {t.thetas.front(), t.thetas.back()};
}

double RotationCalibrator::calibrate(int k, double theta) const {
  if (theta == 0.0) return 0.0;
  const Table& t = table(k);
  if (theta < t.thetas.front() || theta > t.thetas.back()) {
    std::ostringstream msg;
    msg << "rotation angle " << theta << " outside the calibratable range ["
        << t.thetas.front() << ", " << t.thetas.back() << "] at level " << k;
    throw CalibrationError(msg.str());
  }
  std::size_t cell = 0;
  while (cell + 2 < t.thetas.size() && t.thetas[cell + 1] < theta) ++cell;
  double lo = t.alphas[cell], hi = t.alphas[cell + 1];
  double flo = t.thetas[cell] - theta;
  for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = theta_of_alpha(k, mid) - theta;
    if ((flo <= 0.0) == (fmid <= 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double calibrate_rotation(int k, double theta, CutoffDim cutoff,
                          const OptimizerConfig& config) {
  config.validate();
  return RotationCalibrator(cutoff).calibrate(k, theta);
}

SnapGate column_phase_snap(const Operator& w, int col) {
  if (col < 0 || col >= w.cols()) {
    throw std::invalid_argument("column index out of range");
  }
  std::vector<double> phases(col + 1, 0.0);
  for (int r = 0; r <= col; ++r) {
    if (std::abs(w(r, col)) > kZeroEntry) {
      phases[r] = -std::arg(w(r, col));
    }
  }
  return SnapGate(std::move(phases));
}

double off_diagonal_cost(const Operator& m, int d_active, int buffer) {
  if (d_active < 0 || d_active > m.rows()) {
    throw std::invalid_argument("active block dimension out of range");
  }
  const int lim = std::max<int>(0, static_cast<int>(m.rows()) - buffer);
  double total = 0.0;
  for (int i = 0; i < lim; ++i) {
    for (int j = 0; j < lim; ++j) {
      if (i == j || (i < d_active && j < d_active)) continue;
      total += std::abs(m(i, j));
    }
  }
  return total;
}

namespace {

ColumnElimination eliminate_column_impl(const Operator& w, int col,
                                        const RotationCalibrator& calib,
                                        const OptimizerConfig& config) {
  const CutoffDim cutoff = calib.cutoff();
  ColumnElimination out{{}, {}, {}, GateSequence(cutoff), w};
  Operator& work = out.reduced;
  const Operator before = w;

  for (int k = 0; k < col; ++k) {
    double theta = std::atan2(work(k, col).real(), work(k + 1, col).real());
    // realization noise can push an angle just past the monotone range;
    // fold by pi (the rotation zeroing the same entry with opposite mass sign)
    const auto [tmin, tmax] = calib.reachable(k);
    if (theta > tmax) theta -= kPi;
    if (theta < tmin) theta += kPi;
    const double alpha = calib.calibrate(k, theta);
    if (alpha != 0.0) {
      work = calib.v_gate(k, alpha) * work;
    }
    out.levels.push_back(k);
    out.thetas.push_back(theta);
    out.alphas.push_back(alpha);
  }

  // second round: refine this column's alphas against the off-diagonal mass
  if (!out.alphas.empty()) {
    Objective cost = [&](const Eigen::VectorXd& x) {
      Operator m = before;
      for (std::size_t i = 0; i < out.levels.size(); ++i) {
        m = calib.v_gate(out.levels[i], x(static_cast<Eigen::Index>(i))) * m;
      }
      return off_diagonal_cost(m, col, kBuffer);
    };
    Eigen::VectorXd x0 =
        Eigen::Map<const Eigen::VectorXd>(out.alphas.data(), out.alphas.size());
    const OptimResult res = minimize_refine(cost, x0, config);
    for (std::size_t i = 0; i < out.alphas.size(); ++i) {
      out.alphas[i] = res.x(static_cast<Eigen::Index>(i));
    }
    work = before;
    for (std::size_t i = 0; i < out.levels.size(); ++i) {
      if (std::abs(out.alphas[i]) > kZeroAlpha) {
        work = calib.v_gate(out.levels[i], out.alphas[i]) * work;
      }
    }
  }

  for (std::size_t i = 0; i < out.levels.size(); ++i) {
    const double a = out.alphas[i];
    if (std::abs(a) <= kZeroAlpha) continue;
    const int k = out.levels[i];
    const std::vector<double> pi_phases(k + 1, kPi);
    out.gates.gates.emplace_back(DisplacementGate(a));
    out.gates.gates.emplace_back(SnapGate(pi_phases));
    out.gates.gates.emplace_back(DisplacementGate(-2.0 * a));
    out.gates.gates.emplace_back(SnapGate(pi_phases));
    out.gates.gates.emplace_back(DisplacementGate(a));
  }
  return out;
}

}  // namespace

ColumnElimination eliminate_column(const Operator& w, int col, CutoffDim cutoff,
                                   const OptimizerConfig& config) {
  config.validate();
  if (w.rows() != cutoff.nc || w.cols() != cutoff.nc) {
    throw std::invalid_argument("working matrix does not match cutoff");
  }
  if (col < 1 || col >= cutoff.nc - 1) {
    throw std::invalid_argument("column index out of range");
  }
  return eliminate_column_impl(w, col, RotationCalibrator(cutoff), config);
}

ExactSchedule decompose_exact(const TargetUnitary& target) {
  const int d = target.dim();
  ExactSchedule sched;
  sched.dim = d;
  Operator work = target.embed().adjoint();
  for (int col = d - 1; col >= 1; --col) {
    SnapGate snap = column_phase_snap(work, col);
    scale_rows(work, snap.phases);
    sched.snap_phases.push_back(snap.phases);
    for (int k = 0; k < col; ++k) {
      const double theta =
          std::atan2(work(k, col).real(), work(k + 1, col).real());
      apply_ideal_rotation(work, k, theta);
      sched.rotations.emplace_back(k, theta);
    }
  }
  std::vector<double> last(1, 0.0);
  if (std::abs(work(0, 0)) > kZeroEntry) {
    last[0] = reduce_phase(-std::arg(work(0, 0)));
  }
  sched.snap_phases.push_back(last);
  return sched;
}

Operator exact_construct(const ExactSchedule& schedule, CutoffDim cutoff) {
  Operator u = Operator::Identity(cutoff.nc, cutoff.nc);
  std::size_t ri = 0;
  std::size_t si = 0;
  for (int col = schedule.dim - 1; col >= 1; --col, ++si) {
    scale_rows(u, schedule.snap_phases.at(si));
    for (int k = 0; k < col; ++k, ++ri) {
      apply_ideal_rotation(u, schedule.rotations.at(ri).first,
                           schedule.rotations.at(ri).second);
    }
  }
  scale_rows(u, schedule.snap_phases.at(si));
  return u;
}

SynthReport compile_unitary(const TargetUnitary& target,
                            const OptimizerConfig& config) {
  config.validate();
  const int d = target.dim();
  const CutoffDim cutoff = target.cutoff();
  const int nc = cutoff.nc;
  const RotationCalibrator calib(cutoff);
  const Operator target_full = target.embed();

  SynthReport report{GateSequence(cutoff)};
  report.seed = config.seed;
  report.rotation_count = d * (d - 1) / 2;

  Operator work = target_full.adjoint();
  std::vector<ColumnRecord> records;
  std::vector<double> alphas_flat;

  for (int col = d - 1; col >= 1; --col) {
    SnapGate snap = column_phase_snap(work, col);
    scale_rows(work, snap.phases);
    ColumnElimination elim = eliminate_column_impl(work, col, calib, config);
    work = elim.reduced;

    const double defl = column_deflation_error(work, col, nc - kBuffer);
    if (defl > kDeflationGuard) {
      std::ostringstream msg;
      msg << "column " << col << " failed to deflate (residual " << defl << ")";
      throw SynthError(msg.str(), report);
    }
    records.push_back(ColumnRecord{snap.phases, elim.levels, elim.thetas});
    alphas_flat.insert(alphas_flat.end(), elim.alphas.begin(), elim.alphas.end());
  }

  std::vector<double> final_phase(1, 0.0);
  if (d >= 1 && std::abs(work(0, 0)) > kZeroEntry) {
    final_phase[0] = reduce_phase(-std::arg(work(0, 0)));
  }

  auto construct = [&](const Eigen::VectorXd& x) {
    Operator u = Operator::Identity(nc, nc);
    Eigen::Index ri = 0;
    for (const ColumnRecord& rec : records) {
      scale_rows(u, rec.snap_phases);
      for (int level : rec.levels) {
        const double a = x(ri++);
        if (a != 0.0) u = calib.v_gate(level, a) * u;
      }
    }
    scale_rows(u, final_phase);
    return u;
  };

  Eigen::VectorXd x =
      Eigen::Map<const Eigen::VectorXd>(alphas_flat.data(), alphas_flat.size());

  const Operator u2 = construct(x);
  report.rounds.push_back(RoundTrace{"columns", unitary_fidelity(u2, target_full),
                                     unitary_fidelity_block(u2, target_full, d)});

  if (x.size() > 0) {
    Objective objective = [&](const Eigen::VectorXd& xx) {
      return 1.0 - unitary_fidelity(construct(xx), target_full);
    };
    OptimizerConfig global_cfg = config;
    global_cfg.ftol = std::max(config.ftol, 1e-10);
    const OptimResult res = minimize_refine(objective, x, global_cfg);
    x = res.x;
  }
  const Operator u3 = construct(x);
  report.rounds.push_back(RoundTrace{"global", unitary_fidelity(u3, target_full),
                                     unitary_fidelity_block(u3, target_full, d)});
  report.f_unitary_full = report.rounds.back().f_full;
  report.f_unitary_block = report.rounds.back().f_block;

  // emit gates with the final parameters, merging adjacent displacements
  std::vector<Gate> raw;
  Eigen::Index ri = 0;
  int emitted_snaps = 0;
  for (const ColumnRecord& rec : records) {
    const bool keep = std::any_of(rec.snap_phases.begin(), rec.snap_phases.end(),
                                  [](double p) { return std::abs(p) > kZeroPhase; });
    if (keep) {
      raw.emplace_back(SnapGate(rec.snap_phases));
      ++emitted_snaps;
    }
    for (int level : rec.levels) {
      const double a = x(ri++);
      if (std::abs(a) <= kZeroAlpha) continue;
      const std::vector<double> pi_phases(level + 1, kPi);
      raw.emplace_back(DisplacementGate(a));
      raw.emplace_back(SnapGate(pi_phases));
      raw.emplace_back(DisplacementGate(-2.0 * a));
      raw.emplace_back(SnapGate(pi_phases));
      raw.emplace_back(DisplacementGate(a));
    }
  }
  if (std::abs(final_phase[0]) > kZeroPhase) {
    raw.emplace_back(SnapGate(final_phase));
    ++emitted_snaps;
  }
  report.snap_count = emitted_snaps;

  for (const Gate& g : raw) {
    auto* prev = report.sequence.gates.empty()
                     ? nullptr
                     : std::get_if<DisplacementGate>(&report.sequence.gates.back());
    if (prev != nullptr && std::holds_alternative<DisplacementGate>(g)) {
      prev->alpha += std::get<DisplacementGate>(g).alpha;
      if (std::abs(prev->alpha) <= kZeroAlpha) {
        report.sequence.gates.pop_back();
      }
      continue;
    }
    report.sequence.gates.push_back(g);
  }

  // truncation probe on the cutoff-stable block fidelity
  {
    const GateSequence wider(report.sequence.gates, CutoffDim(nc + 5));
    const TargetUnitary wider_target(target.block(), CutoffDim(nc + 5));
    const double fb = unitary_fidelity_block(sequence_unitary(wider),
                                             wider_target.embed(), d);
    report.cutoff_check_delta = std::abs(fb - report.f_unitary_block);
  }
  return report;
}

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("matrix")) {
    throw std::invalid_argument("target JSON needs 'dim' and 'matrix'");
  }
  const int d = j.at("dim").get<int>();
  if (d < 1) throw std::invalid_argument("target dimension must be positive");
  const auto& rows = j.at("matrix");
  if (!rows.is_array() || static_cast<int>(rows.size()) != d) {
    throw std::invalid_argument("matrix must have 'dim' rows");
  }
  Eigen::MatrixXcd block(d, d);
  for (int i = 0; i < d; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != d) {
      throw std::invalid_argument("matrix must have 'dim' columns per row");
    }
    for (int k = 0; k < d; ++k) {
      const auto& e = row[k];
      if (!e.is_array() || e.size() != 2) {
        throw std::invalid_argument("matrix entries must be [re, im] pairs");
      }
      block(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return block;
}

TargetUnitary target_from_json(const nlohmann::json& j, int cutoff_override) {
  Eigen::MatrixXcd block = matrix_from_json(j);
  const int d = static_cast<int>(block.rows());
  const CutoffDim cutoff = cutoff_override > 0 ? CutoffDim(cutoff_override)
                                               : TargetUnitary::default_cutoff(d);
  return TargetUnitary(std::move(block), cutoff);
}

nlohmann::json report_to_json(const SynthReport& report) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const RoundTrace& r : report.rounds) {
    rounds.push_back(
        {{"name", r.name}, {"f_full", r.f_full}, {"f_block", r.f_block}});
  }
  return {{"sequence", sequence_to_json(report.sequence)},
          {"f_unitary_full", report.f_unitary_full},
          {"f_unitary_block", report.f_unitary_block},
          {"rounds", std::move(rounds)},
          {"rotation_count", report.rotation_count},
          {"snap_count", report.snap_count},
          {"cutoff_check_delta", report.cutoff_check_delta},
          {"seed", report.seed}};
}

}  // namespace snapsynth
