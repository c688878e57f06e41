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

#include "snapsynth/sequence.hpp"

#include <cmath>
#include <stdexcept>

namespace snapsynth {

DisplacementGate::DisplacementGate(Complex alpha_) : alpha(alpha_) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw std::invalid_argument("displacement amplitude must be finite");
  }
}

SnapGate::SnapGate(std::vector<double> phases_) : phases(std::move(phases_)) {
  for (double& p : phases) p = reduce_phase(p);
}

Operator gate_operator(const Gate& gate, CutoffDim cutoff) {
  return std::visit(
      [&](const auto& g) -> Operator {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, DisplacementGate>) {
          return displacement_operator(g.alpha, cutoff);
        } else {
          return snap_operator(g.phases, cutoff);
        }
      },
      gate);
}

ApplyResult apply_sequence(const GateSequence& seq, const TruncatedState& state,
                           double eps_trunc) {
  if (!(seq.cutoff == state.cutoff())) {
    throw std::invalid_argument("apply_sequence: sequence/state cutoff mismatch");
  }
  StateVector psi = state.amps();
  for (const Gate& g : seq.gates) {
    psi = gate_operator(g, seq.cutoff) * psi;
  }
  const double norm = psi.norm();
  return ApplyResult{TruncatedState(std::move(psi), seq.cutoff), norm,
                     norm < 1.0 - eps_trunc};
}

Operator sequence_unitary(const GateSequence& seq) {
  Operator u = Operator::Identity(seq.cutoff.nc, seq.cutoff.nc);
  for (const Gate& g : seq.gates) {
    u = gate_operator(g, seq.cutoff) * u;
  }
  return u;
}

GateSequence decompose_complex_displacement(Complex alpha, CutoffDim cutoff) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw std::invalid_argument("displacement amplitude must be finite");
  }
  const double r = std::abs(alpha);
  const double phi = (r == 0.0) ? 0.0 : std::arg(alpha);
  std::vector<double> theta(cutoff.nc), neg_theta(cutoff.nc);
  for (int n = 0; n < cutoff.nc; ++n) {
    theta[n] = reduce_phase(n * phi);
    neg_theta[n] = reduce_phase(-n * phi);
  }
  GateSequence seq(cutoff);
  seq.gates.emplace_back(SnapGate(std::move(neg_theta)));
  seq.gates.emplace_back(DisplacementGate(r));
  seq.gates.emplace_back(SnapGate(std::move(theta)));
  return seq;
}

int snap_count(const GateSequence& seq) {
  int n = 0;
  for (const Gate& g : seq.gates) n += std::holds_alternative<SnapGate>(g) ? 1 : 0;
  return n;
}

int displacement_count(const GateSequence& seq) {
  int n = 0;
  for (const Gate& g : seq.gates)
    n += std::holds_alternative<DisplacementGate>(g) ? 1 : 0;
  return n;
}

nlohmann::json sequence_to_json(const GateSequence& seq) {
  nlohmann::json gates = nlohmann::json::array();
  for (const Gate& g : seq.gates) {
    if (const auto* d = std::get_if<DisplacementGate>(&g)) {
      gates.push_back({{"type", "displacement"},
                       {"alpha", {d->alpha.real(), d->alpha.imag()}}});
    } else {
      const auto& s = std::get<SnapGate>(g);
      gates.push_back({{"type", "snap"}, {"phases", s.phases}});
    }
  }
  return {{"cutoff", seq.cutoff.nc}, {"gates", std::move(gates)}};
}

GateSequence sequence_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("cutoff") || !j.contains("gates")) {
    throw std::invalid_argument("gate sequence JSON needs 'cutoff' and 'gates'");
  }
  GateSequence seq(CutoffDim(j.at("cutoff").get<int>()));
  for (const auto& jg : j.at("gates")) {
    const std::string type = jg.at("type").get<std::string>();
    if (type == "displacement") {
      const auto& a = jg.at("alpha");
      if (!a.is_array() || a.size() != 2) {
        throw std::invalid_argument("displacement alpha must be [re, im]");
      }
      seq.gates.emplace_back(
          DisplacementGate(Complex(a[0].get<double>(), a[1].get<double>())));
    } else if (type == "snap") {
      seq.gates.emplace_back(SnapGate(jg.at("phases").get<std::vector<double>>()));
    } else {
      throw std::invalid_argument("unknown gate type: " + type);
    }
  }
  return seq;
}

}  // namespace snapsynth
