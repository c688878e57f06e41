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

#include <variant>
#include <vector>

#include <json.hpp>

#include "snapsynth/fock.hpp"

namespace snapsynth {

struct DisplacementGate {
  Complex alpha;
  explicit DisplacementGate(Complex alpha_);
};

/** Phases are stored reduced mod 2*pi into (-pi, pi] (canonical form). */
struct SnapGate {
  std::vector<double> phases;
  explicit SnapGate(std::vector<double> phases_);
};

using Gate = std::variant<DisplacementGate, SnapGate>;

/**
 * Ordered gate list. Index 0 acts FIRST on the state:
 *   state' = G_{k-1} ... G_1 G_0 state.
 * Paper-style operator products read right to left; the JSON serializer
 * keeps this application order.
 */
struct GateSequence {
  std::vector<Gate> gates;
  CutoffDim cutoff;

  explicit GateSequence(CutoffDim cutoff_) : cutoff(cutoff_) {}
  GateSequence(std::vector<Gate> gates_, CutoffDim cutoff_)
      : gates(std::move(gates_)), cutoff(cutoff_) {}
};

/** Realize a single gate as a unitary at the given cutoff. */
Operator gate_operator(const Gate& gate, CutoffDim cutoff);

struct ApplyResult {
  TruncatedState state;
  double norm;
  bool norm_leak;  // true if norm dropped below 1 - eps_trunc
};

/** Apply gates in sequence order. Cutoffs must match. */
ApplyResult apply_sequence(const GateSequence& seq, const TruncatedState& state,
                           double eps_trunc = 1e-6);

/** Ordered matrix product of the gates; the index-0 gate is rightmost. */
Operator sequence_unitary(const GateSequence& seq);

/**
 * Complex displacement as real displacement plus SNAP frame change:
 * application order [Snap(-theta), D(|alpha|), Snap(theta)] with
 * theta_n = n*arg(alpha) mod 2*pi.
 */
GateSequence decompose_complex_displacement(Complex alpha, CutoffDim cutoff);

int snap_count(const GateSequence& seq);
int displacement_count(const GateSequence& seq);

/**
 * Canonical JSON wire format:
 *   {"cutoff": <int>,
 *    "gates": [{"type":"displacement","alpha":[re,im]} |
 *              {"type":"snap","phases":[...]}, ...]}
 * Gates listed in application order; doubles round-trip losslessly.
 */
nlohmann::json sequence_to_json(const GateSequence& seq);
GateSequence sequence_from_json(const nlohmann::json& j);

}  // namespace snapsynth
