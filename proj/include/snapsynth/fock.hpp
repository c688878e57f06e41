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

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace snapsynth {

using Complex = std::complex<double>;

/** Dense complex matrix on the truncated number basis |0>..|nc-1>. */
using Operator = Eigen::MatrixXcd;

using StateVector = Eigen::VectorXcd;

/** Reduce an angle mod 2*pi into (-pi, pi]. */
double reduce_phase(double phase);

/** Dimension of the truncated number basis. Must be >= 2. */
struct CutoffDim {
  int nc;
  explicit CutoffDim(int nc_);
  bool operator==(const CutoffDim&) const = default;
};

/**
 * Amplitude vector over the truncated number basis.
 *
 * Gates built from truncated generators may leak a small amount of norm
 * at the top of the basis; the norm is expected to stay within
 * [1 - eps_trunc, 1] (default eps_trunc = 1e-6).
 */
class TruncatedState {
 public:
  TruncatedState(StateVector amps, CutoffDim cutoff);

  static TruncatedState basis_state(int n, CutoffDim cutoff);
  static TruncatedState vacuum(CutoffDim cutoff) { return basis_state(0, cutoff); }

  const StateVector& amps() const { return amps_; }
  CutoffDim cutoff() const { return cutoff_; }
  double norm() const { return amps_.norm(); }

 private:
  StateVector amps_;
  CutoffDim cutoff_;
};

/** Annihilation operator: <n-1|a|n> = sqrt(n). */
Operator annihilation_operator(CutoffDim cutoff);

/**
 * Displacement gate D(alpha) = exp(alpha*a^dag - conj(alpha)*a) on the
 * truncated basis.
 *
 * Realized as the exponential of the truncated generator via the
 * eigendecomposition of its Hermitian form, so the result is unitary to
 * machine precision at any cutoff. Matrix elements differ from the
 * analytic (infinite-dimensional) ones only near the top of the basis.
 */
Operator displacement_operator(Complex alpha, CutoffDim cutoff);

/** SNAP gate: diagonal exp(i*theta_n). Levels beyond the vector get phase 0. */
Operator snap_operator(const std::vector<double>& phases, CutoffDim cutoff);

/** R_n(eps) = exp(i*eps*Q_n): SNAP with phase eps on levels 0..n, 0 above. */
Operator r_gate(int n, double eps, CutoffDim cutoff);

/** p = -i(a^dag - a), generator of real displacements. */
Operator momentum_generator(CutoffDim cutoff);

/** Q_n = sum_{n'<=n} |n'><n'|. */
Operator projector_q(int n, CutoffDim cutoff);

/** J_n = sqrt(n+1)(|n><n+1| + |n+1><n|), from the closed form. */
Operator coupling_j(int n, CutoffDim cutoff);

/** Group commutator D(eps) R_n(eps) D(-eps) R_n(-eps) ~ exp(i*J_n*eps^2). */
Operator group_commutator(int n, double eps, CutoffDim cutoff);

/** |<a|b>| -- global-phase invariant overlap. */
double state_fidelity(const TruncatedState& a, const TruncatedState& b);

/** F_unitary = |Tr(u^dag u_ideal)| / nc (full-trace mode). */
double unitary_fidelity(const Operator& u, const Operator& u_ideal);

/** Trace restricted to the top-left d x d block, divided by d. */
double unitary_fidelity_block(const Operator& u, const Operator& u_ideal, int d);

/**
 * Cached eigenbasis of the real-displacement generator at a fixed cutoff.
 *
 * For real r, D(r) = V diag(exp(i*r*lambda)) V^dag with (V, lambda)
 * independent of r, so one decomposition serves every real displacement
 * at this cutoff. This is the workhorse of all optimization loops.
 */
class RealDisplacementBasis {
 public:
  explicit RealDisplacementBasis(CutoffDim cutoff);

  CutoffDim cutoff() const { return cutoff_; }
  Operator displacement(double r) const;
  StateVector apply(double r, const StateVector& psi) const;

 private:
  CutoffDim cutoff_;
  Eigen::VectorXd eigvals_;
  Eigen::MatrixXcd eigvecs_;
};

}  // namespace snapsynth
