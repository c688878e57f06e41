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

#include "snapsynth/fock.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace snapsynth {

namespace {
constexpr double kPi = std::numbers::pi;
}

double reduce_phase(double phase) {
  if (!std::isfinite(phase)) {
    throw std::invalid_argument("snap phase must be finite");
  }
  double p = std::fmod(phase, 2.0 * kPi);
  if (p <= -kPi) p += 2.0 * kPi;
  if (p > kPi) p -= 2.0 * kPi;
  return p;
}

CutoffDim::CutoffDim(int nc_) : nc(nc_) {
  if (nc < 2) {
    throw std::invalid_argument("cutoff dimension must be >= 2, got " +
                                std::to_string(nc));
  }
}

TruncatedState::TruncatedState(StateVector amps, CutoffDim cutoff)
    : amps_(std::move(amps)), cutoff_(cutoff) {
  if (amps_.size() != cutoff_.nc) {
    throw std::invalid_argument("amplitude vector length does not match cutoff");
  }
  if (!amps_.allFinite()) {
    throw std::invalid_argument("state amplitudes must be finite");
  }
}

TruncatedState TruncatedState::basis_state(int n, CutoffDim cutoff) {
  if (n < 0 || n >= cutoff.nc) {
    throw std::invalid_argument("basis state index out of range");
  }
  StateVector v = StateVector::Zero(cutoff.nc);
  v(n) = 1.0;
  return TruncatedState(std::move(v), cutoff);
}

Operator annihilation_operator(CutoffDim cutoff) {
  Operator a = Operator::Zero(cutoff.nc, cutoff.nc);
  for (int n = 1; n < cutoff.nc; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

Operator displacement_operator(Complex alpha, CutoffDim cutoff) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw std::invalid_argument("displacement amplitude must be finite");
  }
  const Operator a = annihilation_operator(cutoff);
  // G = alpha a^dag - conj(alpha) a is skew-Hermitian; exp(G) = exp(i H)
  // with H = -iG Hermitian.
  const Operator h = Complex(0, -1) * (alpha * a.adjoint() - std::conj(alpha) * a);
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  const Eigen::VectorXcd phases =
      (Complex(0, 1) * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Operator snap_operator(const std::vector<double>& phases, CutoffDim cutoff) {
  if (static_cast<int>(phases.size()) > cutoff.nc) {
    throw std::invalid_argument("snap phase vector longer than cutoff");
  }
  Operator s = Operator::Identity(cutoff.nc, cutoff.nc);
  for (std::size_t n = 0; n < phases.size(); ++n) {
    s(n, n) = std::exp(Complex(0, phases[n]));
  }
  return s;
}

Operator r_gate(int n, double eps, CutoffDim cutoff) {
  if (n < 0 || n >= cutoff.nc) {
    throw std::invalid_argument("r_gate level out of range");
  }
  return snap_operator(std::vector<double>(n + 1, eps), cutoff);
}

Operator momentum_generator(CutoffDim cutoff) {
  const Operator a = annihilation_operator(cutoff);
  return Complex(0, -1) * (a.adjoint() - a);
}

Operator projector_q(int n, CutoffDim cutoff) {
  if (n < 0 || n >= cutoff.nc) {
    throw std::invalid_argument("projector_q level out of range");
  }
  Operator q = Operator::Zero(cutoff.nc, cutoff.nc);
  for (int i = 0; i <= n; ++i) q(i, i) = 1.0;
  return q;
}

Operator coupling_j(int n, CutoffDim cutoff) {
  if (n < 0 || n >= cutoff.nc - 1) {
    throw std::invalid_argument("coupling_j level out of range");
  }
  Operator j = Operator::Zero(cutoff.nc, cutoff.nc);
  const double c = std::sqrt(static_cast<double>(n + 1));
  j(n, n + 1) = c;
  j(n + 1, n) = c;
  return j;
}

Operator group_commutator(int n, double eps, CutoffDim cutoff) {
  if (n < 0 || n >= cutoff.nc - 1) {
    throw std::invalid_argument("group_commutator level out of range");
  }
  return displacement_operator(eps, cutoff) * r_gate(n, eps, cutoff) *
         displacement_operator(-eps, cutoff) * r_gate(n, -eps, cutoff);
}

double state_fidelity(const TruncatedState& a, const TruncatedState& b) {
  if (!(a.cutoff() == b.cutoff())) {
    throw std::invalid_argument("state_fidelity requires equal cutoffs");
  }
  return std::abs(a.amps().dot(b.amps()));
}

double unitary_fidelity(const Operator& u, const Operator& u_ideal) {
  if (u.rows() != u_ideal.rows() || u.cols() != u_ideal.cols() ||
      u.rows() != u.cols()) {
    throw std::invalid_argument("unitary_fidelity requires equal square dimensions");
  }
  const double nc = static_cast<double>(u.rows());
  return std::abs((u.adjoint() * u_ideal).trace()) / nc;
}

double unitary_fidelity_block(const Operator& u, const Operator& u_ideal, int d) {
  if (u.rows() != u_ideal.rows() || u.cols() != u_ideal.cols() ||
      u.rows() != u.cols()) {
    throw std::invalid_argument("unitary_fidelity requires equal square dimensions");
  }
  if (d < 1 || d > u.rows()) {
    throw std::invalid_argument("block dimension out of range");
  }
  const Complex tr =
      (u.topLeftCorner(d, d).adjoint() * u_ideal.topLeftCorner(d, d)).trace();
  return std::abs(tr) / static_cast<double>(d);
}

RealDisplacementBasis::RealDisplacementBasis(CutoffDim cutoff) : cutoff_(cutoff) {
  const Operator a = annihilation_operator(cutoff);
  const Operator h = Complex(0, -1) * (a.adjoint() - a);
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  eigvals_ = es.eigenvalues();
  eigvecs_ = es.eigenvectors();
}

Operator RealDisplacementBasis::displacement(double r) const {
  const Eigen::VectorXcd phases =
      (Complex(0, r) * eigvals_.cast<Complex>()).array().exp();
  return eigvecs_ * phases.asDiagonal() * eigvecs_.adjoint();
}

StateVector RealDisplacementBasis::apply(double r, const StateVector& psi) const {
  const Eigen::VectorXcd phases =
      (Complex(0, r) * eigvals_.cast<Complex>()).array().exp();
  return eigvecs_ * phases.cwiseProduct(eigvecs_.adjoint() * psi);
}

}  // namespace snapsynth
