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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "snapsynth/fock.hpp"

using namespace snapsynth;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const Operator& m) { return m.cwiseAbs().maxCoeff(); }

double unitarity_defect(const Operator& u) {
  return max_abs(u.adjoint() * u - Operator::Identity(u.rows(), u.cols()));
}

// closed-form coherent amplitudes <n|alpha> = e^{-|a|^2/2} a^n / sqrt(n!)
Eigen::VectorXcd coherent_amps(Complex alpha, int nc) {
  Eigen::VectorXcd c(nc);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < nc; ++n) {
    c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  }
  return c;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Complex random_alpha(std::mt19937_64& rng, double max_mag) {
  const double mag = max_mag * std::sqrt(uniform01(rng));
  const double ang = 2.0 * kPi * uniform01(rng);
  return std::polar(mag, ang);
}

}  // namespace

TEST_CASE("cutoff dimension validation") {
  CHECK_THROWS_AS(CutoffDim(1), std::invalid_argument);
  CHECK_THROWS_AS(CutoffDim(0), std::invalid_argument);
  CHECK_THROWS_AS(CutoffDim(-3), std::invalid_argument);
  CHECK(CutoffDim(2).nc == 2);
}

TEST_CASE("reduce_phase lands in (-pi, pi]") {
  CHECK(reduce_phase(0.0) == 0.0);
  CHECK(reduce_phase(kPi) == doctest::Approx(kPi));
  CHECK(reduce_phase(-kPi) == doctest::Approx(kPi));
  CHECK(reduce_phase(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
  CHECK(reduce_phase(2.0 * kPi) == doctest::Approx(0.0));
  CHECK(reduce_phase(-7.5 * kPi) == doctest::Approx(0.5 * kPi));
  CHECK_THROWS_AS(reduce_phase(std::nan("")), std::invalid_argument);
}

TEST_CASE("truncated state construction") {
  const CutoffDim nc(4);
  CHECK(TruncatedState::basis_state(2, nc).amps()(2) == Complex(1, 0));
  CHECK(TruncatedState::vacuum(nc).norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(TruncatedState::basis_state(4, nc), std::invalid_argument);
  StateVector bad = StateVector::Zero(4);
  bad(0) = Complex(std::nan(""), 0);
  CHECK_THROWS_AS(TruncatedState(bad, nc), std::invalid_argument);
  CHECK_THROWS_AS(TruncatedState(StateVector::Zero(3), nc), std::invalid_argument);
}

TEST_CASE("displacement operator basics") {
  const CutoffDim nc(40);

  SUBCASE("zero displacement is the identity") {
    CHECK(max_abs(displacement_operator(0.0, nc) - Operator::Identity(40, 40)) <
          1e-14);
  }
  SUBCASE("vacuum overlap matches the coherent closed form") {
    const Operator d = displacement_operator(1.0, nc);
    CHECK(std::abs(std::abs(d(0, 0)) - std::exp(-0.5)) < 1e-10);
  }
  SUBCASE("level-4 population of D(2)|0> is the Poisson weight") {
    const Operator d = displacement_operator(2.0, nc);
    const double poisson = std::exp(-4.0) * std::pow(4.0, 4) / 24.0;
    CHECK(std::abs(std::norm(d(4, 0)) - poisson) < 1e-8);
  }
  SUBCASE("non-finite amplitude is rejected") {
    CHECK_THROWS_AS(displacement_operator(Complex(std::nan(""), 0), nc),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        displacement_operator(
            Complex(0, std::numeric_limits<double>::infinity()), nc),
        std::invalid_argument);
  }
  SUBCASE("unitary to machine precision at any cutoff") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
      const Complex alpha = random_alpha(rng, 2.0);
      CHECK(unitarity_defect(displacement_operator(alpha, nc)) < 1e-10);
      CHECK(unitarity_defect(displacement_operator(alpha, CutoffDim(7))) < 1e-10);
    }
  }
}

TEST_CASE("snap operator") {
  SUBCASE("zero phases give the identity") {
    CHECK(max_abs(snap_operator({0, 0, 0}, CutoffDim(5)) -
                  Operator::Identity(5, 5)) == 0.0);
  }
  SUBCASE("[pi, pi] at nc=4 equals diag(-1,-1,1,1)") {
    const Operator s = snap_operator({kPi, kPi}, CutoffDim(4));
    Operator want = Operator::Identity(4, 4);
    want(0, 0) = -1;
    want(1, 1) = -1;
    CHECK(max_abs(s - want) < 1e-15);
  }
  SUBCASE("phases [0, theta] act only on level 1") {
    const double theta = 0.7;
    const Operator s = snap_operator({0.0, theta}, CutoffDim(4));
    StateVector psi = StateVector::Zero(4);
    psi(0) = 0.5;
    psi(1) = 0.5;
    psi(2) = std::sqrt(0.5);
    const StateVector out = s * psi;
    CHECK(out(0) == psi(0));
    CHECK(std::abs(out(1) - psi(1) * std::exp(Complex(0, theta))) < 1e-15);
    CHECK(out(2) == psi(2));
  }
  SUBCASE("phase vector longer than the cutoff is rejected") {
    CHECK_THROWS_AS(snap_operator(std::vector<double>(5, 0.1), CutoffDim(4)),
                    std::invalid_argument);
  }
  SUBCASE("snap preserves excitation populations") {
    std::mt19937_64 rng(11);
    const CutoffDim nc(12);
    for (int rep = 0; rep < 25; ++rep) {
      StateVector psi(12);
      std::vector<double> phases(12);
      for (int n = 0; n < 12; ++n) {
        psi(n) = Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
        phases[n] = 8.0 * (uniform01(rng) - 0.5);
      }
      psi.normalize();
      const StateVector out = snap_operator(phases, nc) * psi;
      for (int n = 0; n < 12; ++n) {
        CHECK(std::abs(std::abs(out(n)) - std::abs(psi(n))) < 1e-12);
      }
    }
  }
}

TEST_CASE("r gate") {
  const CutoffDim nc(3);
  CHECK(max_abs(r_gate(1, 0.0, nc) - Operator::Identity(3, 3)) == 0.0);

  Operator want = Operator::Identity(3, 3);
  want(0, 0) = -1;
  CHECK(max_abs(r_gate(0, kPi, nc) - want) < 1e-15);

  SUBCASE("equals a snap with a constant phase head") {
    const CutoffDim big(9);
    CHECK(max_abs(r_gate(3, 0.4, big) -
                  snap_operator(std::vector<double>(4, 0.4), big)) == 0.0);
  }
  SUBCASE("r(n,eps) r(n,-eps) is exactly the identity") {
    const CutoffDim big(9);
    CHECK(max_abs(r_gate(2, 1.3, big) * r_gate(2, -1.3, big) -
                  Operator::Identity(9, 9)) < 1e-16);
  }
  CHECK_THROWS_AS(r_gate(3, 0.1, nc), std::invalid_argument);
}

TEST_CASE("universality generators") {
  const CutoffDim nc(12);

  SUBCASE("coupling closed form") {
    const Operator j0 = coupling_j(0, nc);
    CHECK(j0(0, 1) == Complex(1, 0));
    CHECK(j0(1, 0) == Complex(1, 0));
    CHECK(max_abs(j0) == 1.0);

    const Operator j3 = coupling_j(3, nc);
    CHECK(j3(3, 4) == Complex(2, 0));
    CHECK(j3(4, 3) == Complex(2, 0));
  }
  SUBCASE("commutator identity i[p, Q_n] = J_n") {
    const Operator p = momentum_generator(nc);
    for (int n = 0; n < nc.nc - 1; ++n) {
      const Operator q = projector_q(n, nc);
      const Operator comm = Complex(0, 1) * (p * q - q * p);
      CHECK(max_abs(comm - coupling_j(n, nc)) < 1e-12);
    }
  }
  SUBCASE("index range checks") {
    CHECK_THROWS_AS(projector_q(12, nc), std::invalid_argument);
    CHECK_THROWS_AS(coupling_j(11, nc), std::invalid_argument);
  }
}

TEST_CASE("group commutator") {
  const CutoffDim nc(40);

  SUBCASE("eps=0 gives the identity") {
    CHECK(max_abs(group_commutator(1, 0.0, nc) - Operator::Identity(40, 40)) <
          1e-14);
  }
  SUBCASE("third-order error scaling at n=1") {
    auto err = [&](double eps) {
      // exp(i J_1 eps^2) has a closed 2x2 form on levels {1,2}
      Operator want = Operator::Identity(40, 40);
      const double x = std::sqrt(2.0) * eps * eps;
      want(1, 1) = std::cos(x);
      want(2, 2) = std::cos(x);
      want(1, 2) = Complex(0, 1) * std::sin(x);
      want(2, 1) = Complex(0, 1) * std::sin(x);
      return max_abs(group_commutator(1, eps, nc) - want);
    };
    const double ratio = err(0.1) / err(0.05);
    CHECK(ratio > 6.0);
    CHECK(ratio < 10.0);
  }
  SUBCASE("small-eps expansion of the top block at n=0") {
    const double eps = 0.1;
    const Operator gc = group_commutator(0, eps, nc);
    Operator series = Operator::Identity(40, 40);
    series += Complex(0, eps * eps) * coupling_j(0, nc);
    CHECK((gc - series).topLeftCorner(2, 2).cwiseAbs().maxCoeff() <
          5.0 * eps * eps * eps);
  }
}

TEST_CASE("state fidelity") {
  const CutoffDim nc(40);
  const TruncatedState zero = TruncatedState::vacuum(nc);
  const TruncatedState one = TruncatedState::basis_state(1, nc);
  CHECK(state_fidelity(zero, zero) == doctest::Approx(1.0));
  CHECK(state_fidelity(zero, one) == doctest::Approx(0.0));

  SUBCASE("coherent overlap against the closed form") {
    const StateVector disp = displacement_operator(1.0, nc).col(0);
    const double f = state_fidelity(zero, TruncatedState(disp, nc));
    CHECK(std::abs(f - std::exp(-0.5)) < 1e-9);
  }
  SUBCASE("global phase invariance") {
    const StateVector rot = std::exp(Complex(0, 1.2)) * one.amps();
    CHECK(state_fidelity(one, TruncatedState(rot, nc)) == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(state_fidelity(zero, TruncatedState::vacuum(CutoffDim(8))),
                  std::invalid_argument);
}

TEST_CASE("unitary fidelity") {
  const Operator id = Operator::Identity(10, 10);
  CHECK(unitary_fidelity(id, id) == doctest::Approx(1.0));

  SUBCASE("phase invariance of |Tr|") {
    const Operator u = std::exp(Complex(0, 0.9)) * id;
    CHECK(unitary_fidelity(u, id) == doctest::Approx(1.0));
  }
  SUBCASE("single flipped diagonal entry at nc=10 gives 0.8") {
    Operator u = id;
    u(0, 0) = -1;
    CHECK(unitary_fidelity(u, id) == doctest::Approx(0.8));
  }
  SUBCASE("block mode restricts the trace") {
    Operator u = id;
    u(9, 9) = -1;  // outside a d=4 block
    CHECK(unitary_fidelity_block(u, id, 4) == doctest::Approx(1.0));
    CHECK(unitary_fidelity(u, id) == doctest::Approx(0.8));
  }
  CHECK_THROWS_AS(unitary_fidelity(id, Operator::Identity(9, 9)),
                  std::invalid_argument);
  CHECK_THROWS_AS(unitary_fidelity_block(id, id, 11), std::invalid_argument);
}

TEST_CASE("displacement composition (BCH) on the stable window") {
  const CutoffDim nc(40);
  const int window = 9;  // intermediate truncation corrupts higher columns
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const Complex a = random_alpha(rng, 2.0);
    const Complex b = random_alpha(rng, 2.0);
    const Operator lhs =
        displacement_operator(a, nc) * displacement_operator(b, nc);
    const Complex phase = std::exp(Complex(0, std::imag(a * std::conj(b))));
    const Operator rhs = phase * displacement_operator(a + b, nc);
    CHECK((lhs - rhs).topLeftCorner(window, window).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("real displacement basis agrees with the direct exponential") {
  const CutoffDim nc(24);
  const RealDisplacementBasis basis(nc);
  for (double r : {-1.7, -0.3, 0.0, 0.4, 2.1}) {
    CHECK(max_abs(basis.displacement(r) - displacement_operator(r, nc)) < 1e-12);
  }
  SUBCASE("apply matches the matrix route") {
    const StateVector psi = coherent_amps(Complex(0.3, 0.4), 24);
    const StateVector via_mat = displacement_operator(0.8, nc) * psi;
    CHECK((basis.apply(0.8, psi) - via_mat).cwiseAbs().maxCoeff() < 1e-12);
  }
}
