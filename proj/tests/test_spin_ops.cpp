#include <doctest.h>

#include <random>

#include "multicat/spin_ops.hpp"
#include "oracles.hpp"

using namespace multicat;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_SUITE("spin_ops") {

TEST_CASE("collective operators: pinned small cases") {
  const Matrix jz1 = collective_op(Axis::Z, 1, Repr::FullTensor);
  CHECK(jz1(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(jz1(1, 1).real() == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(max_abs(jz1 - jz1.adjoint()) < tol::hermiticity);

  const Matrix jz2 = collective_op(Axis::Z, 2, Repr::Dicke);
  CHECK(jz2(0, 0).real() == doctest::Approx(1.0));
  CHECK(jz2(1, 1).real() == doctest::Approx(0.0));
  CHECK(jz2(2, 2).real() == doctest::Approx(-1.0));

  const Matrix jx3 = collective_op(Axis::X, 3, Repr::FullTensor);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(jx3);
  CHECK(solver.eigenvalues().maxCoeff() == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("angular momentum algebra [Jx, Jy] = i Jz in both representations") {
  for (int m = 1; m <= 6; ++m) {
    for (Repr repr : {Repr::FullTensor, Repr::Dicke}) {
      const Matrix jx = collective_op(Axis::X, m, repr);
      const Matrix jy = collective_op(Axis::Y, m, repr);
      const Matrix jz = collective_op(Axis::Z, m, repr);
      CHECK(max_abs(jx * jy - jy * jx - imag_unit * jz) < 1e-10);
    }
  }
}

TEST_CASE("scs_state: pinned examples and unit norm") {
  const StateVector plus2 = scs_state({0.5 * M_PI, 0.0}, 2, Repr::FullTensor);
  for (int b = 0; b < 4; ++b) CHECK(std::abs(plus2.amps(b) - 0.5) < 1e-13);

  const StateVector up3 = scs_state({0.0, 0.0}, 3, Repr::Dicke);
  CHECK(std::abs(up3.amps(0) - 1.0) < 1e-14);
  for (int d = 1; d <= 3; ++d) CHECK(std::abs(up3.amps(d)) < 1e-14);

  // Dicke amplitudes of |+>x|+> against the explicit projection oracle.
  const StateVector plus2_dicke = scs_state({0.5 * M_PI, 0.0}, 2, Repr::Dicke);
  const Vector expected = oracles::project_to_dicke(plus2.amps, 2);
  CHECK((plus2_dicke.amps - expected).norm() < 1e-13);
  CHECK(plus2_dicke.amps(1).real() == doctest::Approx(M_SQRT1_2).epsilon(1e-13));

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> theta(0.0, M_PI), phi(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 25; ++trial) {
    const SCSParams p{theta(gen), phi(gen)};
    for (Repr repr : {Repr::FullTensor, Repr::Dicke}) {
      CHECK(std::abs(scs_state(p, 4, repr).norm() - 1.0) < tol::scs_norm);
    }
  }

  CHECK_THROWS_AS(scs_state({-0.1, 0.0}, 2, Repr::Dicke), std::invalid_argument);
}

TEST_CASE("expectation: pinned values and Hermitian reality") {
  const StateVector plus2 = scs_state({0.5 * M_PI, 0.0}, 2, Repr::FullTensor);
  const Matrix jz = collective_op(Axis::Z, 2, Repr::FullTensor);
  CHECK(std::abs(expectation(plus2, jz)) < 1e-14);

  const StateVector up3 = scs_state({0.0, 0.0}, 3, Repr::FullTensor);
  const Matrix jz3 = collective_op(Axis::Z, 3, Repr::FullTensor);
  CHECK(expectation(up3, jz3).real() == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(expectation(up3, Matrix(jz3 * jz3)).real() == doctest::Approx(2.25).epsilon(1e-13));

  CHECK_THROWS_AS(expectation(plus2, jz3), std::invalid_argument);

  const auto [m1, m2] = jz_moments(up3);
  CHECK(m1 == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(2.25).epsilon(1e-13));
}

TEST_CASE("dicke_embed: oracle agreement, norm preservation, antisymmetric rejection") {
  const StateVector plus2 = scs_state({0.5 * M_PI, 0.0}, 2, Repr::FullTensor);
  const StateVector embedded = dicke_embed(plus2);
  CHECK(embedded.amps(0).real() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(embedded.amps(1).real() == doctest::Approx(M_SQRT1_2).epsilon(1e-13));
  CHECK(embedded.amps(2).real() == doctest::Approx(0.5).epsilon(1e-13));

  StateVector up4;
  up4.repr = Repr::FullTensor;
  up4.num_spins = 4;
  up4.amps = Vector::Zero(16);
  up4.amps(0) = 1.0;
  const StateVector up4_d = dicke_embed(up4);
  CHECK(std::abs(up4_d.amps(0) - 1.0) < 1e-14);

  std::mt19937_64 gen(11);
  for (int m = 2; m <= 6; ++m) {
    StateVector psi;
    psi.repr = Repr::FullTensor;
    psi.num_spins = m;
    psi.amps = oracles::random_symmetric_state(m, gen);
    const StateVector dicke = dicke_embed(psi);
    CHECK(std::abs(dicke.norm() - psi.norm()) < tol::norm_preservation);
    CHECK((dicke.amps - oracles::project_to_dicke(psi.amps, m)).norm() < 1e-12);
    // round trip
    CHECK(fidelity(dicke_expand(dicke), psi) > 1.0 - 1e-12);
  }

  StateVector singlet;
  singlet.repr = Repr::FullTensor;
  singlet.num_spins = 2;
  singlet.amps = Vector::Zero(4);
  singlet.amps(1) = M_SQRT1_2;
  singlet.amps(2) = -M_SQRT1_2;
  CHECK_THROWS_AS(dicke_embed(singlet), std::invalid_argument);
}

TEST_CASE("collective operators act identically on symmetric states in both representations") {
  std::mt19937_64 gen(23);
  for (int m = 2; m <= 6; ++m) {
    StateVector psi;
    psi.repr = Repr::FullTensor;
    psi.num_spins = m;
    psi.amps = oracles::random_symmetric_state(m, gen);
    for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
      const Matrix full = collective_op(axis, m, Repr::FullTensor);
      const Matrix dicke = collective_op(axis, m, Repr::Dicke);
      StateVector jpsi = psi;
      jpsi.amps = full * psi.amps;
      const Vector lhs = dicke_embed(jpsi).amps;
      const Vector rhs = dicke * dicke_embed(psi).amps;
      CHECK((lhs - rhs).norm() < 1e-9);
    }
  }
}

TEST_CASE("full-tensor cap") {
  Caps caps;
  caps.full_tensor_max_spins = 4;
  CHECK_THROWS_AS(collective_op(Axis::X, 5, Repr::FullTensor, caps), cap_exceeded);
  CHECK_NOTHROW(collective_op(Axis::X, 5, Repr::Dicke, caps));
}

} // TEST_SUITE
