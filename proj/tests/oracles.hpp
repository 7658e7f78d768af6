#pragma once

// Independent oracles used by the tests. Everything here is computed from
// first principles (bitstring enumeration, 2x2 arithmetic, superoperator
// eigendecomposition) without touching the implementation paths it checks.

#include <bit>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "multicat/spin_ops.hpp"

namespace oracles {

using multicat::Complex;
using multicat::Matrix;
using multicat::Vector;

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

// Dicke basis vector |D_d> expanded over bitstrings.
inline Vector dicke_basis_vector(int num_spins, int d) {
  const int dim = 1 << num_spins;
  Vector v = Vector::Zero(dim);
  for (int b = 0; b < dim; ++b) {
    if (std::popcount(static_cast<unsigned>(b)) == d) v(b) = 1.0;
  }
  return v / std::sqrt(binomial(num_spins, d));
}

// Projection of a full-tensor state onto the Dicke basis by explicit inner
// products with the basis vectors above.
inline Vector project_to_dicke(const Vector& psi, int num_spins) {
  Vector out(num_spins + 1);
  for (int d = 0; d <= num_spins; ++d) out(d) = dicke_basis_vector(num_spins, d).dot(psi);
  return out;
}

// Random state inside the symmetric subspace, assembled from explicit Dicke
// basis vectors.
inline Vector random_symmetric_state(int num_spins, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Vector psi = Vector::Zero(1 << num_spins);
  for (int d = 0; d <= num_spins; ++d) {
    psi += Complex{normal(gen), normal(gen)} * dicke_basis_vector(num_spins, d);
  }
  return psi / psi.norm();
}

// Single-spin outcome probability for M = 1, phi = 0:
// T_s |+> = (e^{-i a} + i s e^{i a})/2 |+>, so P(s) = (1 - s sin 2a)/2.
inline double m1_outcome_probability(double alpha, int s) {
  return 0.5 * (1.0 - s * std::sin(2.0 * alpha));
}

// Superoperator of -i phid [Jz, .] + g D[Jx] on the symmetric subspace,
// column-major vec convention: vec(A rho B) = (B^T kron A) vec(rho).
inline Eigen::MatrixXcd lindblad_superoperator(const Matrix& jz, const Matrix& jx, double phid,
                                               double g) {
  const auto dim = jz.rows();
  const Matrix id = Matrix::Identity(dim, dim);
  const Matrix jx2 = jx * jx;
  const Complex i{0.0, 1.0};
  return -i * phid *
             (Eigen::kroneckerProduct(id, jz) - Eigen::kroneckerProduct(jz.transpose(), id)) +
         g * (Eigen::kroneckerProduct(jx.transpose(), jx) -
              0.5 * Eigen::kroneckerProduct(id, jx2) -
              0.5 * Eigen::kroneckerProduct(jx2.transpose(), id));
}

// Slowest nonzero relaxation rate (most positive nonzero real part).
inline double spectral_gap(const Eigen::MatrixXcd& superop) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(superop);
  double gap = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double re = solver.eigenvalues()(i).real();
    if (re < -1e-12) gap = std::max(gap, re);
  }
  return -gap;
}

} // namespace oracles
