#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "multicat/constants.hpp"

namespace multicat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex imag_unit{0.0, 1.0};

// State representations.
//
// FullTensor: 2^M amplitudes; spin k occupies tensor slot k big-endian, so
// the bit of spin k inside basis index b is (b >> (M-1-k)) & 1, with bit
// value 0 meaning |0> = spin up (+z).
//
// Dicke: M+1 amplitudes on the fully symmetric subspace with total spin
// J = M/2, ordered m = J, J-1, ..., -J; index 0 is the all-up state.
enum class Repr { FullTensor, Dicke };

enum class Axis { X, Y, Z };

struct StateVector {
  Repr repr = Repr::FullTensor;
  int num_spins = 0;
  Vector amps;

  int dim() const { return static_cast<int>(amps.size()); }
  double norm() const { return amps.norm(); }
  double squared_norm() const { return amps.squaredNorm(); }
};

// Bloch angles of a spin coherent state cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
struct SCSParams {
  double theta = 0.0;       // [0, pi]
  double phi_azimuth = 0.0; // [0, 2 pi)
};

int state_dim(Repr repr, int num_spins);
void check_full_tensor_cap(int num_spins, const Caps& caps);

Eigen::Matrix2cd pauli(Axis axis);

// J_axis = (1/2) sum_k sigma_axis^{(k)} in the requested representation.
// Dicke uses the standard spin-J angular momentum matrices with J = M/2.
Matrix collective_op(Axis axis, int num_spins, Repr repr, const Caps& caps = {});

// Normalized product state |theta, phi>^{tensor M}. Dicke amplitudes follow
// the binomial expansion sqrt(C(M,d)) cos^{M-d}(theta/2) (e^{i phi} sin(theta/2))^d.
StateVector scs_state(const SCSParams& params, int num_spins, Repr repr,
                      const Caps& caps = {});

// <psi|Op|psi> without normalization; the caller divides by the squared norm
// when an expectation value over an unnormalized conditional state is wanted.
Complex expectation(const StateVector& state, const Matrix& op);

// <Jz> and <Jz^2> in the state as given (unnormalized inner forms). Both
// representations are diagonal in Jz, so this is O(dim) and never builds a
// matrix.
std::pair<double, double> jz_moments(const StateVector& state);

// Projection of a permutation-symmetric full-tensor state onto the Dicke
// basis. Throws std::invalid_argument when the residual outside the
// symmetric subspace exceeds tol::symmetric_residual.
StateVector dicke_embed(const StateVector& state);

// Inverse embedding: expand an (M+1)-amplitude Dicke state into the 2^M
// full-tensor space.
StateVector dicke_expand(const StateVector& state, const Caps& caps = {});

double fidelity(const StateVector& a, const StateVector& b);

} // namespace multicat
