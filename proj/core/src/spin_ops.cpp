#include "multicat/spin_ops.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace multicat {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

// m-eigenvalue of Jz for Dicke index i (index 0 = all up).
double dicke_m(int num_spins, int i) { return 0.5 * num_spins - i; }

// Jz eigenvalue of full-tensor basis state b: (M - 2 popcount) / 2.
double full_m(int num_spins, std::uint64_t b) {
  return 0.5 * (num_spins - 2 * std::popcount(b));
}

} // namespace

int state_dim(Repr repr, int num_spins) {
  return repr == Repr::Dicke ? num_spins + 1 : 1 << num_spins;
}

void check_full_tensor_cap(int num_spins, const Caps& caps) {
  if (num_spins > caps.full_tensor_max_spins) {
    throw cap_exceeded("full-tensor representation needs 2^" + std::to_string(num_spins) +
                       " amplitudes, above the cap M <= " +
                       std::to_string(caps.full_tensor_max_spins));
  }
}

Eigen::Matrix2cd pauli(Axis axis) {
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  switch (axis) {
    case Axis::X: s(0, 1) = 1.0; s(1, 0) = 1.0; break;
    case Axis::Y: s(0, 1) = -imag_unit; s(1, 0) = imag_unit; break;
    case Axis::Z: s(0, 0) = 1.0; s(1, 1) = -1.0; break;
  }
  return s;
}

Matrix collective_op(Axis axis, int num_spins, Repr repr, const Caps& caps) {
  if (num_spins < 1) throw std::invalid_argument("collective_op: M >= 1 required");

  if (repr == Repr::Dicke) {
    const int dim = num_spins + 1;
    const double j = 0.5 * num_spins;
    Matrix op = Matrix::Zero(dim, dim);
    if (axis == Axis::Z) {
      for (int i = 0; i < dim; ++i) op(i, i) = dicke_m(num_spins, i);
      return op;
    }
    // J+ |j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>; raising lowers the index.
    for (int i = 1; i < dim; ++i) {
      const double m = dicke_m(num_spins, i);
      const double c = std::sqrt(j * (j + 1) - m * (m + 1));
      if (axis == Axis::X) {
        op(i - 1, i) += 0.5 * c;
        op(i, i - 1) += 0.5 * c;
      } else {
        op(i - 1, i) += -0.5 * imag_unit * c;
        op(i, i - 1) += 0.5 * imag_unit * c;
      }
    }
    return op;
  }

  check_full_tensor_cap(num_spins, caps);
  const int dim = 1 << num_spins;
  Matrix op = Matrix::Zero(dim, dim);
  if (axis == Axis::Z) {
    for (int b = 0; b < dim; ++b) op(b, b) = full_m(num_spins, static_cast<std::uint64_t>(b));
    return op;
  }
  const Eigen::Matrix2cd s = pauli(axis);
  for (int k = 0; k < num_spins; ++k) {
    const int mask = 1 << (num_spins - 1 - k);
    for (int b = 0; b < dim; ++b) {
      const int bit = (b & mask) ? 1 : 0;
      // sigma_x, sigma_y only flip the spin-k bit; other bits untouched.
      op(b ^ mask, b) += 0.5 * s(1 - bit, bit);
    }
  }
  return op;
}

StateVector scs_state(const SCSParams& params, int num_spins, Repr repr, const Caps& caps) {
  if (num_spins < 1) throw std::invalid_argument("scs_state: M >= 1 required");
  if (!(params.theta >= 0.0 && params.theta <= M_PI) || !std::isfinite(params.phi_azimuth)) {
    throw std::invalid_argument("scs_state: theta must lie in [0, pi], phi finite");
  }
  const double c = std::cos(0.5 * params.theta);
  const Complex s = std::exp(imag_unit * params.phi_azimuth) * std::sin(0.5 * params.theta);

  // Power tables built by iteration; std::pow on complex zero is not safe.
  std::vector<double> c_pow(num_spins + 1, 1.0);
  std::vector<Complex> s_pow(num_spins + 1, Complex{1.0, 0.0});
  for (int d = 1; d <= num_spins; ++d) {
    c_pow[d] = c_pow[d - 1] * c;
    s_pow[d] = s_pow[d - 1] * s;
  }

  StateVector state;
  state.repr = repr;
  state.num_spins = num_spins;

  if (repr == Repr::Dicke) {
    state.amps = Vector::Zero(num_spins + 1);
    for (int d = 0; d <= num_spins; ++d) {
      state.amps(d) = std::sqrt(binomial(num_spins, d)) * c_pow[num_spins - d] * s_pow[d];
    }
    return state;
  }

  check_full_tensor_cap(num_spins, caps);
  const int dim = 1 << num_spins;
  state.amps = Vector::Zero(dim);
  for (int b = 0; b < dim; ++b) {
    const int d = std::popcount(static_cast<unsigned>(b));
    state.amps(b) = c_pow[num_spins - d] * s_pow[d];
  }
  return state;
}

Complex expectation(const StateVector& state, const Matrix& op) {
  if (op.rows() != state.dim() || op.cols() != state.dim()) {
    throw std::invalid_argument("expectation: operator/state dimension mismatch");
  }
  return state.amps.dot(op * state.amps);
}

std::pair<double, double> jz_moments(const StateVector& state) {
  double m1 = 0.0;
  double m2 = 0.0;
  const int dim = state.dim();
  for (int i = 0; i < dim; ++i) {
    const double m = state.repr == Repr::Dicke
                         ? dicke_m(state.num_spins, i)
                         : full_m(state.num_spins, static_cast<std::uint64_t>(i));
    const double w = std::norm(state.amps(i));
    m1 += w * m;
    m2 += w * m * m;
  }
  return {m1, m2};
}

StateVector dicke_embed(const StateVector& state) {
  if (state.repr != Repr::FullTensor) {
    throw std::invalid_argument("dicke_embed: expects a full-tensor state");
  }
  const int num_spins = state.num_spins;
  const int dim = state.dim();

  StateVector out;
  out.repr = Repr::Dicke;
  out.num_spins = num_spins;
  out.amps = Vector::Zero(num_spins + 1);

  // c_d = <D_d|psi> with |D_d> the normalized sum over all weight-d strings.
  std::vector<Complex> sums(num_spins + 1, Complex{0.0, 0.0});
  for (int b = 0; b < dim; ++b) {
    sums[std::popcount(static_cast<unsigned>(b))] += state.amps(b);
  }
  for (int d = 0; d <= num_spins; ++d) {
    out.amps(d) = sums[d] / std::sqrt(binomial(num_spins, d));
  }
  // Residual measured componentwise against the projection; a plain norm
  // difference would lose half the digits to cancellation.
  double residual_sq = 0.0;
  for (int b = 0; b < dim; ++b) {
    const int d = std::popcount(static_cast<unsigned>(b));
    residual_sq += std::norm(state.amps(b) - out.amps(d) / std::sqrt(binomial(num_spins, d)));
  }
  const double scale = std::max(1.0, state.norm());
  if (std::sqrt(residual_sq) > tol::symmetric_residual * scale) {
    throw std::invalid_argument(
        "dicke_embed: state has weight outside the symmetric subspace (residual " +
        std::to_string(std::sqrt(residual_sq)) + ")");
  }
  return out;
}

StateVector dicke_expand(const StateVector& state, const Caps& caps) {
  if (state.repr != Repr::Dicke) {
    throw std::invalid_argument("dicke_expand: expects a Dicke state");
  }
  const int num_spins = state.num_spins;
  check_full_tensor_cap(num_spins, caps);

  StateVector out;
  out.repr = Repr::FullTensor;
  out.num_spins = num_spins;
  out.amps = Vector::Zero(1 << num_spins);
  for (int b = 0; b < out.dim(); ++b) {
    const int d = std::popcount(static_cast<unsigned>(b));
    out.amps(b) = state.amps(d) / std::sqrt(binomial(num_spins, d));
  }
  return out;
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.repr != b.repr || a.dim() != b.dim()) {
    throw std::invalid_argument("fidelity: representation/dimension mismatch");
  }
  const double na = a.squared_norm();
  const double nb = b.squared_norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::norm(a.amps.dot(b.amps)) / (na * nb);
}

} // namespace multicat
