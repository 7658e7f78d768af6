#include "multicat/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include <unsupported/Eigen/KroneckerProduct>

#include "multicat/rng.hpp"

namespace multicat {

namespace {

Eigen::Matrix2cd x_rotation(double alpha) {
  // exp(-i alpha sigma_x)
  Eigen::Matrix2cd r;
  r << std::cos(alpha), -imag_unit * std::sin(alpha),
       -imag_unit * std::sin(alpha), std::cos(alpha);
  return r;
}

Eigen::Matrix2cd z_half_rotation(double phi) {
  // exp(-i phi/2 sigma_z)
  Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
  r(0, 0) = std::exp(-imag_unit * (0.5 * phi));
  r(1, 1) = std::exp(imag_unit * (0.5 * phi));
  return r;
}

// In-place application of a 2x2 operator to spin k of a full-tensor state.
void apply_site_op(Vector& amps, const Eigen::Matrix2cd& op, int k, int num_spins) {
  const int stride = 1 << (num_spins - 1 - k);
  const int dim = static_cast<int>(amps.size());
  for (int base = 0; base < dim; base += 2 * stride) {
    for (int i = base; i < base + stride; ++i) {
      const Complex a0 = amps(i);
      const Complex a1 = amps(i + stride);
      amps(i) = op(0, 0) * a0 + op(0, 1) * a1;
      amps(i + stride) = op(1, 0) * a0 + op(1, 1) * a1;
    }
  }
}

Matrix hermitian_exp(const Matrix& h, Complex scale) {
  // exp(scale * h) for Hermitian h via eigendecomposition.
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  const Eigen::VectorXd evals = solver.eigenvalues();
  Vector phases(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i) phases(i) = std::exp(scale * evals(i));
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

StateVector plus_state(int num_spins, Repr repr, const Caps& caps) {
  return scs_state({0.5 * M_PI, 0.0}, num_spins, repr, caps);
}

} // namespace

ProtocolParams ProtocolParams::uniform(int num_spins, double alpha, double phi) {
  ProtocolParams p;
  p.num_spins = num_spins;
  p.phi = phi;
  p.couplings.assign(static_cast<std::size_t>(num_spins), alpha);
  p.validate();
  return p;
}

bool ProtocolParams::symmetric() const {
  return std::all_of(couplings.begin(), couplings.end(),
                     [&](double a) { return a == couplings.front(); });
}

void ProtocolParams::validate() const {
  if (num_spins < 1) throw std::invalid_argument("ProtocolParams: M >= 1 required");
  if (static_cast<int>(couplings.size()) != num_spins) {
    throw std::invalid_argument("ProtocolParams: couplings length must equal M");
  }
  if (!std::isfinite(phi)) throw std::invalid_argument("ProtocolParams: phi must be finite");
  for (double a : couplings) {
    if (!std::isfinite(a)) throw std::invalid_argument("ProtocolParams: couplings must be finite");
  }
}

std::uint64_t MeasurementRecord::to_index() const {
  if (outcomes.size() > 63) {
    throw std::invalid_argument("MeasurementRecord::to_index: record longer than 63 cycles");
  }
  std::uint64_t idx = 0;
  for (int s : outcomes) idx = (idx << 1) | (s == 1 ? 0u : 1u);
  return idx;
}

MeasurementRecord MeasurementRecord::from_index(std::uint64_t index, int cycles) {
  MeasurementRecord rec;
  rec.outcomes.resize(static_cast<std::size_t>(cycles));
  for (int j = 0; j < cycles; ++j) {
    const std::uint64_t bit = (index >> (cycles - 1 - j)) & 1u;
    rec.outcomes[static_cast<std::size_t>(j)] = bit == 0 ? 1 : -1;
  }
  return rec;
}

std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> kraus_single(double alpha, double phi) {
  if (!std::isfinite(alpha) || !std::isfinite(phi)) {
    throw std::invalid_argument("kraus_single: finite inputs required");
  }
  const Eigen::Matrix2cd z = z_half_rotation(phi);
  return {x_rotation(alpha) * z, x_rotation(-alpha) * z};
}

std::pair<Matrix, Matrix> dicke_branch_unitaries(double alpha, double phi, int num_spins) {
  const Matrix jx = collective_op(Axis::X, num_spins, Repr::Dicke);
  const Matrix jz = collective_op(Axis::Z, num_spins, Repr::Dicke);
  const Matrix uz = hermitian_exp(jz, -imag_unit * phi);
  return {hermitian_exp(jx, -imag_unit * (2.0 * alpha)) * uz,
          hermitian_exp(jx, imag_unit * (2.0 * alpha)) * uz};
}

CyclePropagator::CyclePropagator(const ProtocolParams& params, Repr repr, const Caps& caps)
    : repr_(repr), num_spins_(params.num_spins) {
  params.validate();
  if (repr == Repr::Dicke) {
    if (!params.symmetric()) {
      throw std::invalid_argument(
          "Dicke representation requires symmetric couplings");
    }
    std::tie(dicke_u0_, dicke_u1_) =
        dicke_branch_unitaries(params.couplings.front(), params.phi, num_spins_);
    return;
  }
  check_full_tensor_cap(num_spins_, caps);
  site_ops_.reserve(params.couplings.size());
  for (double alpha : params.couplings) site_ops_.push_back(kraus_single(alpha, params.phi));
}

StateVector CyclePropagator::apply(const StateVector& state, int outcome) const {
  if (outcome != 1 && outcome != -1) {
    throw std::invalid_argument("outcome must be +1 or -1");
  }
  if (state.repr != repr_ || state.num_spins != num_spins_) {
    throw std::invalid_argument("CyclePropagator: state representation mismatch");
  }
  const Complex is = imag_unit * static_cast<double>(outcome);

  StateVector out = state;
  if (repr_ == Repr::Dicke) {
    out.amps = 0.5 * (dicke_u0_ * state.amps + is * (dicke_u1_ * state.amps));
    return out;
  }
  Vector branch0 = state.amps;
  Vector branch1 = state.amps;
  for (int k = 0; k < num_spins_; ++k) {
    apply_site_op(branch0, site_ops_[static_cast<std::size_t>(k)].first, k, num_spins_);
    apply_site_op(branch1, site_ops_[static_cast<std::size_t>(k)].second, k, num_spins_);
  }
  out.amps = 0.5 * (branch0 + is * branch1);
  return out;
}

Matrix step_operator(int outcome, const ProtocolParams& params, Repr repr, const Caps& caps) {
  if (outcome != 1 && outcome != -1) {
    throw std::invalid_argument("step_operator: outcome must be +1 or -1");
  }
  params.validate();
  const Complex is = imag_unit * static_cast<double>(outcome);

  if (repr == Repr::Dicke) {
    if (!params.symmetric()) {
      throw std::invalid_argument("Dicke representation requires symmetric couplings");
    }
    const auto [u0, u1] = dicke_branch_unitaries(params.couplings.front(), params.phi,
                                                 params.num_spins);
    return 0.5 * (u0 + is * u1);
  }

  check_full_tensor_cap(params.num_spins, caps);
  Matrix branch0 = Matrix::Identity(1, 1);
  Matrix branch1 = Matrix::Identity(1, 1);
  for (double alpha : params.couplings) {
    const auto [t0, t1] = kraus_single(alpha, params.phi);
    branch0 = Eigen::kroneckerProduct(branch0, t0).eval();
    branch1 = Eigen::kroneckerProduct(branch1, t1).eval();
  }
  return 0.5 * (branch0 + is * branch1);
}

StateVector apply_cycle(const StateVector& state, int outcome, const ProtocolParams& params,
                        const Caps& caps) {
  if (state.dim() != state_dim(state.repr, params.num_spins)) {
    throw std::invalid_argument("apply_cycle: state dimension does not match params");
  }
  return CyclePropagator(params, state.repr, caps).apply(state, outcome);
}

Repr choose_representation(const ProtocolParams& params, const Caps& caps,
                           std::optional<Repr> override) {
  if (override) {
    if (*override == Repr::FullTensor) check_full_tensor_cap(params.num_spins, caps);
    return *override;
  }
  if (params.symmetric()) return Repr::Dicke;
  check_full_tensor_cap(params.num_spins, caps);
  return Repr::FullTensor;
}

TrajectorySample sample_trajectory(const ProtocolParams& params, int cycles, std::uint64_t seed,
                                   std::uint64_t stream, std::optional<Repr> repr_override,
                                   const Caps& caps) {
  if (cycles < 0) throw std::invalid_argument("sample_trajectory: n >= 0 required");
  const Repr repr = choose_representation(params, caps, repr_override);
  CyclePropagator prop(params, repr, caps);

  auto gen = make_stream(seed, stream);

  TrajectorySample sample;
  sample.state = plus_state(params.num_spins, repr, caps);
  sample.log_probability = 0.0;
  sample.record.outcomes.reserve(static_cast<std::size_t>(cycles));

  for (int j = 0; j < cycles; ++j) {
    StateVector plus_branch = prop.apply(sample.state, +1);
    // State is kept normalized, so the squared branch norm is p(s|history).
    double p_plus = std::clamp(plus_branch.squared_norm(), 0.0, 1.0);

    int outcome;
    if (p_plus == 0.0) {
      outcome = -1; // degenerate branch: never selected, no division by zero
    } else if (p_plus == 1.0) {
      outcome = +1;
    } else {
      outcome = uniform01(gen) < p_plus ? +1 : -1;
    }

    StateVector next = outcome == +1 ? std::move(plus_branch) : prop.apply(sample.state, -1);
    const double p = outcome == +1 ? p_plus : 1.0 - p_plus;
    sample.log_probability += std::log(p);
    sample.record.outcomes.push_back(outcome);
    next.amps /= next.norm();
    sample.state = std::move(next);
  }
  sample.probability = std::exp(sample.log_probability);
  return sample;
}

std::vector<TrajectorySample> enumerate_trajectories(const ProtocolParams& params, int cycles,
                                                     std::optional<Repr> repr_override,
                                                     const Caps& caps) {
  if (cycles < 0) throw std::invalid_argument("enumerate_trajectories: n >= 0 required");
  if (cycles > caps.enumerate_max_cycles) {
    throw cap_exceeded("enumerate_trajectories: 2^" + std::to_string(cycles) +
                       " branches, above the cap n <= " +
                       std::to_string(caps.enumerate_max_cycles));
  }
  const Repr repr = choose_representation(params, caps, repr_override);
  CyclePropagator prop(params, repr, caps);

  std::vector<TrajectorySample> out;
  out.reserve(static_cast<std::size_t>(1) << cycles);

  // Depth-first over outcomes, +1 branch first: leaves arrive in canonical
  // record order. States stay unnormalized so leaf squared norms are P(S).
  struct Frame {
    StateVector state;
    MeasurementRecord record;
  };
  auto recurse = [&](auto&& self, const Frame& frame) -> void {
    if (frame.record.cycles() == cycles) {
      TrajectorySample sample;
      sample.record = frame.record;
      sample.probability = frame.state.squared_norm();
      sample.log_probability = std::log(sample.probability);
      sample.state = frame.state;
      if (sample.probability > 0.0) sample.state.amps /= frame.state.norm();
      out.push_back(std::move(sample));
      return;
    }
    for (int outcome : {+1, -1}) {
      Frame next;
      next.state = prop.apply(frame.state, outcome);
      next.record = frame.record;
      next.record.outcomes.push_back(outcome);
      self(self, next);
    }
  };
  recurse(recurse, Frame{plus_state(params.num_spins, repr, caps), {}});
  return out;
}

MulticatDecomposition multicat_decomposition(const MeasurementRecord& record,
                                             const ProtocolParams& params, const Caps& caps) {
  params.validate();
  const int cycles = record.cycles();
  if (cycles > caps.decomposition_max_cycles) {
    throw cap_exceeded("multicat_decomposition: 2^" + std::to_string(cycles) +
                       " branches, above the cap n <= " +
                       std::to_string(caps.decomposition_max_cycles));
  }
  for (int s : record.outcomes) {
    if (s != 1 && s != -1) throw std::invalid_argument("record outcomes must be +1/-1");
  }

  const std::size_t branches = static_cast<std::size_t>(1) << cycles;
  const std::size_t num_spins = static_cast<std::size_t>(params.num_spins);

  MulticatDecomposition dec;
  dec.cycles = cycles;
  dec.weights.resize(branches);
  dec.branch_states.assign(branches, std::vector<Eigen::Vector2cd>(num_spins));
  dec.directions.assign(branches, std::vector<SCSParams>(num_spins));

  std::vector<std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd>> site_ops;
  site_ops.reserve(num_spins);
  for (double alpha : params.couplings) site_ops.push_back(kraus_single(alpha, params.phi));

  const Eigen::Vector2cd plus = (Eigen::Vector2cd() << M_SQRT1_2, M_SQRT1_2).finished();
  const double weight_modulus = std::pow(0.5, cycles);

  for (std::size_t b = 0; b < branches; ++b) {
    // Branch bit i_q for cycle q (1-based) sits at position cycles - q.
    Complex phase{1.0, 0.0};
    for (int q = 1; q <= cycles; ++q) {
      if ((b >> (cycles - q)) & 1u) {
        phase *= imag_unit * static_cast<double>(record.outcomes[static_cast<std::size_t>(q - 1)]);
      }
    }
    dec.weights[b] = weight_modulus * phase;

    for (std::size_t k = 0; k < num_spins; ++k) {
      Eigen::Vector2cd ket = plus;
      for (int q = 1; q <= cycles; ++q) {
        const bool pick_t1 = (b >> (cycles - q)) & 1u;
        ket = (pick_t1 ? site_ops[k].second : site_ops[k].first) * ket;
      }
      dec.branch_states[b][k] = ket;
      // Bloch angles of the ket, global phase dropped.
      const double theta = 2.0 * std::atan2(std::abs(ket(1)), std::abs(ket(0)));
      double az = std::arg(ket(1)) - std::arg(ket(0));
      if (!std::isfinite(az)) az = 0.0;
      az = std::fmod(az, 2.0 * M_PI);
      if (az < 0) az += 2.0 * M_PI;
      dec.directions[b][k] = SCSParams{theta, az};
    }
  }
  return dec;
}

StateVector MulticatDecomposition::reconstruct(const Caps& caps) const {
  if (branch_states.empty()) throw std::invalid_argument("reconstruct: empty decomposition");
  const int num_spins = static_cast<int>(branch_states.front().size());
  check_full_tensor_cap(num_spins, caps);

  StateVector out;
  out.repr = Repr::FullTensor;
  out.num_spins = num_spins;
  out.amps = Vector::Zero(1 << num_spins);

  for (std::size_t b = 0; b < branch_states.size(); ++b) {
    for (int idx = 0; idx < out.dim(); ++idx) {
      Complex amp = weights[b];
      for (int k = 0; k < num_spins; ++k) {
        const int bit = (idx >> (num_spins - 1 - k)) & 1;
        amp *= branch_states[b][static_cast<std::size_t>(k)](bit);
      }
      out.amps(idx) += amp;
    }
  }
  return out;
}

} // namespace multicat
