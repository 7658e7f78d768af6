#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "multicat/spin_ops.hpp"

namespace multicat {

// One experiment: M spins, precession angle phi per cycle, and the per-spin
// couplings alpha_k accumulated over one interaction window.
struct ProtocolParams {
  int num_spins = 1;
  double phi = 0.0;
  std::vector<double> couplings;

  static ProtocolParams uniform(int num_spins, double alpha, double phi);

  bool symmetric() const;
  void validate() const;
};

// Ordered central-spin outcomes s_j in {+1, -1}.
struct MeasurementRecord {
  std::vector<int> outcomes;

  int cycles() const { return static_cast<int>(outcomes.size()); }

  // Canonical branch index: outcome +1 maps to bit 0, s_1 is the most
  // significant bit.
  std::uint64_t to_index() const;
  static MeasurementRecord from_index(std::uint64_t index, int cycles);
};

struct TrajectorySample {
  MeasurementRecord record;
  StateVector state;      // normalized conditional state
  double probability;     // P(S); underflows to 0 around n ~ 1000
  double log_probability; // log P(S); finite on sampled trajectories
};

// Per-cycle single-spin Kraus factors
//   T0 = exp(-i alpha sigma_x) exp(-i phi/2 sigma_z)
//   T1 = exp(+i alpha sigma_x) exp(-i phi/2 sigma_z)
std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> kraus_single(double alpha, double phi);

// Branch unitaries restricted to the symmetric subspace:
// U0 = exp(-i 2 alpha Jx) exp(-i phi Jz), U1 = exp(+i 2 alpha Jx) exp(-i phi Jz).
std::pair<Matrix, Matrix> dicke_branch_unitaries(double alpha, double phi, int num_spins);

// Full step operator T_s = (1/2)(tensor_k T0^k + i s tensor_k T1^k) as a
// dense matrix. Dicke representation requires symmetric couplings, where the
// branch unitaries collapse to exp(-+ i 2 alpha Jx) exp(-i phi Jz).
Matrix step_operator(int outcome, const ProtocolParams& params, Repr repr,
                     const Caps& caps = {});

// Applies one cycle to an unnormalized conditional state; the squared norm
// of the result is the conditional probability weight of the outcome.
StateVector apply_cycle(const StateVector& state, int outcome, const ProtocolParams& params,
                        const Caps& caps = {});

// Precomputed per-cycle kernels; use this instead of apply_cycle inside
// loops. Full-tensor application is qubit-wise, O(M 2^M) per cycle, and
// never forms the 2^M x 2^M step matrix.
class CyclePropagator {
public:
  CyclePropagator(const ProtocolParams& params, Repr repr, const Caps& caps = {});

  StateVector apply(const StateVector& state, int outcome) const;
  Repr repr() const { return repr_; }
  int num_spins() const { return num_spins_; }

private:
  Repr repr_;
  int num_spins_;
  // Full tensor path: one (T0, T1) pair per spin.
  std::vector<std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd>> site_ops_;
  // Dicke path: the two branch unitaries.
  Matrix dicke_u0_, dicke_u1_;
};

Repr choose_representation(const ProtocolParams& params, const Caps& caps,
                           std::optional<Repr> override = std::nullopt);

// Born-samples one trajectory of n cycles from |+>^M. Deterministic for a
// fixed (seed, stream): the RNG substream is derived from both, so batches
// are reproducible under any parallel schedule.
TrajectorySample sample_trajectory(const ProtocolParams& params, int cycles,
                                   std::uint64_t seed, std::uint64_t stream = 0,
                                   std::optional<Repr> repr_override = std::nullopt,
                                   const Caps& caps = {});

// All 2^n records with exact probabilities, in canonical record order.
std::vector<TrajectorySample> enumerate_trajectories(const ProtocolParams& params, int cycles,
                                                     std::optional<Repr> repr_override = std::nullopt,
                                                     const Caps& caps = {});

// Expansion of the conditional state into 2^n spin-coherent branches.
// weights holds the record-dependent complex weights (all of modulus 2^-n);
// branch_states[i][k] is the exact single-spin ket of branch i at spin k,
// global phase included -- reconstruction needs those phases, while
// directions[i][k] carries only the Bloch angles.
struct MulticatDecomposition {
  int cycles = 0;
  std::vector<Complex> weights;
  std::vector<std::vector<Eigen::Vector2cd>> branch_states;
  std::vector<std::vector<SCSParams>> directions;

  // sum_i w_i tensor_k |psi_i^k>, as an unnormalized full-tensor state.
  StateVector reconstruct(const Caps& caps = {}) const;
};

MulticatDecomposition multicat_decomposition(const MeasurementRecord& record,
                                             const ProtocolParams& params,
                                             const Caps& caps = {});

} // namespace multicat
