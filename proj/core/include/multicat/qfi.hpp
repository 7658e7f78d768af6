#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "multicat/protocol.hpp"

namespace multicat {

// Two-spin averaged conditional state driving the exact average-QFI
// recursions. Starts from |++><++| and advances one measurement cycle at a
// time under the averaged pair channel.
struct TwoPartyAvgState {
  Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();
  int cycle = 0;

  static TwoPartyAvgState initial();

  // max-abs Hermiticity defect, |tr - 1|, and the most negative eigenvalue.
  double hermiticity_defect() const;
  double trace_defect() const;
  double min_eigenvalue() const;
};

// rho' = (1/2)[(T0a x T0b) rho (.)^dag + (T1a x T1b) rho (.)^dag], the pair
// channel for spins with couplings alpha_a, alpha_b. The symmetric channel
// is the alpha_a == alpha_b case.
Eigen::Matrix4cd pair_channel_step(const Eigen::Matrix4cd& rho,
                                   const Eigen::Matrix2cd& t0a, const Eigen::Matrix2cd& t1a,
                                   const Eigen::Matrix2cd& t0b, const Eigen::Matrix2cd& t1b);

double pair_correlator(const Eigen::Matrix4cd& rho); // tr rho sigma_z x sigma_z

// Per-cycle averaged QFI curve. values[i] pairs with cycles[i]. h_values is
// the correlator sequence the curve is built from: Hs (one pair, M-free)
// for symmetric runs, the pair sum Hns otherwise.
struct AvgQfiCurve {
  std::vector<int> cycles;
  std::vector<double> values;
  std::vector<double> h_values;
  ProtocolParams params;
};

// QFI of a normalized pure state under Jz rotations: 4(<Jz^2> - <Jz>^2).
// Both moments are computed; the vanishing of <Jz> on protocol states is a
// tested property, not an assumption. Throws when the norm deviates from 1
// by more than tol::unit_norm.
double pure_qfi_jz(const StateVector& state);

// Monte Carlo estimate of the averaged QFI: Born sampling already weights
// trajectories by P(S), so the plain sample mean is unbiased. Returns
// (estimate, standard error). Sample i uses RNG substream i; the reduction
// order is fixed, so the result is bit-identical for any thread count.
std::pair<double, double> avg_qfi_mc(const ProtocolParams& params, int cycles, int n_samples,
                                     std::uint64_t seed, int threads = 1,
                                     const Caps& caps = {},
                                     std::optional<Repr> repr_override = std::nullopt);

// Exact averaged QFI for symmetric coupling via the single 4x4 recursion:
// F(n) = M + M(M-1) Hs(n), cost O(n) independent of M.
AvgQfiCurve avg_qfi_exact_sym(double alpha, double phi, int num_spins, int cycles);

// Exact averaged QFI for arbitrary couplings: one 4x4 recursion per
// unordered spin pair, F(n) = M + 2 Hns(n), cost O(n M^2).
AvgQfiCurve avg_qfi_exact_nonsym(const std::vector<double>& couplings, double phi, int cycles);

// Long-time limits: M(M+2)/3 for symmetric coupling, M otherwise.
double asymptotic_qfi(int num_spins, bool symmetric);

// Independent oracle: full enumeration of all 2^n records in the tensor
// representation, summing P(S) times the per-trajectory QFI.
double avg_qfi_brute(const ProtocolParams& params, int cycles, const Caps& caps = {});

// Entanglement-depth witness floor(fq / M), nudged upward by
// tol::floor_nudge to keep analytic integer boundaries exact.
int entanglement_depth(double fq, int num_spins);

} // namespace multicat
