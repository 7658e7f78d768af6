#include "multicat/qfi.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include <unsupported/Eigen/KroneckerProduct>

namespace multicat {

namespace {

Eigen::Matrix4cd plus_plus_projector() {
  Eigen::Vector4cd v;
  v << 0.5, 0.5, 0.5, 0.5;
  return v * v.adjoint();
}

AvgQfiCurve run_pair_recursions(const ProtocolParams& params, int cycles) {
  const int m = params.num_spins;
  const bool sym = params.symmetric();

  // One 4x4 state per unordered pair; the symmetric case collapses to one.
  struct Pair {
    Eigen::Matrix2cd t0a, t1a, t0b, t1b;
    Eigen::Matrix4cd rho;
  };
  std::vector<Pair> pairs;
  if (sym) {
    const auto [t0, t1] = kraus_single(params.couplings.front(), params.phi);
    pairs.push_back({t0, t1, t0, t1, plus_plus_projector()});
  } else {
    for (int k = 0; k < m; ++k) {
      const auto [t0k, t1k] = kraus_single(params.couplings[static_cast<std::size_t>(k)], params.phi);
      for (int l = k + 1; l < m; ++l) {
        const auto [t0l, t1l] =
            kraus_single(params.couplings[static_cast<std::size_t>(l)], params.phi);
        pairs.push_back({t0k, t1k, t0l, t1l, plus_plus_projector()});
      }
    }
  }

  AvgQfiCurve curve;
  curve.params = params;
  curve.cycles.reserve(static_cast<std::size_t>(cycles) + 1);
  curve.values.reserve(static_cast<std::size_t>(cycles) + 1);
  curve.h_values.reserve(static_cast<std::size_t>(cycles) + 1);

  for (int n = 0; n <= cycles; ++n) {
    if (n > 0) {
      for (auto& p : pairs) p.rho = pair_channel_step(p.rho, p.t0a, p.t1a, p.t0b, p.t1b);
    }
    double h = 0.0;
    for (const auto& p : pairs) h += pair_correlator(p.rho);
    curve.cycles.push_back(n);
    if (sym) {
      curve.h_values.push_back(h);
      curve.values.push_back(m + static_cast<double>(m) * (m - 1) * h);
    } else {
      curve.h_values.push_back(h); // Hns = sum over pairs
      curve.values.push_back(m + 2.0 * h);
    }
  }
  return curve;
}

} // namespace

TwoPartyAvgState TwoPartyAvgState::initial() {
  TwoPartyAvgState s;
  s.matrix = plus_plus_projector();
  s.cycle = 0;
  return s;
}

double TwoPartyAvgState::hermiticity_defect() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double TwoPartyAvgState::trace_defect() const { return std::abs(matrix.trace().real() - 1.0); }

double TwoPartyAvgState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(matrix);
  return solver.eigenvalues().minCoeff();
}

Eigen::Matrix4cd pair_channel_step(const Eigen::Matrix4cd& rho,
                                   const Eigen::Matrix2cd& t0a, const Eigen::Matrix2cd& t1a,
                                   const Eigen::Matrix2cd& t0b, const Eigen::Matrix2cd& t1b) {
  const Eigen::Matrix4cd k0 = Eigen::kroneckerProduct(t0a, t0b);
  const Eigen::Matrix4cd k1 = Eigen::kroneckerProduct(t1a, t1b);
  return 0.5 * (k0 * rho * k0.adjoint() + k1 * rho * k1.adjoint());
}

double pair_correlator(const Eigen::Matrix4cd& rho) {
  // tr rho (sigma_z x sigma_z): diagonal signs +,-,-,+.
  return (rho(0, 0) - rho(1, 1) - rho(2, 2) + rho(3, 3)).real();
}

double pure_qfi_jz(const StateVector& state) {
  const double norm = state.norm();
  if (std::abs(norm - 1.0) > tol::unit_norm) {
    throw std::invalid_argument("pure_qfi_jz: state must be normalized (norm = " +
                                std::to_string(norm) + ")");
  }
  const auto [m1, m2] = jz_moments(state);
  return 4.0 * (m2 - m1 * m1);
}

std::pair<double, double> avg_qfi_mc(const ProtocolParams& params, int cycles, int n_samples,
                                     std::uint64_t seed, int threads, const Caps& caps,
                                     std::optional<Repr> repr_override) {
  if (n_samples < 2) throw std::invalid_argument("avg_qfi_mc: n_samples >= 2 required");
  const Repr repr = choose_representation(params, caps, repr_override);

  std::vector<double> qfis(static_cast<std::size_t>(n_samples), 0.0);
  auto worker = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const TrajectorySample sample = sample_trajectory(
          params, cycles, seed, static_cast<std::uint64_t>(i), repr, caps);
      qfis[static_cast<std::size_t>(i)] = pure_qfi_jz(sample.state);
    }
  };

  const int nthreads = std::max(1, std::min(threads, n_samples));
  if (nthreads == 1) {
    worker(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    const int chunk = (n_samples + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(n_samples, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  // Fixed-order reduction keeps the estimate bit-stable across thread counts.
  double mean = 0.0;
  for (double q : qfis) mean += q;
  mean /= n_samples;
  double var = 0.0;
  for (double q : qfis) var += (q - mean) * (q - mean);
  var /= (n_samples - 1);
  return {mean, std::sqrt(var / n_samples)};
}

AvgQfiCurve avg_qfi_exact_sym(double alpha, double phi, int num_spins, int cycles) {
  return run_pair_recursions(ProtocolParams::uniform(num_spins, alpha, phi), cycles);
}

AvgQfiCurve avg_qfi_exact_nonsym(const std::vector<double>& couplings, double phi, int cycles) {
  ProtocolParams params;
  params.num_spins = static_cast<int>(couplings.size());
  params.phi = phi;
  params.couplings = couplings;
  params.validate();
  if (params.num_spins < 2) {
    throw std::invalid_argument("avg_qfi_exact_nonsym: M >= 2 required");
  }
  return run_pair_recursions(params, cycles);
}

double asymptotic_qfi(int num_spins, bool symmetric) {
  if (num_spins < 1) throw std::invalid_argument("asymptotic_qfi: M >= 1 required");
  const double m = num_spins;
  return symmetric ? m * (m + 2.0) / 3.0 : m;
}

double avg_qfi_brute(const ProtocolParams& params, int cycles, const Caps& caps) {
  params.validate();
  if (cycles > caps.brute_max_cycles || params.num_spins > caps.brute_max_spins) {
    throw cap_exceeded("avg_qfi_brute: limits are n <= " + std::to_string(caps.brute_max_cycles) +
                       ", M <= " + std::to_string(caps.brute_max_spins));
  }
  // Oracle path: always the full tensor representation, independent of the
  // Dicke machinery used by the fast paths.
  CyclePropagator prop(params, Repr::FullTensor, caps);
  StateVector root = scs_state({0.5 * M_PI, 0.0}, params.num_spins, Repr::FullTensor, caps);

  double total = 0.0;
  auto recurse = [&](auto&& self, const StateVector& state, int depth) -> void {
    if (depth == cycles) {
      const double p = state.squared_norm();
      if (p <= 0.0) return;
      StateVector normalized = state;
      normalized.amps /= state.norm();
      total += p * pure_qfi_jz(normalized);
      return;
    }
    for (int outcome : {+1, -1}) self(self, prop.apply(state, outcome), depth + 1);
  };
  recurse(recurse, root, 0);
  return total;
}

int entanglement_depth(double fq, int num_spins) {
  if (fq < 0.0) throw std::invalid_argument("entanglement_depth: fq >= 0 required");
  if (num_spins < 1) throw std::invalid_argument("entanglement_depth: M >= 1 required");
  return static_cast<int>(std::floor(fq / num_spins + tol::floor_nudge));
}

} // namespace multicat
