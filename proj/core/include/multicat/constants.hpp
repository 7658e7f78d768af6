#pragma once

#include <stdexcept>
#include <string>

namespace multicat {

// Central tolerance table. Every numerical gate in the library and the
// property-test suite reads from here, so loosening one knob is a one-line
// change.
namespace tol {
inline constexpr double hermiticity = 1e-10;        // max-abs deviation A - A^dag
inline constexpr double unitarity = 1e-12;          // max-abs deviation U^dag U - I
inline constexpr double kraus_completeness = 1e-10; // T+^dag T+ + T-^dag T- - I
inline constexpr double probability_sum = 1e-9;     // sum_S P(S) - 1 over enumerations
inline constexpr double symmetric_residual = 1e-8;  // norm outside the symmetric subspace
inline constexpr double norm_preservation = 1e-10;  // Dicke embedding norm drift
inline constexpr double unit_norm = 1e-8;           // normalization gate for pure QFI
inline constexpr double scs_norm = 1e-12;           // spin-coherent-state norm
inline constexpr double mirror_mean = 1e-9;         // |<Jz>| per spin on conditional states
inline constexpr double weight_orthogonality = 1e-12;
inline constexpr double reconstruction_fidelity = 1e-9;
inline constexpr double oracle_match = 1e-8;        // brute force vs recursion
inline constexpr double trace_drift = 1e-8;         // |tr rho - 1| during integration
inline constexpr double positivity_monitor = -1e-8; // monitored eigenvalue floor
inline constexpr double positivity_abort = -1e-6;   // integrator hard abort
inline constexpr double fixed_point = 1e-12;        // Lindblad rhs on maximally mixed
inline constexpr double floor_nudge = 1e-9;         // upward nudge before floor()
} // namespace tol

// Size caps guarding the intrinsically exponential paths. All are
// configurable per call site; defaults keep everything in desk-scale memory.
struct Caps {
  int full_tensor_max_spins = 14;    // 2^M amplitudes
  int enumerate_max_cycles = 20;     // 2^n trajectory branches
  int decomposition_max_cycles = 16; // 2^n multi-cat branches
  int brute_max_cycles = 12;
  int brute_max_spins = 6;
  int master_full_max_spins = 12; // full-tensor density matrices
};

// Thrown when a requested computation would exceed one of the Caps above.
// The CLI maps this to exit code 3.
class cap_exceeded : public std::runtime_error {
public:
  explicit cap_exceeded(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when the integrator detects a density-operator eigenvalue below
// tol::positivity_abort. The CLI maps this to exit code 4.
class positivity_error : public std::runtime_error {
public:
  explicit positivity_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace multicat
