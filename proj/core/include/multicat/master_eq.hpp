#pragma once

#include <vector>

#include "multicat/spin_ops.hpp"

namespace multicat {

struct DensityOperator {
  Repr repr = Repr::Dicke;
  int num_spins = 0;
  Matrix matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }
  double hermiticity_defect() const;
  double trace_defect() const;
  double min_eigenvalue() const;

  static DensityOperator maximally_mixed(Repr repr, int num_spins, const Caps& caps = {});
  static DensityOperator pure(const StateVector& state);
};

// The collective dissipator defaults to Jx; the Z variant exists for
// comparison because the two published forms of the disordered equation
// disagree on the axis.
enum class CollectiveAxis { X, Z };

// Continuous-time rates obtained from one measurement cycle of duration dt:
// phi_dot = phi/dt, gamma = 4 alpha^2/dt, site rates Gamma_k = 4 var_k/dt.
struct LindbladParams {
  double phi_dot = 0.0;
  double gamma = 0.0;
  std::vector<double> gammas_site; // empty means all zero
  double dt = 1.0;
  CollectiveAxis collective_axis = CollectiveAxis::X;

  static LindbladParams from_cycle(double alpha, double phi, double dt);
  static LindbladParams from_disorder(double alpha_mean, double phi, double sigma,
                                      int num_spins, double dt);
  void validate() const;
};

// d rho/dt = -i [phi_dot Jz, rho] + gamma D[Jx] rho on the symmetric
// subspace. The result is traceless to machine precision.
Matrix lindblad_rhs_sym(const DensityOperator& rho, const LindbladParams& params);

// Full-space generator with per-site dephasing-by-disorder terms:
// -i [phi_dot Jz, rho] + gamma D[J_axis] rho + sum_k Gamma_k D[sigma_x^k] rho.
Matrix lindblad_rhs_nonsym(const DensityOperator& rho, const LindbladParams& params,
                           const Caps& caps = {});

struct TimedState {
  double t = 0.0;
  DensityOperator rho;
};

// Step count giving h = min(1/gamma, 1/phi_dot, 1/max Gamma_k)/100.
int default_steps(const LindbladParams& params, double t_final);

// Fixed-step RK4. The state is re-hermitized each step; trace drift beyond
// tol::trace_drift and eigenvalues below tol::positivity_abort raise
// positivity_error with a step-size diagnostic. record_stride 0 keeps about
// 200 evenly spaced snapshots (first and last always included).
std::vector<TimedState> integrate(const DensityOperator& rho0, const LindbladParams& params,
                                  double t_final, int steps, int record_stride = 0,
                                  const Caps& caps = {});

// 4 tr(rho Jz^2). Matches the trajectory-averaged QFI only because every
// conditional state of the protocol has <Jz> = 0; for general rho it is just
// the second-moment proxy.
double qfi_proxy(const DensityOperator& rho);

// Trace distance between the exact discrete averaged channel after n cycles
// and the integrated continuous-time limit at t = n dt, both from |+>^M in
// the symmetric subspace. Warns (stderr) outside the alpha, phi <= 0.1
// expansion regime but still computes.
double discrete_continuum_check(double alpha, double phi, int num_spins, int cycles, double dt);

// Cycle counts for the two regimes: n_short = 1/alpha^2 (collective spread),
// n_long = 1/sigma^2 (disorder takeover; infinity when sigma = 0). The
// companion times are t = n dt.
struct Timescales {
  double n_short = 0.0;
  double n_long = 0.0;
  double t_short = 0.0;
  double t_long = 0.0;
};

Timescales timescales(double alpha, double sigma, double dt);

double trace_distance(const Matrix& a, const Matrix& b);

} // namespace multicat
