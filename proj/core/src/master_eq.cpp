#include "multicat/master_eq.hpp"

#include <bit>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "multicat/protocol.hpp"

namespace multicat {

namespace {

// Jz is diagonal in both representations; mz(i) is its diagonal.
Eigen::VectorXd jz_diagonal(Repr repr, int num_spins) {
  const int dim = state_dim(repr, num_spins);
  Eigen::VectorXd mz(dim);
  if (repr == Repr::Dicke) {
    for (int i = 0; i < dim; ++i) mz(i) = 0.5 * num_spins - i;
  } else {
    for (int b = 0; b < dim; ++b) {
      mz(b) = 0.5 * (num_spins - 2 * std::popcount(static_cast<unsigned>(b)));
    }
  }
  return mz;
}

// sigma_x^k rho sigma_x^k is a simultaneous row/column bit flip.
Matrix conjugate_site_flip(const Matrix& rho, int mask) {
  const int dim = static_cast<int>(rho.rows());
  Matrix out(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) out(a, b) = rho(a ^ mask, b ^ mask);
  }
  return out;
}

class Generator {
public:
  Generator(Repr repr, int num_spins, const LindbladParams& params, const Caps& caps)
      : repr_(repr), num_spins_(num_spins), params_(params),
        mz_(jz_diagonal(repr, num_spins)) {
    params.validate();
    if (repr == Repr::FullTensor) {
      if (num_spins > caps.master_full_max_spins) {
        throw cap_exceeded("full-tensor master equation capped at M <= " +
                           std::to_string(caps.master_full_max_spins));
      }
      for (int k = 0; k < num_spins; ++k) masks_.push_back(1 << (num_spins - 1 - k));
    }
    if (params.collective_axis == CollectiveAxis::X && params.gamma != 0.0) {
      if (repr == Repr::Dicke) {
        jx_ = collective_op(Axis::X, num_spins, Repr::Dicke);
        jx2_ = jx_ * jx_;
      }
      // Full-tensor Jx terms are evaluated by bit flips, no matrix needed.
    }
  }

  Matrix rhs(const Matrix& rho) const {
    const int dim = static_cast<int>(rho.rows());
    Matrix out = Matrix::Zero(dim, dim);

    // Unitary part and the diagonal-axis dissipator share the elementwise
    // form f(mz(a), mz(b)) * rho(a,b).
    const bool z_axis = params_.collective_axis == CollectiveAxis::Z;
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        const double dz = mz_(a) - mz_(b);
        Complex c = -imag_unit * params_.phi_dot * dz * rho(a, b);
        if (z_axis) c += -0.5 * params_.gamma * dz * dz * rho(a, b);
        out(a, b) += c;
      }
    }

    if (!z_axis && params_.gamma != 0.0) {
      if (repr_ == Repr::Dicke) {
        out += params_.gamma *
               (jx_ * rho * jx_ - 0.5 * (jx2_ * rho + rho * jx2_));
      } else {
        out += params_.gamma * full_jx_dissipator(rho);
      }
    }

    if (repr_ == Repr::FullTensor) {
      for (std::size_t k = 0; k < params_.gammas_site.size(); ++k) {
        const double g = params_.gammas_site[k];
        if (g == 0.0) continue;
        // D[sigma_x^k] rho = sigma rho sigma - rho because sigma_x^2 = I.
        out += g * (conjugate_site_flip(rho, masks_[k]) - rho);
      }
    } else if (!params_.gammas_site.empty()) {
      bool any = false;
      for (double g : params_.gammas_site) any = any || g != 0.0;
      if (any) {
        throw std::invalid_argument(
            "site dissipators leave the symmetric subspace; use the full representation");
      }
    }
    return out;
  }

private:
  // D[Jx] rho with Jx = (1/2) sum_k sigma_x^k, evaluated through bit flips:
  // Jx rho Jx(a,b)    = 1/4 sum_{k,l} rho(a^mk, b^ml)
  // {Jx^2, rho}(a,b)  = 1/4 sum_{k,l} [rho(a^mk^ml, b) + rho(a, b^mk^ml)]
  Matrix full_jx_dissipator(const Matrix& rho) const {
    const int dim = static_cast<int>(rho.rows());
    Matrix out = Matrix::Zero(dim, dim);
    for (int mk : masks_) {
      for (int ml : masks_) {
        for (int a = 0; a < dim; ++a) {
          for (int b = 0; b < dim; ++b) {
            out(a, b) += 0.25 * (rho(a ^ mk, b ^ ml) -
                                 0.5 * (rho((a ^ mk) ^ ml, b) + rho(a, (b ^ mk) ^ ml)));
          }
        }
      }
    }
    return out;
  }

  Repr repr_;
  int num_spins_;
  LindbladParams params_;
  Eigen::VectorXd mz_;
  Matrix jx_, jx2_;
  std::vector<int> masks_;
};

} // namespace

double DensityOperator::hermiticity_defect() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::trace_defect() const { return std::abs(matrix.trace() - Complex{1.0, 0.0}); }

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix);
  return solver.eigenvalues().minCoeff();
}

DensityOperator DensityOperator::maximally_mixed(Repr repr, int num_spins, const Caps& caps) {
  if (repr == Repr::FullTensor) check_full_tensor_cap(num_spins, caps);
  const int dim = state_dim(repr, num_spins);
  DensityOperator rho;
  rho.repr = repr;
  rho.num_spins = num_spins;
  rho.matrix = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  return rho;
}

DensityOperator DensityOperator::pure(const StateVector& state) {
  DensityOperator rho;
  rho.repr = state.repr;
  rho.num_spins = state.num_spins;
  rho.matrix = state.amps * state.amps.adjoint();
  return rho;
}

LindbladParams LindbladParams::from_cycle(double alpha, double phi, double dt) {
  LindbladParams p;
  p.dt = dt;
  p.phi_dot = phi / dt;
  p.gamma = 4.0 * alpha * alpha / dt;
  p.validate();
  return p;
}

LindbladParams LindbladParams::from_disorder(double alpha_mean, double phi, double sigma,
                                             int num_spins, double dt) {
  LindbladParams p = from_cycle(alpha_mean, phi, dt);
  p.gammas_site.assign(static_cast<std::size_t>(num_spins), 4.0 * sigma * sigma / dt);
  return p;
}

void LindbladParams::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("LindbladParams: dt > 0 required");
  if (gamma < 0.0) throw std::invalid_argument("LindbladParams: gamma >= 0 required");
  for (double g : gammas_site) {
    if (g < 0.0) throw std::invalid_argument("LindbladParams: site rates must be >= 0");
  }
}

Matrix lindblad_rhs_sym(const DensityOperator& rho, const LindbladParams& params) {
  if (rho.repr != Repr::Dicke) {
    throw std::invalid_argument("lindblad_rhs_sym: Dicke representation required");
  }
  return Generator(Repr::Dicke, rho.num_spins, params, {}).rhs(rho.matrix);
}

Matrix lindblad_rhs_nonsym(const DensityOperator& rho, const LindbladParams& params,
                           const Caps& caps) {
  if (rho.repr != Repr::FullTensor) {
    throw std::invalid_argument("lindblad_rhs_nonsym: full-tensor representation required");
  }
  return Generator(Repr::FullTensor, rho.num_spins, params, caps).rhs(rho.matrix);
}

int default_steps(const LindbladParams& params, double t_final) {
  double rate = std::max(params.gamma, std::abs(params.phi_dot));
  for (double g : params.gammas_site) rate = std::max(rate, g);
  if (rate <= 0.0) return 100;
  const double h = 1.0 / rate / 100.0;
  return std::max(100, static_cast<int>(std::ceil(t_final / h)));
}

std::vector<TimedState> integrate(const DensityOperator& rho0, const LindbladParams& params,
                                  double t_final, int steps, int record_stride,
                                  const Caps& caps) {
  if (steps < 1) throw std::invalid_argument("integrate: steps >= 1 required");
  if (!(t_final >= 0.0)) throw std::invalid_argument("integrate: t_final >= 0 required");
  params.validate();

  Generator gen(rho0.repr, rho0.num_spins, params, caps);
  const double h = t_final / steps;
  if (record_stride <= 0) record_stride = std::max(1, steps / 200);

  std::vector<TimedState> out;
  out.reserve(static_cast<std::size_t>(steps / record_stride) + 2);

  DensityOperator rho = rho0;
  out.push_back({0.0, rho});

  for (int step = 1; step <= steps; ++step) {
    const Matrix k1 = gen.rhs(rho.matrix);
    const Matrix k2 = gen.rhs(rho.matrix + 0.5 * h * k1);
    const Matrix k3 = gen.rhs(rho.matrix + 0.5 * h * k2);
    const Matrix k4 = gen.rhs(rho.matrix + h * k3);
    rho.matrix += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho.matrix = 0.5 * (rho.matrix + rho.matrix.adjoint()).eval();

    if (rho.trace_defect() > tol::trace_drift) {
      throw positivity_error("integrate: trace drifted to 1 + " +
                             std::to_string(rho.trace_defect()) + " at step " +
                             std::to_string(step) + "; reduce the step size (h = " +
                             std::to_string(h) + ")");
    }
    const double min_eig = rho.min_eigenvalue();
    if (min_eig < tol::positivity_abort) {
      throw positivity_error("integrate: eigenvalue " + std::to_string(min_eig) +
                             " below the positivity floor at step " + std::to_string(step) +
                             "; reduce the step size (h = " + std::to_string(h) + ")");
    }

    if (step % record_stride == 0 || step == steps) {
      out.push_back({h * step, rho});
    }
  }
  return out;
}

double qfi_proxy(const DensityOperator& rho) {
  const Eigen::VectorXd mz = jz_diagonal(rho.repr, rho.num_spins);
  double sum = 0.0;
  for (int i = 0; i < rho.dim(); ++i) sum += mz(i) * mz(i) * rho.matrix(i, i).real();
  return 4.0 * sum;
}

double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a - b);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double discrete_continuum_check(double alpha, double phi, int num_spins, int cycles, double dt) {
  if (std::abs(alpha) > 0.1 || std::abs(phi) > 0.1) {
    std::cerr << "discrete_continuum_check: alpha, phi <= 0.1 regime violated "
              << "(alpha = " << alpha << ", phi = " << phi << "); result may be large\n";
  }
  const StateVector plus = scs_state({0.5 * M_PI, 0.0}, num_spins, Repr::Dicke);

  // Discrete side: exact averaged channel, rho -> (U0 rho U0^+ + U1 rho U1^+)/2.
  const auto [u0, u1] = dicke_branch_unitaries(alpha, phi, num_spins);
  Matrix rho_d = DensityOperator::pure(plus).matrix;
  for (int j = 0; j < cycles; ++j) {
    rho_d = 0.5 * (u0 * rho_d * u0.adjoint() + u1 * rho_d * u1.adjoint());
  }

  // Continuum side: RK4 on the symmetric master equation up to t = n dt.
  const LindbladParams params = LindbladParams::from_cycle(alpha, phi, dt);
  const double t_final = cycles * dt;
  const auto trace = integrate(DensityOperator::pure(plus), params, t_final,
                               default_steps(params, t_final));
  return trace_distance(rho_d, trace.back().rho.matrix);
}

Timescales timescales(double alpha, double sigma, double dt) {
  if (!(alpha > 0.0) || !(dt > 0.0) || sigma < 0.0) {
    throw std::invalid_argument("timescales: alpha > 0, dt > 0, sigma >= 0 required");
  }
  Timescales ts;
  ts.n_short = 1.0 / (alpha * alpha);
  ts.n_long = sigma > 0.0 ? 1.0 / (sigma * sigma) : std::numeric_limits<double>::infinity();
  ts.t_short = ts.n_short * dt;
  ts.t_long = ts.n_long * dt;
  return ts;
}

} // namespace multicat
