#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace multicat {

// Defaults are CODATA 2022 (mu0, gamma_e) and the standard 13C gyromagnetic
// ratio (10.7084 MHz/T times 2 pi). Override any of them via the geometry
// file or the runner config.
struct PhysicalConstants {
  double mu0 = 1.25663706127e-6;     // vacuum permeability, N A^-2
  double gamma_e = 1.76085962784e11; // electron gyromagnetic ratio, rad s^-1 T^-1
  double gamma_n = 6.728284e7;       // 13C gyromagnetic ratio, rad s^-1 T^-1
};

// Sensor at the origin, one position vector per bath spin, in meters.
struct SpinGeometry {
  std::vector<Eigen::Vector3d> positions;
  PhysicalConstants constants;
};

struct CouplingSet {
  std::vector<double> betas;        // 2/pi |A_perp|, rad/s
  std::vector<double> frame_angles; // azimuth of A_perp in the xy-plane
  std::vector<double> alphas;       // beta * tau_cycle, dimensionless per cycle
};

struct DisorderModel {
  double mean = 0.0;
  double sigma = 0.0; // >= 0
};

// Perpendicular hyperfine vector
//   A_perp = -(3 mu0 g_e g_n / 4 pi |r|^3) (z.r / |r|^2) [(x.r) x + (y.r) y].
// The z component is zero by construction.
Eigen::Vector3d hyperfine_perp(const Eigen::Vector3d& r, const PhysicalConstants& constants);

// beta_m, frame angles and dimensionless per-cycle couplings for every spin.
// A spin with vanishing A_perp (on the z axis or in the xy plane) is kept
// with alpha = 0 and a warning on stderr.
CouplingSet couplings_from_positions(const SpinGeometry& geometry, double tau_cycle);

// M independent Normal(mean, sigma) draws, deterministic for a fixed seed
// and identical across platforms. Draws are not truncated: a negative
// coupling is a local basis change, not an error.
std::vector<double> disorder_sample(const DisorderModel& model, int num_spins,
                                    std::uint64_t seed, std::uint64_t stream = 0);

// Duration of the initialization pulse, pi / (4 beta).
double init_pulse_time(double beta);

// Geometry file: one "x y z" position per line in nanometers, blank lines
// and '#' comments ignored, plus optional overrides "mu0 = ...",
// "gamma_e = ...", "gamma_n = ...". Positions are converted to meters.
SpinGeometry load_geometry(std::istream& in);
SpinGeometry load_geometry_file(const std::string& path);

} // namespace multicat
