#include "multicat/nv_model.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "multicat/rng.hpp"

namespace multicat {

Eigen::Vector3d hyperfine_perp(const Eigen::Vector3d& r, const PhysicalConstants& constants) {
  const double dist = r.norm();
  if (dist <= 0.0) throw std::invalid_argument("hyperfine_perp: |r| > 0 required");
  const double prefactor = -3.0 * constants.mu0 * constants.gamma_e * constants.gamma_n /
                           (4.0 * M_PI * dist * dist * dist);
  const double axial = r.z() / (dist * dist);
  return prefactor * axial * Eigen::Vector3d(r.x(), r.y(), 0.0);
}

CouplingSet couplings_from_positions(const SpinGeometry& geometry, double tau_cycle) {
  CouplingSet set;
  set.betas.reserve(geometry.positions.size());
  set.frame_angles.reserve(geometry.positions.size());
  set.alphas.reserve(geometry.positions.size());

  for (std::size_t m = 0; m < geometry.positions.size(); ++m) {
    const Eigen::Vector3d a_perp = hyperfine_perp(geometry.positions[m], geometry.constants);
    const double beta = 2.0 / M_PI * a_perp.norm();
    if (beta == 0.0) {
      std::cerr << "couplings_from_positions: spin " << m
                << " has vanishing perpendicular coupling (decoupled), alpha set to 0\n";
      set.betas.push_back(0.0);
      set.frame_angles.push_back(0.0);
      set.alphas.push_back(0.0);
      continue;
    }
    set.betas.push_back(beta);
    set.frame_angles.push_back(std::atan2(a_perp.y(), a_perp.x()));
    set.alphas.push_back(beta * tau_cycle);
  }
  return set;
}

std::vector<double> disorder_sample(const DisorderModel& model, int num_spins,
                                    std::uint64_t seed, std::uint64_t stream) {
  if (num_spins < 1) throw std::invalid_argument("disorder_sample: M >= 1 required");
  if (model.sigma < 0.0) throw std::invalid_argument("disorder_sample: sigma >= 0 required");
  auto gen = make_stream(seed, stream);
  std::vector<double> alphas(static_cast<std::size_t>(num_spins));
  for (auto& a : alphas) a = model.mean + model.sigma * standard_normal(gen);
  return alphas;
}

double init_pulse_time(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("init_pulse_time: beta > 0 required");
  return M_PI / (4.0 * beta);
}

SpinGeometry load_geometry(std::istream& in) {
  SpinGeometry geometry;
  std::string line;
  int line_no = 0;
  constexpr double nm = 1e-9;

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue; // blank

    if (first == "mu0" || first == "gamma_e" || first == "gamma_n") {
      std::string eq;
      double value;
      if (!(ls >> eq >> value) || eq != "=") {
        throw std::invalid_argument("geometry line " + std::to_string(line_no) +
                                    ": expected '" + first + " = <value>'");
      }
      if (first == "mu0") geometry.constants.mu0 = value;
      else if (first == "gamma_e") geometry.constants.gamma_e = value;
      else geometry.constants.gamma_n = value;
      continue;
    }

    double x, y, z;
    std::istringstream ps(line);
    if (!(ps >> x >> y >> z)) {
      throw std::invalid_argument("geometry line " + std::to_string(line_no) +
                                  ": expected 'x y z' in nanometers or a constant override");
    }
    std::string extra;
    if (ps >> extra) {
      throw std::invalid_argument("geometry line " + std::to_string(line_no) +
                                  ": trailing content '" + extra + "'");
    }
    geometry.positions.emplace_back(x * nm, y * nm, z * nm);
  }
  return geometry;
}

SpinGeometry load_geometry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open geometry file: " + path);
  return load_geometry(in);
}

} // namespace multicat
