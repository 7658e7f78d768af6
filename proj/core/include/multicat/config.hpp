#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "multicat/constants.hpp"
#include "multicat/master_eq.hpp"
#include "multicat/nv_model.hpp"
#include "multicat/spin_ops.hpp"

namespace multicat {

enum class Mode { Sample, AvgQfiExact, AvgQfiMc, Brute, MasterEq, Fig2, Fig3, Couplings };

std::string mode_name(Mode mode);

struct ConfigDiagnostic {
  int line = 0; // 0 when the problem is a missing field
  std::string field;
  std::string message;
};

// Fully resolved experiment description. `resolved` echoes every key that
// applies to the mode, defaults materialized, and is what the metadata JSON
// records; a config/seed pair reproduces a run bit-identically.
struct ExperimentConfig {
  Mode mode = Mode::Sample;
  std::uint64_t seed = 12345;
  int threads = 1;
  std::string out_dir;
  std::string prefix;
  std::optional<Repr> repr_override;
  Caps caps;

  // protocol group
  int num_spins = 0;
  int cycles = 0;
  double phi = 0.0;
  std::optional<double> alpha;             // uniform coupling
  std::optional<std::vector<double>> couplings;
  std::optional<DisorderModel> disorder;   // couplings drawn per realization
  int realizations = 1;

  int sample_count = 1;  // sample mode
  int mc_samples = 2;    // avg-qfi-mc mode

  // master-eq mode
  double master_dt = 1.0;
  int master_steps = 0; // 0 = automatic
  CollectiveAxis master_axis = CollectiveAxis::X;

  // fig2 / fig3 sweeps
  std::vector<double> fig2_alphas;
  int fig2_m_min = 2, fig2_m_max = 10;
  std::vector<double> fig3_sigmas;

  // couplings mode
  std::string geometry_file;
  double tau_cycle = 0.0;

  std::map<std::string, std::string> resolved;
};

struct ValidationResult {
  std::optional<ExperimentConfig> config; // engaged iff diagnostics is empty
  std::vector<ConfigDiagnostic> diagnostics;

  bool ok() const { return config.has_value(); }
};

// Parses and fully resolves a flat key-value config ("key = value" lines,
// '#' comments). Problems are reported as diagnostics, never thrown; the
// result is either a complete config or a non-empty diagnostics list.
ValidationResult validate_config(const std::string& text);

ValidationResult validate_config_file(const std::string& path);

// One "key = value" line per resolved key, sorted; the canonical echo form.
std::string resolved_to_string(const ExperimentConfig& config);

} // namespace multicat
