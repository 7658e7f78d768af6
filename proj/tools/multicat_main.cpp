#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "multicat/config.hpp"
#include "multicat/runner.hpp"
#include "multicat/version.hpp"

namespace {

void print_diagnostics(const std::vector<multicat::ConfigDiagnostic>& diags) {
  for (const auto& d : diags) {
    std::cerr << "config error";
    if (d.line > 0) std::cerr << " (line " << d.line << ")";
    if (!d.field.empty()) std::cerr << " [" << d.field << "]";
    std::cerr << ": " << d.message << "\n";
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"multicat: sequential weak-measurement spin-ensemble simulator"};
  app.set_version_flag("--version", std::string(multicat::version_string));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;

  CLI::App* run_cmd = app.add_subcommand("run", "execute a config and write CSV + JSON");
  run_cmd->add_option("config", config_path, "config file")->required();
  run_cmd->add_option("--seed", seed, "override the config seed");
  run_cmd->add_option("--out", out_dir, "override the output directory");
  run_cmd->add_option("--threads", threads, "worker threads for sweeps")
      ->check(CLI::PositiveNumber);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check a config and echo the resolved values");
  validate_cmd->add_option("config", config_path, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  multicat::ValidationResult result = multicat::validate_config_file(config_path);
  if (!result.ok()) {
    print_diagnostics(result.diagnostics);
    return 2;
  }
  multicat::ExperimentConfig config = *result.config;

  if (app.got_subcommand(validate_cmd)) {
    std::cout << multicat::resolved_to_string(config);
    return 0;
  }

  if (seed) {
    config.seed = *seed;
    config.resolved["seed"] = std::to_string(*seed);
  }
  if (out_dir) {
    config.out_dir = *out_dir;
    config.resolved["output.dir"] = *out_dir;
  }
  if (threads) {
    config.threads = *threads;
    config.resolved["threads"] = std::to_string(*threads);
  }

  try {
    const multicat::RunPaths paths = multicat::run(config);
    std::cout << paths.csv << "\n" << paths.json << "\n";
    return 0;
  } catch (const multicat::cap_exceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const multicat::positivity_error& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
