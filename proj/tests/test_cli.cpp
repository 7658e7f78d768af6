#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "multicat/config.hpp"
#include "multicat/qfi.hpp"
#include "multicat/runner.hpp"

using namespace multicat;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("multicat_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_diag_for(const ValidationResult& result, const std::string& field) {
  for (const auto& d : result.diagnostics) {
    if (d.field == field) return true;
  }
  return false;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("validate_config: missing and malformed fields become diagnostics") {
  const auto missing_m = validate_config(
      "mode = brute\n"
      "protocol.n = 4\n"
      "protocol.phi = 0.5\n"
      "protocol.alpha = 0.05\n");
  CHECK(!missing_m.ok());
  CHECK(has_diag_for(missing_m, "protocol.M"));

  const auto neg_sigma = validate_config(
      "mode = avg-qfi-exact\n"
      "protocol.M = 3\nprotocol.n = 10\nprotocol.phi = 0.5\n"
      "disorder.mean = 0.05\ndisorder.sigma = -0.1\n");
  CHECK(!neg_sigma.ok());
  CHECK(has_diag_for(neg_sigma, "disorder.sigma"));

  const auto unknown = validate_config("mode = fig2\nfig2.alpha = 0.05\n");
  CHECK(!unknown.ok());
  CHECK(has_diag_for(unknown, "fig2.alpha")); // typo: fig2.alphas

  const auto garbled = validate_config("mode = fig2\nthis line has no equals\n");
  CHECK(!garbled.ok());
  CHECK(garbled.diagnostics.front().line == 2);

  const auto both_sources = validate_config(
      "mode = brute\nprotocol.M = 2\nprotocol.n = 2\nprotocol.phi = 0.1\n"
      "protocol.alpha = 0.05\nprotocol.couplings = 0.05,0.06\n");
  CHECK(!both_sources.ok());

  const auto wrong_arity = validate_config(
      "mode = brute\nprotocol.M = 3\nprotocol.n = 2\nprotocol.phi = 0.1\n"
      "protocol.couplings = 0.05,0.06\n");
  CHECK(!wrong_arity.ok());
  CHECK(has_diag_for(wrong_arity, "protocol.couplings"));

  const auto dup = validate_config("mode = fig2\nseed = 1\nseed = 2\n");
  CHECK(!dup.ok());

  const auto dicke_disordered = validate_config(
      "mode = sample\nprotocol.M = 3\nprotocol.n = 5\nprotocol.phi = 0.5\n"
      "disorder.mean = 0.05\ndisorder.sigma = 0.01\nrepresentation = dicke\n");
  CHECK(!dicke_disordered.ok());
  CHECK(has_diag_for(dicke_disordered, "representation"));
}

TEST_CASE("MULTICAT_OUT_DIR supplies the default output directory") {
  setenv("MULTICAT_OUT_DIR", "/tmp/multicat_envdir", 1);
  const auto with_env = validate_config("mode = fig2\n");
  unsetenv("MULTICAT_OUT_DIR");
  REQUIRE(with_env.ok());
  CHECK(with_env.config->out_dir == "/tmp/multicat_envdir");

  const auto without = validate_config("mode = fig2\n");
  REQUIRE(without.ok());
  CHECK(without.config->out_dir == ".");

  const auto explicit_dir = validate_config("mode = fig2\noutput.dir = /tmp/elsewhere\n");
  REQUIRE(explicit_dir.ok());
  CHECK(explicit_dir.config->out_dir == "/tmp/elsewhere");
}

TEST_CASE("validate_config: minimal fig2 config resolves every default") {
  const auto result = validate_config("mode = fig2\n");
  REQUIRE(result.ok());
  const ExperimentConfig& cfg = *result.config;

  CHECK(cfg.resolved.at("fig2.alphas") == "0.02,0.05,0.1");
  CHECK(cfg.resolved.at("fig2.n") == "5000");
  CHECK(cfg.resolved.at("fig2.phi") == "0.5");
  CHECK(cfg.resolved.at("fig2.M_min") == "2");
  CHECK(cfg.resolved.at("fig2.M_max") == "10");
  CHECK(cfg.resolved.at("seed") == "12345");
  CHECK(cfg.resolved.at("threads") == "1");
  CHECK(cfg.resolved.at("representation") == "auto");
  CHECK(cfg.resolved.at("caps.full_tensor_max_M") == "14");
  CHECK(cfg.resolved.at("output.prefix") == "fig2");

  // The echo is parseable and resolves to the same configuration.
  const auto echoed = validate_config(resolved_to_string(cfg));
  REQUIRE(echoed.ok());
  CHECK(echoed.config->resolved == cfg.resolved);
}

TEST_CASE("run: avg-qfi-exact writes CSV matching the library curve") {
  const fs::path dir = make_temp_dir("exact");
  const auto result = validate_config(
      "mode = avg-qfi-exact\n"
      "protocol.M = 4\nprotocol.n = 20\nprotocol.phi = 0.5\nprotocol.alpha = 0.05\n"
      "output.dir = " + dir.string() + "\n");
  REQUIRE(result.ok());

  ResultTable table;
  const RunPaths paths = run(*result.config, &table);
  REQUIRE(table.rows.size() == 21);

  const AvgQfiCurve curve = avg_qfi_exact_sym(0.05, 0.5, 4, 20);
  CHECK(table.rows.back()[2] == curve.values.back());

  const std::string csv = slurp(paths.csv);
  CHECK(csv.rfind("cycle,h,fq\n", 0) == 0);
  CHECK(csv.find("nan") == std::string::npos);

  const std::string json = slurp(paths.json);
  CHECK(json.find("\"mode\": \"avg-qfi-exact\"") != std::string::npos);
  CHECK(json.find("\"protocol.alpha\": \"0.05\"") != std::string::npos);
}

TEST_CASE("run: CSV bytes are identical across thread counts") {
  for (const char* mode_block :
       {"mode = fig3\nfig3.M = 3\nfig3.n = 40\nfig3.realizations = 6\n"
        "fig3.sigmas = 0.004,0.009\n",
        "mode = avg-qfi-mc\nprotocol.M = 3\nprotocol.n = 15\nprotocol.phi = 0.5\n"
        "protocol.alpha = 0.05\nmc.samples = 200\n",
        "mode = sample\nprotocol.M = 2\nprotocol.n = 12\nprotocol.phi = 0.4\n"
        "protocol.alpha = 0.08\nsample.count = 32\n"}) {
    const fs::path dir1 = make_temp_dir("threads1");
    const fs::path dir4 = make_temp_dir("threads4");

    const auto base = validate_config(std::string(mode_block) + "seed = 31415\n");
    REQUIRE(base.ok());

    ExperimentConfig cfg1 = *base.config;
    cfg1.out_dir = dir1.string();
    cfg1.threads = 1;
    ExperimentConfig cfg4 = *base.config;
    cfg4.out_dir = dir4.string();
    cfg4.threads = 4;

    const RunPaths p1 = run(cfg1);
    const RunPaths p4 = run(cfg4);
    CHECK(slurp(p1.csv) == slurp(p4.csv));
  }
}

TEST_CASE("run: fig2 sweep reuses one recursion per alpha across all M") {
  const fs::path dir = make_temp_dir("fig2");
  const auto result = validate_config(
      "mode = fig2\nfig2.alphas = 0.05,0.1\nfig2.n = 600\nfig2.M_min = 2\nfig2.M_max = 5\n"
      "output.dir = " + dir.string() + "\n");
  REQUIRE(result.ok());
  ResultTable table;
  run(*result.config, &table);

  REQUIRE(table.columns == std::vector<std::string>{"alpha", "M", "n", "fq_exact",
                                                    "fq_asymptote"});
  REQUIRE(table.rows.size() == 2 * 4);

  const double h_05 = avg_qfi_exact_sym(0.05, 0.5, 2, 600).h_values.back();
  for (const auto& row : table.rows) {
    const double alpha = row[0], m = row[1];
    CHECK(row[2] == 600.0);
    CHECK(row[4] == doctest::Approx(m * (m + 2.0) / 3.0));
    if (alpha == 0.05) {
      CHECK(row[3] == doctest::Approx(m + m * (m - 1) * h_05).epsilon(1e-12));
    }
  }
}

TEST_CASE("run: sample mode spends its probability budget sensibly") {
  const fs::path dir = make_temp_dir("sample");
  const auto result = validate_config(
      "mode = sample\nprotocol.M = 2\nprotocol.n = 10\nprotocol.phi = 0.5\n"
      "protocol.alpha = 0.1\nsample.count = 20\noutput.dir = " + dir.string() + "\n");
  REQUIRE(result.ok());
  ResultTable table;
  run(*result.config, &table);
  for (const auto& row : table.rows) {
    CHECK(row[2] >= 0.0);                      // qfi
    CHECK(row[3] == doctest::Approx(std::exp(row[4]))); // probability vs log
    CHECK(row[4] < 0.0);
  }
}

TEST_CASE("run: brute on a disordered draw matches the nonsym recursion") {
  const fs::path dir = make_temp_dir("brute");
  const auto result = validate_config(
      "mode = brute\nprotocol.M = 3\nprotocol.n = 6\nprotocol.phi = 0.5\n"
      "disorder.mean = 0.05\ndisorder.sigma = 0.01\nseed = 7\n"
      "output.dir = " + dir.string() + "\n");
  REQUIRE(result.ok());
  ResultTable table;
  run(*result.config, &table);

  const auto couplings = disorder_sample({0.05, 0.01}, 3, 7, 0);
  const double expected = avg_qfi_exact_nonsym(couplings, 0.5, 6).values.back();
  CHECK(table.rows[0][1] == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("run: master-eq emits a monotone time column and sane proxies") {
  const fs::path dir = make_temp_dir("master");
  const auto result = validate_config(
      "mode = master-eq\nprotocol.M = 3\nprotocol.n = 200\nprotocol.phi = 0.5\n"
      "protocol.alpha = 0.05\noutput.dir = " + dir.string() + "\n");
  REQUIRE(result.ok());
  ResultTable table;
  run(*result.config, &table);
  REQUIRE(table.rows.size() > 2);
  CHECK(table.rows.front()[2] == doctest::Approx(3.0).epsilon(1e-10));
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    CHECK(table.rows[i][0] > table.rows[i - 1][0]);
    CHECK(std::abs(table.rows[i][3]) < tol::trace_drift);
  }
}

TEST_CASE("run: couplings mode on a ring emits equal betas") {
  const fs::path dir = make_temp_dir("couplings");
  const fs::path geom = dir / "ring.txt";
  {
    std::ofstream out(geom);
    out.precision(17); // full doubles, or the betas differ at 1e-6
    for (int k = 0; k < 6; ++k) {
      const double chi = 2.0 * M_PI * k / 6;
      out << 0.5 * std::cos(chi) << " " << 0.5 * std::sin(chi) << " 0.4\n";
    }
  }
  const auto result = validate_config(
      "mode = couplings\ngeometry.file = " + geom.string() +
      "\ngeometry.tau_cycle = 1e-6\noutput.dir = " + dir.string() + "\n");
  REQUIRE(result.ok());
  ResultTable table;
  run(*result.config, &table);
  REQUIRE(table.rows.size() == 6);
  for (const auto& row : table.rows) {
    CHECK(row[1] == doctest::Approx(table.rows[0][1]).epsilon(1e-10));
  }
}

#ifdef MULTICAT_CLI_PATH
TEST_CASE("CLI binary: exit codes for success, bad config, cap violation, validate echo") {
  const fs::path dir = make_temp_dir("cli");
  auto run_cli = [&](const std::string& args) {
    const std::string cmd = std::string(MULTICAT_CLI_PATH) + " " + args + " > " +
                            (dir / "stdout.txt").string() + " 2> " +
                            (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };

  const fs::path good = dir / "good.cfg";
  {
    std::ofstream out(good);
    out << "mode = avg-qfi-exact\nprotocol.M = 3\nprotocol.n = 10\n"
        << "protocol.phi = 0.5\nprotocol.alpha = 0.05\noutput.dir = " << dir.string() << "\n";
  }
  CHECK(run_cli("run " + good.string()) == 0);
  CHECK(fs::exists(dir / "avg-qfi-exact.csv"));
  CHECK(fs::exists(dir / "avg-qfi-exact.json"));

  CHECK(run_cli("validate " + good.string()) == 0);
  CHECK(slurp(dir / "stdout.txt").find("protocol.alpha = 0.05") != std::string::npos);

  const fs::path bad = dir / "bad.cfg";
  {
    std::ofstream out(bad);
    out << "mode = brute\nprotocol.n = 4\nprotocol.phi = 0.5\nprotocol.alpha = 0.05\n";
  }
  CHECK(run_cli("run " + bad.string()) == 2);
  CHECK(slurp(dir / "stderr.txt").find("protocol.M") != std::string::npos);

  const fs::path capped = dir / "capped.cfg";
  {
    std::ofstream out(capped);
    out << "mode = brute\nprotocol.M = 3\nprotocol.n = 30\nprotocol.phi = 0.5\n"
        << "protocol.alpha = 0.05\noutput.dir = " << dir.string() << "\n";
  }
  CHECK(run_cli("run " + capped.string()) == 3);

  // Forcing a two-step RK4 across a stiff window aborts with exit code 4.
  const fs::path stiff = dir / "stiff.cfg";
  {
    std::ofstream out(stiff);
    out << "mode = master-eq\nprotocol.M = 4\nprotocol.n = 4000\nprotocol.phi = 2.0\n"
        << "protocol.alpha = 0.4\nmaster.steps = 2\noutput.dir = " << dir.string() << "\n";
  }
  CHECK(run_cli("run " + stiff.string()) == 4);

  // --seed and --out overrides land in the metadata echo.
  CHECK(run_cli("run " + good.string() + " --seed 777 --out " + (dir / "o2").string()) == 0);
  CHECK(slurp(dir / "o2" / "avg-qfi-exact.json").find("\"seed\": 777") != std::string::npos);
}
#endif

} // TEST_SUITE
