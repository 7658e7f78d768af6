#include "multicat/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "multicat/master_eq.hpp"
#include "multicat/nv_model.hpp"
#include "multicat/protocol.hpp"
#include "multicat/qfi.hpp"
#include "multicat/version.hpp"

namespace multicat {

namespace {

// Runs fn(i) for i in [0, count) across up to `threads` workers. Callers
// write into preallocated slots indexed by i, so the result layout is
// independent of the schedule.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  const int nthreads = std::max(1, std::min(threads, count));
  if (nthreads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  const int chunk = (count + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin < end) {
      pool.emplace_back([&fn, begin, end] {
        for (int i = begin; i < end; ++i) fn(i);
      });
    }
  }
  for (auto& th : pool) th.join();
}

ProtocolParams protocol_from_config(const ExperimentConfig& cfg) {
  ProtocolParams params;
  params.num_spins = cfg.num_spins;
  params.phi = cfg.phi;
  if (cfg.alpha) {
    params.couplings.assign(static_cast<std::size_t>(cfg.num_spins), *cfg.alpha);
  } else if (cfg.couplings) {
    params.couplings = *cfg.couplings;
  } else if (cfg.disorder) {
    params.couplings = disorder_sample(*cfg.disorder, cfg.num_spins, cfg.seed, 0);
  } else {
    throw std::invalid_argument("no coupling source resolved");
  }
  params.validate();
  return params;
}

ResultTable table_sample(const ExperimentConfig& cfg) {
  const ProtocolParams params = protocol_from_config(cfg);
  ResultTable table;
  table.columns = {"sample", "cycles", "qfi", "probability", "log_probability"};
  table.rows.resize(static_cast<std::size_t>(cfg.sample_count));
  parallel_for(cfg.sample_count, cfg.threads, [&](int i) {
    const TrajectorySample s = sample_trajectory(params, cfg.cycles, cfg.seed,
                                                 static_cast<std::uint64_t>(i),
                                                 cfg.repr_override, cfg.caps);
    table.rows[static_cast<std::size_t>(i)] = {
        static_cast<double>(i), static_cast<double>(cfg.cycles), pure_qfi_jz(s.state),
        s.probability, s.log_probability};
  });
  return table;
}

ResultTable table_avg_qfi_exact(const ExperimentConfig& cfg) {
  const ProtocolParams params = protocol_from_config(cfg);
  const AvgQfiCurve curve =
      params.symmetric()
          ? avg_qfi_exact_sym(params.couplings.front(), params.phi, params.num_spins, cfg.cycles)
          : avg_qfi_exact_nonsym(params.couplings, params.phi, cfg.cycles);
  ResultTable table;
  table.columns = {"cycle", "h", "fq"};
  table.rows.reserve(curve.cycles.size());
  for (std::size_t i = 0; i < curve.cycles.size(); ++i) {
    table.rows.push_back({static_cast<double>(curve.cycles[i]), curve.h_values[i],
                          curve.values[i]});
  }
  return table;
}

ResultTable table_avg_qfi_mc(const ExperimentConfig& cfg) {
  const ProtocolParams params = protocol_from_config(cfg);
  const auto [estimate, stderr_] = avg_qfi_mc(params, cfg.cycles, cfg.mc_samples, cfg.seed,
                                              cfg.threads, cfg.caps, cfg.repr_override);
  ResultTable table;
  table.columns = {"cycles", "samples", "estimate", "stderr"};
  table.rows.push_back({static_cast<double>(cfg.cycles), static_cast<double>(cfg.mc_samples),
                        estimate, stderr_});
  return table;
}

ResultTable table_brute(const ExperimentConfig& cfg) {
  const ProtocolParams params = protocol_from_config(cfg);
  ResultTable table;
  table.columns = {"cycles", "fq"};
  table.rows.push_back({static_cast<double>(cfg.cycles), avg_qfi_brute(params, cfg.cycles, cfg.caps)});
  return table;
}

ResultTable table_master_eq(const ExperimentConfig& cfg) {
  const bool disordered = cfg.disorder && cfg.disorder->sigma > 0.0;
  const double alpha = cfg.alpha.value_or(0.0);

  LindbladParams params =
      disordered
          ? LindbladParams::from_disorder(alpha, cfg.phi, cfg.disorder->sigma, cfg.num_spins,
                                          cfg.master_dt)
          : LindbladParams::from_cycle(alpha, cfg.phi, cfg.master_dt);
  params.collective_axis = cfg.master_axis;

  const Repr repr = disordered ? Repr::FullTensor : Repr::Dicke;
  if (repr == Repr::FullTensor && cfg.num_spins > cfg.caps.master_full_max_spins) {
    throw cap_exceeded("master-eq: disordered integration capped at M <= " +
                       std::to_string(cfg.caps.master_full_max_spins));
  }
  const StateVector plus = scs_state({0.5 * M_PI, 0.0}, cfg.num_spins, repr, cfg.caps);
  const double t_final = cfg.cycles * cfg.master_dt;
  const int steps = cfg.master_steps > 0 ? cfg.master_steps : default_steps(params, t_final);

  const auto trace = integrate(DensityOperator::pure(plus), params, t_final, steps, 0, cfg.caps);

  ResultTable table;
  table.columns = {"t", "cycle_equivalent", "qfi_proxy", "trace_defect", "min_eigenvalue"};
  table.rows.reserve(trace.size());
  for (const auto& [t, rho] : trace) {
    table.rows.push_back({t, t / cfg.master_dt, qfi_proxy(rho), rho.trace_defect(),
                          rho.min_eigenvalue()});
  }
  return table;
}

ResultTable table_fig2(const ExperimentConfig& cfg) {
  // H depends only on (alpha, phi); one recursion per alpha covers every M.
  std::vector<double> h_final(cfg.fig2_alphas.size());
  parallel_for(static_cast<int>(cfg.fig2_alphas.size()), cfg.threads, [&](int i) {
    const AvgQfiCurve curve =
        avg_qfi_exact_sym(cfg.fig2_alphas[static_cast<std::size_t>(i)], cfg.phi, 2, cfg.cycles);
    h_final[static_cast<std::size_t>(i)] = curve.h_values.back();
  });

  ResultTable table;
  table.columns = {"alpha", "M", "n", "fq_exact", "fq_asymptote"};
  for (std::size_t i = 0; i < cfg.fig2_alphas.size(); ++i) {
    for (int m = cfg.fig2_m_min; m <= cfg.fig2_m_max; ++m) {
      const double fq = m + static_cast<double>(m) * (m - 1) * h_final[i];
      table.rows.push_back({cfg.fig2_alphas[i], static_cast<double>(m),
                            static_cast<double>(cfg.cycles), fq, asymptotic_qfi(m, true)});
    }
  }
  return table;
}

ResultTable table_fig3(const ExperimentConfig& cfg) {
  const int n_sigmas = static_cast<int>(cfg.fig3_sigmas.size());
  const int r = cfg.realizations;
  const double mean = cfg.disorder ? cfg.disorder->mean : 0.05;

  // Disorder realization (sigma s, replica j) uses RNG stream s * r + j, so
  // the sweep layout is part of the reproducibility contract.
  std::vector<std::vector<double>> curves(static_cast<std::size_t>(n_sigmas * r));
  parallel_for(n_sigmas * r, cfg.threads, [&](int idx) {
    const int s = idx / r;
    const DisorderModel model{mean, cfg.fig3_sigmas[static_cast<std::size_t>(s)]};
    const std::vector<double> couplings =
        disorder_sample(model, cfg.num_spins, cfg.seed, static_cast<std::uint64_t>(idx));
    curves[static_cast<std::size_t>(idx)] =
        avg_qfi_exact_nonsym(couplings, cfg.phi, cfg.cycles).values;
  });

  ResultTable table;
  table.columns = {"sigma", "cycle", "fq_avg", "realizations"};
  for (int s = 0; s < n_sigmas; ++s) {
    std::vector<double> avg(static_cast<std::size_t>(cfg.cycles) + 1, 0.0);
    for (int j = 0; j < r; ++j) {
      const auto& curve = curves[static_cast<std::size_t>(s * r + j)];
      for (std::size_t c = 0; c < avg.size(); ++c) avg[c] += curve[c];
    }
    for (std::size_t c = 0; c < avg.size(); ++c) {
      table.rows.push_back({cfg.fig3_sigmas[static_cast<std::size_t>(s)],
                            static_cast<double>(c), avg[c] / r, static_cast<double>(r)});
    }
  }
  return table;
}

ResultTable table_couplings(const ExperimentConfig& cfg) {
  const SpinGeometry geometry = load_geometry_file(cfg.geometry_file);
  const CouplingSet set = couplings_from_positions(geometry, cfg.tau_cycle);
  ResultTable table;
  table.columns = {"spin", "beta", "frame_angle", "alpha"};
  for (std::size_t m = 0; m < set.betas.size(); ++m) {
    table.rows.push_back({static_cast<double>(m), set.betas[m], set.frame_angles[m],
                          set.alphas[m]});
  }
  return table;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

} // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ",";
    out += columns[c];
  }
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      out += format_double(row[c]);
    }
    out += "\n";
  }
  return out;
}

std::string ResultTable::metadata_json() const {
  nlohmann::ordered_json meta;
  meta["artifact"] = "multicat";
  meta["version"] = version_string;
  meta["mode"] = mode_name(config.mode);
  meta["seed"] = config.seed;
  meta["timestamp"] = iso_timestamp(); // deliberately kept out of the CSV
  meta["columns"] = columns;
  meta["rows"] = rows.size();
  nlohmann::ordered_json resolved;
  for (const auto& [key, value] : config.resolved) resolved[key] = value;
  meta["config"] = resolved;
  return meta.dump(2) + "\n";
}

ResultTable compute_table(const ExperimentConfig& config) {
  ResultTable table;
  switch (config.mode) {
    case Mode::Sample: table = table_sample(config); break;
    case Mode::AvgQfiExact: table = table_avg_qfi_exact(config); break;
    case Mode::AvgQfiMc: table = table_avg_qfi_mc(config); break;
    case Mode::Brute: table = table_brute(config); break;
    case Mode::MasterEq: table = table_master_eq(config); break;
    case Mode::Fig2: table = table_fig2(config); break;
    case Mode::Fig3: table = table_fig3(config); break;
    case Mode::Couplings: table = table_couplings(config); break;
  }
  table.config = config;
  return table;
}

RunPaths run(const ExperimentConfig& config, ResultTable* table_out) {
  ResultTable table = compute_table(config);

  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);

  RunPaths paths;
  paths.csv = (dir / (config.prefix + ".csv")).string();
  paths.json = (dir / (config.prefix + ".json")).string();

  std::ofstream csv(paths.csv, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + paths.csv);
  csv << table.to_csv();
  csv.close();

  std::ofstream json(paths.json, std::ios::binary);
  if (!json) throw std::runtime_error("cannot write " + paths.json);
  json << table.metadata_json();
  json.close();

  if (table_out) *table_out = std::move(table);
  return paths;
}

} // namespace multicat
