#include "multicat/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace multicat {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string format_double_kv(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

struct RawConfig {
  struct Entry {
    int line;
    std::string value;
    bool used = false;
  };
  std::map<std::string, Entry> entries;
  std::vector<ConfigDiagnostic>* diags;

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  void fail(const std::string& key, const std::string& message) {
    const auto it = entries.find(key);
    diags->push_back({it == entries.end() ? 0 : it->second.line, key, message});
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }
};

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const std::string t = trim(text);
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t pos = 0;
      out = std::stod(t, &pos);
      return pos == t.size() && std::isfinite(out);
    } catch (...) {
      return false;
    }
  } else {
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc{} && p == t.data() + t.size();
  }
}

class Resolver {
public:
  Resolver(RawConfig& raw, ExperimentConfig& cfg, std::vector<ConfigDiagnostic>& diags)
      : raw_(raw), cfg_(cfg), diags_(diags) {}

  template <typename T>
  T number(const std::string& key, T fallback, T min_value, const std::string& constraint) {
    const auto text = raw_.take(key);
    T value = fallback;
    if (text && !parse_number(*text, value)) {
      raw_.fail(key, "not a valid number: '" + *text + "'");
      value = fallback;
    }
    if (value < min_value) {
      raw_.fail(key, constraint);
      value = fallback;
    }
    echo(key, value);
    return value;
  }

  template <typename T>
  std::optional<T> required_number(const std::string& key, T min_value,
                                   const std::string& constraint) {
    const auto text = raw_.take(key);
    if (!text) {
      diags_.push_back({0, key, "required field is missing"});
      return std::nullopt;
    }
    T value{};
    if (!parse_number(*text, value)) {
      raw_.fail(key, "not a valid number: '" + *text + "'");
      return std::nullopt;
    }
    if (value < min_value) {
      raw_.fail(key, constraint);
      return std::nullopt;
    }
    echo(key, value);
    return value;
  }

  std::optional<std::vector<double>> number_list(const std::string& key) {
    const auto text = raw_.take(key);
    if (!text) return std::nullopt;
    std::vector<double> values;
    std::stringstream ss(*text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double v;
      if (!parse_number(item, v)) {
        raw_.fail(key, "list entry '" + trim(item) + "' is not a number");
        return std::nullopt;
      }
      values.push_back(v);
    }
    if (values.empty()) {
      raw_.fail(key, "list must not be empty");
      return std::nullopt;
    }
    std::string echoed;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) echoed += ",";
      echoed += format_double_kv(values[i]);
    }
    cfg_.resolved[key] = echoed;
    return values;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const auto value = raw_.take(key).value_or(fallback);
    cfg_.resolved[key] = value;
    return value;
  }

  std::optional<std::string> required_text(const std::string& key) {
    const auto value = raw_.take(key);
    if (!value) {
      diags_.push_back({0, key, "required field is missing"});
      return std::nullopt;
    }
    cfg_.resolved[key] = *value;
    return *value;
  }

  template <typename T>
  void echo(const std::string& key, T value) {
    if constexpr (std::is_floating_point_v<T>) {
      cfg_.resolved[key] = format_double_kv(value);
    } else {
      cfg_.resolved[key] = std::to_string(value);
    }
  }

private:
  RawConfig& raw_;
  ExperimentConfig& cfg_;
  std::vector<ConfigDiagnostic>& diags_;
};

const std::map<std::string, Mode>& mode_table() {
  static const std::map<std::string, Mode> table = {
      {"sample", Mode::Sample},       {"avg-qfi-exact", Mode::AvgQfiExact},
      {"avg-qfi-mc", Mode::AvgQfiMc}, {"brute", Mode::Brute},
      {"master-eq", Mode::MasterEq},  {"fig2", Mode::Fig2},
      {"fig3", Mode::Fig3},           {"couplings", Mode::Couplings}};
  return table;
}

bool wants_protocol(Mode mode) {
  return mode == Mode::Sample || mode == Mode::AvgQfiExact || mode == Mode::AvgQfiMc ||
         mode == Mode::Brute || mode == Mode::MasterEq;
}

// The coupling source for protocol modes: exactly one of protocol.alpha,
// protocol.couplings, or disorder.{mean,sigma}. master-eq takes its rates
// from protocol.alpha plus optional disorder.sigma instead.
void resolve_couplings(Resolver& r, RawConfig& raw, ExperimentConfig& cfg,
                       std::vector<ConfigDiagnostic>& diags) {
  const bool has_alpha = raw.has("protocol.alpha");
  const bool has_list = raw.has("protocol.couplings");
  const bool has_disorder = raw.has("disorder.sigma") || raw.has("disorder.mean");

  if (cfg.mode == Mode::MasterEq) {
    const auto alpha = r.required_number<double>("protocol.alpha",
                                                 -std::numeric_limits<double>::infinity(), "");
    if (alpha) cfg.alpha = *alpha;
    if (has_disorder) {
      DisorderModel model;
      const auto sigma = r.required_number<double>("disorder.sigma", 0.0, "sigma must be >= 0");
      model.mean = alpha.value_or(0.0);
      if (raw.has("disorder.mean")) {
        model.mean = r.number<double>("disorder.mean", model.mean,
                                      -std::numeric_limits<double>::infinity(), "");
      }
      if (sigma) {
        model.sigma = *sigma;
        cfg.disorder = model;
      }
    }
    return;
  }

  const int sources = int(has_alpha) + int(has_list) + int(has_disorder);
  if (sources == 0) {
    diags.push_back({0, "protocol.alpha",
                     "one coupling source is required: protocol.alpha, protocol.couplings, "
                     "or disorder.{mean,sigma}"});
    return;
  }
  if (sources > 1) {
    diags.push_back({0, "protocol.alpha",
                     "protocol.alpha, protocol.couplings and disorder.* are mutually exclusive"});
    return;
  }

  if (has_alpha) {
    const auto alpha = r.required_number<double>("protocol.alpha",
                                                 -std::numeric_limits<double>::infinity(), "");
    if (alpha) cfg.alpha = *alpha;
  } else if (has_list) {
    const auto list = r.number_list("protocol.couplings");
    if (list) {
      if (static_cast<int>(list->size()) != cfg.num_spins) {
        raw.fail("protocol.couplings", "expected exactly protocol.M = " +
                                           std::to_string(cfg.num_spins) + " entries, got " +
                                           std::to_string(list->size()));
      } else {
        cfg.couplings = *list;
      }
    }
  } else {
    DisorderModel model;
    const auto mean = r.required_number<double>("disorder.mean",
                                                -std::numeric_limits<double>::infinity(), "");
    const auto sigma = r.required_number<double>("disorder.sigma", 0.0, "sigma must be >= 0");
    if (mean && sigma) {
      model.mean = *mean;
      model.sigma = *sigma;
      cfg.disorder = model;
    }
    cfg.realizations = r.number<int>("disorder.realizations", 1, 1, "must be >= 1");
  }
}

} // namespace

std::string mode_name(Mode mode) {
  for (const auto& [name, m] : mode_table()) {
    if (m == mode) return name;
  }
  return "?";
}

ValidationResult validate_config(const std::string& text) {
  ValidationResult result;
  auto& diags = result.diagnostics;

  RawConfig raw;
  raw.diags = &diags;

  // Pass 1: syntax.
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      diags.push_back({line_no, "", "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      diags.push_back({line_no, "", "empty key"});
      continue;
    }
    if (raw.entries.count(key)) {
      diags.push_back({line_no, key, "duplicate key (first on line " +
                                         std::to_string(raw.entries[key].line) + ")"});
      continue;
    }
    raw.entries[key] = {line_no, value};
  }

  // Pass 2: semantics.
  ExperimentConfig cfg;
  Resolver r(raw, cfg, diags);

  const auto mode_text = raw.take("mode");
  if (!mode_text) {
    diags.push_back({0, "mode", "required field is missing"});
    return result;
  }
  const auto mode_it = mode_table().find(trim(*mode_text));
  if (mode_it == mode_table().end()) {
    raw.fail("mode", "unknown mode '" + *mode_text + "'");
    return result;
  }
  cfg.mode = mode_it->second;
  cfg.resolved["mode"] = mode_name(cfg.mode);

  cfg.seed = r.number<std::uint64_t>("seed", 12345u, 0u, "");
  cfg.threads = r.number<int>("threads", 1, 1, "must be >= 1");

  const char* env_dir = std::getenv("MULTICAT_OUT_DIR");
  cfg.out_dir = r.text("output.dir", env_dir ? env_dir : ".");
  cfg.prefix = r.text("output.prefix", mode_name(cfg.mode));

  const std::string repr = r.text("representation", "auto");
  if (repr == "dicke") cfg.repr_override = Repr::Dicke;
  else if (repr == "full") cfg.repr_override = Repr::FullTensor;
  else if (repr != "auto") raw.fail("representation", "expected auto, dicke or full");

  cfg.caps.full_tensor_max_spins =
      r.number<int>("caps.full_tensor_max_M", cfg.caps.full_tensor_max_spins, 1, "must be >= 1");
  cfg.caps.enumerate_max_cycles =
      r.number<int>("caps.enumerate_max_n", cfg.caps.enumerate_max_cycles, 0, "must be >= 0");
  cfg.caps.decomposition_max_cycles = r.number<int>(
      "caps.decomposition_max_n", cfg.caps.decomposition_max_cycles, 0, "must be >= 0");
  cfg.caps.brute_max_cycles =
      r.number<int>("caps.brute_max_n", cfg.caps.brute_max_cycles, 0, "must be >= 0");
  cfg.caps.brute_max_spins =
      r.number<int>("caps.brute_max_M", cfg.caps.brute_max_spins, 1, "must be >= 1");
  cfg.caps.master_full_max_spins =
      r.number<int>("caps.master_full_max_M", cfg.caps.master_full_max_spins, 1, "must be >= 1");

  if (wants_protocol(cfg.mode)) {
    const auto m = r.required_number<int>("protocol.M", 1, "M must be >= 1");
    const auto n = r.required_number<int>("protocol.n", 0, "n must be >= 0");
    const auto phi = r.required_number<double>(
        "protocol.phi", -std::numeric_limits<double>::infinity(), "");
    if (m) cfg.num_spins = *m;
    if (n) cfg.cycles = *n;
    if (phi) cfg.phi = *phi;
    if (m) resolve_couplings(r, raw, cfg, diags);
  }

  switch (cfg.mode) {
    case Mode::Sample:
      cfg.sample_count = r.number<int>("sample.count", 1, 1, "must be >= 1");
      break;
    case Mode::AvgQfiMc: {
      const auto samples = r.required_number<int>("mc.samples", 2, "need at least 2 samples");
      if (samples) cfg.mc_samples = *samples;
      break;
    }
    case Mode::MasterEq: {
      cfg.master_dt = r.number<double>("master.dt", 1.0,
                                       std::numeric_limits<double>::min(), "dt must be > 0");
      cfg.master_steps = r.number<int>("master.steps", 0, 0, "must be >= 0 (0 = auto)");
      const std::string axis = r.text("master.collective", "x");
      if (axis == "z") cfg.master_axis = CollectiveAxis::Z;
      else if (axis != "x") raw.fail("master.collective", "expected x or z");
      break;
    }
    case Mode::Fig2: {
      const auto alphas = r.number_list("fig2.alphas");
      cfg.fig2_alphas = alphas.value_or(std::vector<double>{0.02, 0.05, 0.1});
      if (!alphas) {
        cfg.resolved["fig2.alphas"] = "0.02,0.05,0.1";
      }
      cfg.fig2_m_min = r.number<int>("fig2.M_min", 2, 1, "must be >= 1");
      cfg.fig2_m_max = r.number<int>("fig2.M_max", 10, 1, "must be >= 1");
      if (cfg.fig2_m_max < cfg.fig2_m_min) raw.fail("fig2.M_max", "must be >= fig2.M_min");
      cfg.cycles = r.number<int>("fig2.n", 5000, 0, "must be >= 0");
      cfg.phi = r.number<double>("fig2.phi", 0.5,
                                 -std::numeric_limits<double>::infinity(), "");
      break;
    }
    case Mode::Fig3: {
      const auto sigmas = r.number_list("fig3.sigmas");
      cfg.fig3_sigmas = sigmas.value_or(std::vector<double>{0.002, 0.007, 0.008, 0.009});
      if (!sigmas) {
        cfg.resolved["fig3.sigmas"] = "0.002,0.007,0.008,0.009";
      }
      for (double s : cfg.fig3_sigmas) {
        if (s < 0.0) raw.fail("fig3.sigmas", "sigma values must be >= 0");
      }
      cfg.num_spins = r.number<int>("fig3.M", 4, 1, "must be >= 1");
      cfg.cycles = r.number<int>("fig3.n", 500, 0, "must be >= 0");
      cfg.phi = r.number<double>("fig3.phi", 0.5,
                                 -std::numeric_limits<double>::infinity(), "");
      DisorderModel model;
      model.mean = r.number<double>("fig3.mean", 0.05,
                                    -std::numeric_limits<double>::infinity(), "");
      model.sigma = 0.0;
      cfg.disorder = model;
      cfg.realizations = r.number<int>("fig3.realizations", 50, 1, "must be >= 1");
      break;
    }
    case Mode::Couplings: {
      const auto file = r.required_text("geometry.file");
      if (file) cfg.geometry_file = *file;
      const auto tau = r.required_number<double>("geometry.tau_cycle",
                                                 std::numeric_limits<double>::min(),
                                                 "tau_cycle must be > 0");
      if (tau) cfg.tau_cycle = *tau;
      break;
    }
    default:
      break;
  }

  // Anything not consumed is a typo or a key from the wrong mode.
  for (const auto& [key, entry] : raw.entries) {
    if (!entry.used) diags.push_back({entry.line, key, "unknown key for mode " + mode_name(cfg.mode)});
  }

  // Cross-field check: the symmetric-subspace representation only exists for
  // uniform couplings.
  if (cfg.repr_override == Repr::Dicke) {
    const bool uniform_list =
        cfg.couplings &&
        std::all_of(cfg.couplings->begin(), cfg.couplings->end(),
                    [&](double a) { return a == cfg.couplings->front(); });
    if ((cfg.disorder && cfg.disorder->sigma > 0.0) || (cfg.couplings && !uniform_list)) {
      diags.push_back({0, "representation",
                       "dicke requires symmetric couplings (uniform protocol.alpha)"});
    }
  }

  if (diags.empty()) result.config = std::move(cfg);
  return result;
}

ValidationResult validate_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ValidationResult result;
    result.diagnostics.push_back({0, path, "cannot open config file"});
    return result;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return validate_config(buffer.str());
}

std::string resolved_to_string(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, value] : config.resolved) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  }
  return out;
}

} // namespace multicat
