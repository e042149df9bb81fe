#include "hodgewave/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hodgewave/error.hpp"

namespace hodgewave {

namespace {

struct ExperimentName {
  Experiment experiment;
  std::string_view name;
};

constexpr ExperimentName kExperiments[] = {
    {Experiment::K0Convergence, "k0_convergence"},
    {Experiment::K1Convergence, "k1_convergence"},
    {Experiment::K1Longtime, "k1_longtime"},
    {Experiment::K2Convergence, "k2_convergence"},
    {Experiment::EnergyConservation, "energy_conservation"},
    {Experiment::Custom, "custom"},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const ConfigEntry& entry, const std::string& key, const std::string& why) {
  throw ConfigError(entry.origin + ": " + key + "=" + entry.value + ": " + why);
}

template <typename T>
T parse_number(const ConfigEntry& entry, const std::string& key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    fail(entry, key, "not a valid number");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) fail(entry, key, "not a finite number");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(const ConfigEntry& entry, const std::string& key) {
  std::vector<T> out;
  std::string_view rest = trim(entry.value);
  if (rest.empty()) return out;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_number<T>(entry, key, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

bool parse_bool(const ConfigEntry& entry, const std::string& key) {
  const std::string_view v = trim(entry.value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(entry, key, "expected true or false");
}

std::string shortest(double v) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

std::string shortest(int v) { return std::to_string(v); }

std::string join_numbers(const auto& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + shortest(values[i]);
  return out;
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  for (const auto& entry : kExperiments) {
    if (entry.experiment == e) return entry.name;
  }
  return "custom";
}

Experiment parse_experiment(std::string_view name) {
  for (const auto& entry : kExperiments) {
    if (entry.name == name) return entry.experiment;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "k",      "levels", "dt",           "T",        "report_times", "tol",        "out",
      "stride",     "seed",   "source", "mean_correct", "parallel", "k2_boundary",  "self_check",
  };
  return keys;
}

ConfigEntries parse_config_text(std::string_view text, const std::string& source_name) {
  ConfigEntries entries;
  const auto& keys = config_keys();
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key=value, got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
    if (entries.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    entries[key] = ConfigEntry{std::string(trim(line.substr(eq + 1))), where};
  }
  return entries;
}

ConfigEntries read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("configuration file not found: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

void merge_entries(ConfigEntries& base, const ConfigEntries& overrides) {
  for (const auto& [key, entry] : overrides) base[key] = entry;
}

RunConfig default_config(Experiment e) {
  RunConfig cfg;
  cfg.experiment = e;
  switch (e) {
    case Experiment::K0Convergence:
    case Experiment::K1Convergence:
    case Experiment::K2Convergence:
      cfg.k = e == Experiment::K0Convergence ? 0 : e == Experiment::K1Convergence ? 1 : 2;
      cfg.levels = {4, 8, 16};
      cfg.dt = 1e-4;
      cfg.T = 4e-4;
      break;
    case Experiment::K1Longtime:
      cfg.k = 1;
      cfg.levels = {16};
      cfg.dt = 0.1;
      cfg.T = 50.0;
      cfg.report_times = {10.0, 30.0, 50.0};
      break;
    case Experiment::EnergyConservation:
      cfg.k = 1;
      cfg.levels = {16};
      cfg.dt = 0.25;
      cfg.T = 25.0;
      cfg.source = SourceKind::Zero;
      break;
    case Experiment::Custom:
      cfg.k = 1;
      cfg.levels = {4};
      cfg.dt = 0.01;
      cfg.T = 0.1;
      break;
  }
  return cfg;
}

RunConfig make_config(const ConfigEntries& entries) {
  Experiment experiment = Experiment::Custom;
  if (auto it = entries.find("experiment"); it != entries.end()) {
    try {
      experiment = parse_experiment(trim(it->second.value));
    } catch (const ConfigError&) {
      fail(it->second, "experiment", "unknown experiment");
    }
  }
  RunConfig cfg = default_config(experiment);
  for (const auto& [key, entry] : entries) {
    if (key == "experiment") continue;
    if (key == "k") {
      cfg.k = parse_number<int>(entry, key, entry.value);
      if (cfg.k < 0 || cfg.k > 2) fail(entry, key, "form degree must be 0, 1 or 2");
    } else if (key == "levels") {
      cfg.levels = parse_list<int>(entry, key);
      if (cfg.levels.empty()) fail(entry, key, "levels must not be empty");
      for (int n : cfg.levels) {
        if (n < 1) fail(entry, key, "mesh levels must be positive");
      }
    } else if (key == "dt") {
      cfg.dt = parse_number<double>(entry, key, entry.value);
      if (!(cfg.dt > 0.0)) fail(entry, key, "dt must be positive");
    } else if (key == "T") {
      cfg.T = parse_number<double>(entry, key, entry.value);
      if (!(cfg.T > 0.0)) fail(entry, key, "T must be positive");
    } else if (key == "report_times") {
      cfg.report_times = parse_list<double>(entry, key);
    } else if (key == "tol") {
      cfg.tol = parse_number<double>(entry, key, entry.value);
      if (!(cfg.tol > 0.0)) fail(entry, key, "tol must be positive");
    } else if (key == "out") {
      cfg.out = entry.value;
      if (cfg.out.empty()) fail(entry, key, "output directory must not be empty");
    } else if (key == "stride") {
      cfg.stride = parse_number<int>(entry, key, entry.value);
      if (cfg.stride < 1) fail(entry, key, "stride must be positive");
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(entry, key, entry.value);
    } else if (key == "source") {
      const std::string_view v = trim(entry.value);
      if (v == "manufactured") cfg.source = SourceKind::Manufactured;
      else if (v == "zero") cfg.source = SourceKind::Zero;
      else fail(entry, key, "expected manufactured or zero");
    } else if (key == "mean_correct") {
      cfg.mean_correct = parse_bool(entry, key);
    } else if (key == "parallel") {
      cfg.parallel = parse_bool(entry, key);
    } else if (key == "self_check") {
      cfg.self_check = parse_bool(entry, key);
    } else if (key == "k2_boundary") {
      const std::string_view v = trim(entry.value);
      if (v == "natural") cfg.k2_boundary = BoundaryCondition::Natural;
      else if (v == "essential") cfg.k2_boundary = BoundaryCondition::Essential;
      else fail(entry, key, "expected natural or essential");
    } else {
      fail(entry, key, "unknown key");
    }
  }
  validate(cfg);
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (cfg.levels.empty()) throw ConfigError("levels must not be empty");
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(cfg.T > 0.0)) throw ConfigError("T must be positive");
  const double steps = cfg.T / cfg.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    throw ConfigError("T/dt must be an integer (T=" + shortest(cfg.T) + ", dt=" + shortest(cfg.dt) + ")");
  }
  double previous = 0.0;
  for (double t : cfg.report_times) {
    if (!(t > previous)) throw ConfigError("report_times must be positive and increasing");
    const double s = t / cfg.dt;
    if (std::abs(s - std::round(s)) > 1e-9 * std::max(1.0, s)) {
      throw ConfigError("every report time must be a multiple of dt");
    }
    previous = t;
  }
  if (!cfg.report_times.empty() && std::abs(cfg.report_times.back() - cfg.T) > 1e-12 * cfg.T) {
    throw ConfigError("the last report time must equal T");
  }
  if (cfg.stride < 1) throw ConfigError("stride must be positive");
}

std::string format_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "experiment=" << experiment_name(cfg.experiment) << "\n";
  os << "k=" << cfg.k << "\n";
  os << "levels=" << join_numbers(cfg.levels) << "\n";
  os << "dt=" << shortest(cfg.dt) << "\n";
  os << "T=" << shortest(cfg.T) << "\n";
  if (!cfg.report_times.empty()) os << "report_times=" << join_numbers(cfg.report_times) << "\n";
  os << "tol=" << shortest(cfg.tol) << "\n";
  os << "out=" << cfg.out << "\n";
  os << "stride=" << cfg.stride << "\n";
  os << "seed=" << cfg.seed << "\n";
  os << "source=" << (cfg.source == SourceKind::Zero ? "zero" : "manufactured") << "\n";
  os << "mean_correct=" << (cfg.mean_correct ? "true" : "false") << "\n";
  os << "parallel=" << (cfg.parallel ? "true" : "false") << "\n";
  os << "k2_boundary=" << (cfg.k2_boundary == BoundaryCondition::Natural ? "natural" : "essential") << "\n";
  os << "self_check=" << (cfg.self_check ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace hodgewave
