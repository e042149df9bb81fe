#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hodgewave/fespace.hpp"

namespace hodgewave {

enum class Experiment {
  K0Convergence,
  K1Convergence,
  K1Longtime,
  K2Convergence,
  EnergyConservation,
  Custom,
};

std::string_view experiment_name(Experiment e);
Experiment parse_experiment(std::string_view name);

enum class SourceKind { Manufactured, Zero };

struct RunConfig {
  Experiment experiment = Experiment::Custom;
  int k = 1;
  std::vector<int> levels;
  double dt = 0.0;
  double T = 0.0;
  std::vector<double> report_times;  // empty: only the final time
  double tol = 1e-10;                // bound on the relative residual of each step
  std::string out = "results";
  int stride = 1;
  std::uint64_t seed = 1;
  SourceKind source = SourceKind::Manufactured;
  bool mean_correct = true;
  bool parallel = false;
  BoundaryCondition k2_boundary = BoundaryCondition::Natural;
  bool self_check = false;
};

// Raw key=value pairs with where each came from ("file.cfg:3", "--dt", ...).
struct ConfigEntry {
  std::string value;
  std::string origin;
};
using ConfigEntries = std::map<std::string, ConfigEntry>;

const std::vector<std::string>& config_keys();

ConfigEntries parse_config_text(std::string_view text, const std::string& source_name);
// Throws NotFoundError when the file cannot be opened.
ConfigEntries read_config_file(const std::string& path);

// Later entries win.
void merge_entries(ConfigEntries& base, const ConfigEntries& overrides);

// Experiment defaults, then the entries, then validation.
RunConfig make_config(const ConfigEntries& entries);

RunConfig default_config(Experiment e);
void validate(const RunConfig& cfg);

// key=value lines that parse back to the same configuration.
std::string format_config(const RunConfig& cfg);

}  // namespace hodgewave
