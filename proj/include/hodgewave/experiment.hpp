#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hodgewave/config.hpp"
#include "hodgewave/mms.hpp"

namespace hodgewave {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitSolverFailure = 3,
  kExitSelfCheckViolation = 4,
};

// Published observed orders of the convergence experiments, one per error column.
const std::vector<double>& reference_orders(int k);

struct ExperimentResult {
  ErrorReport errors;                 // empty rows when there is no exact solution
  std::vector<EnergyRecord> energies;  // finest level
  double max_residual = 0.0;
  double energy_drift = 0.0;  // max_i |E_i - E_0| / E_0
  double amplitude_drift = 0.0;  // the same for H
  std::vector<std::string> checks;      // human-readable self-check lines
  std::vector<std::string> violations;  // failed self-check lines
};

// Pure computation; throws SolverError or ConfigError.
ExperimentResult compute_experiment(const RunConfig& cfg);

// Six significant digits in scientific notation.
std::string format_number(double v);

void write_errors_csv(std::ostream& os, const ErrorReport& report);
void write_energies_csv(std::ostream& os, const std::vector<EnergyRecord>& energies);
void write_summary(std::ostream& os, const RunConfig& cfg, const ExperimentResult& result);

// Computes, writes errors.csv, energies.csv and summary.txt under cfg.out and
// returns the process exit code. Diagnostics go to log.
int run_experiment(const RunConfig& cfg, std::ostream& log);

}  // namespace hodgewave
