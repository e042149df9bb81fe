#include "hodgewave/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "hodgewave/error.hpp"

namespace hodgewave {

namespace {

constexpr double kOrderTolerance = 0.25;
constexpr double kEnergyDriftBound = 1e-10;
constexpr double kAmplitudeDriftBound = 1e-9;
constexpr double kLongtimeBound = 0.20;

ManufacturedCase make_case(const RunConfig& cfg) {
  ManufacturedCase mc = cfg.k == 2 ? case_k2(cfg.k2_boundary) : case_by_degree(cfg.k);
  if (cfg.source == SourceKind::Zero) mc.source = {};
  return mc;
}


void drifts(const std::vector<EnergyRecord>& history, double& energy, double& amplitude) {
  energy = amplitude = 0.0;
  if (history.empty()) return;
  const double e0 = history.front().E, h0 = history.front().H;
  for (const auto& r : history) {
    if (e0 > 0.0) energy = std::max(energy, std::abs(r.E - e0) / e0);
    if (h0 > 0.0) amplitude = std::max(amplitude, std::abs(r.H - h0) / h0);
  }
}

void check(ExperimentResult& result, bool ok, const std::string& line) {
  result.checks.push_back(std::string(ok ? "PASS " : "FAIL ") + line);
  if (!ok) result.violations.push_back(line);
}

void self_check(const RunConfig& cfg, ExperimentResult& result) {
  const bool convergence = cfg.experiment == Experiment::K0Convergence || cfg.experiment == Experiment::K1Convergence ||
                           cfg.experiment == Experiment::K2Convergence;
  if (convergence && !result.errors.lsq_orders.empty()) {
    const auto& expected = reference_orders(cfg.k);
    for (size_t c = 0; c < expected.size() && c < result.errors.lsq_orders.size(); ++c) {
      const double got = result.errors.lsq_orders[c];
      check(result, std::abs(got - expected[c]) <= kOrderTolerance,
            "order(" + result.errors.columns[c] + ") = " + format_number(got) + " vs " +
                format_number(expected[c]) + " +- " + format_number(kOrderTolerance));
    }
  }
  if (cfg.source == SourceKind::Zero) {
    check(result, result.energy_drift <= kEnergyDriftBound,
          "energy drift " + format_number(result.energy_drift) + " <= " + format_number(kEnergyDriftBound));
    check(result, result.amplitude_drift <= kAmplitudeDriftBound,
          "A_h U drift " + format_number(result.amplitude_drift) + " <= " + format_number(kAmplitudeDriftBound));
  }
  if (cfg.experiment == Experiment::K1Longtime && result.errors.rows.size() >= 2) {
    const auto& cols = result.errors.columns;
    const size_t mu = static_cast<size_t>(std::find(cols.begin(), cols.end(), "mu") - cols.begin());
    const double first = result.errors.rows.front().errors[mu];
    const double last = result.errors.rows.back().errors[mu];
    const double rel = std::abs(last - first) / first;
    check(result, rel <= kLongtimeBound,
          "mu error at T=" + format_number(result.errors.rows.back().T) + " within " +
              format_number(kLongtimeBound) + " of T=" + format_number(result.errors.rows.front().T) +
              " (relative change " + format_number(rel) + ")");
  }
  check(result, result.max_residual <= cfg.tol,
        "step residual " + format_number(result.max_residual) + " <= tol " + format_number(cfg.tol));
}

}  // namespace

const std::vector<double>& reference_orders(int k) {
  static const std::vector<std::vector<double>> orders = {
      {2.914, 1.904, 1.981},
      {2.949, 1.942, 1.950, 1.950, 1.976},
      {2.002, 1.985, 1.992},
  };
  return orders.at(k);
}

ExperimentResult compute_experiment(const RunConfig& cfg) {
  validate(cfg);
  const ManufacturedCase mc = make_case(cfg);
  const bool exact = cfg.source == SourceKind::Manufactured;
  StudyOptions options;
  options.mean_correct = cfg.mean_correct;

  ExperimentResult result;
  result.errors.case_name = mc.name;
  result.errors.columns = error_columns(mc);

  if (!cfg.report_times.empty()) {
    // A single trajectory on the finest level, sampled at the report times.
    std::vector<int> report_steps;
    for (double t : cfg.report_times) report_steps.push_back(step_count(t, cfg.dt));
    std::vector<BlockState> snapshots;
    size_t next = 0;
    const StepObserver observer = [&](int step, const BlockState& state, double, double) {
      if (next < report_steps.size() && step == report_steps[next]) {
        snapshots.push_back(state);
        ++next;
      }
    };
    const int n = cfg.levels.back();
    const CaseSolution sol = solve_case(mc, n, cfg.dt, cfg.T, options, observer, cfg.stride);
    result.energies = sol.result.history;
    result.max_residual = sol.result.max_residual;
    if (exact) {
      for (size_t i = 0; i < snapshots.size(); ++i) {
        result.errors.rows.push_back(ErrorRow{n, cfg.dt, cfg.report_times[i],
                                              error_norms(*sol.ops, snapshots[i], mc, cfg.report_times[i])});
      }
    }
  } else {
    std::vector<CaseSolution> solutions(cfg.levels.size());
    auto solve = [&](size_t i) { solutions[i] = solve_case(mc, cfg.levels[i], cfg.dt, cfg.T, options, {}, cfg.stride); };
    if (cfg.parallel && cfg.levels.size() > 1) {
      std::vector<std::exception_ptr> failures(cfg.levels.size());
      std::vector<std::thread> workers;
      for (size_t i = 0; i < cfg.levels.size(); ++i) {
        workers.emplace_back([&, i] {
          try {
            solve(i);
          } catch (...) {
            failures[i] = std::current_exception();
          }
        });
      }
      for (auto& w : workers) w.join();
      for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
      }
    } else {
      for (size_t i = 0; i < cfg.levels.size(); ++i) solve(i);
    }
    for (size_t i = 0; i < cfg.levels.size(); ++i) {
      result.max_residual = std::max(result.max_residual, solutions[i].result.max_residual);
      if (exact) {
        result.errors.rows.push_back(ErrorRow{cfg.levels[i], cfg.dt, cfg.T,
                                              error_norms(*solutions[i].ops, solutions[i].result.final_state,
                                                          mc, cfg.T)});
      }
    }
    result.energies = solutions.back().result.history;
    if (result.errors.rows.size() >= 2) compute_orders(result.errors, OrderVariable::MeshSize);
  }
  drifts(result.energies, result.energy_drift, result.amplitude_drift);
  self_check(cfg, result);
  return result;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

void write_errors_csv(std::ostream& os, const ErrorReport& report) {
  os << "case,n,dt,T";
  for (const auto& c : report.columns) os << "," << c;
  os << "\n";
  for (const auto& row : report.rows) {
    os << report.case_name << "," << row.n << "," << format_number(row.dt) << "," << format_number(row.T);
    for (double e : row.errors) os << "," << format_number(e);
    os << "\n";
  }
  // Order rows carry the finer level of each pair; the fit row the finest level.
  for (size_t i = 0; i < report.pair_orders.size(); ++i) {
    const ErrorRow& fine = report.rows[i + 1];
    os << report.case_name << "_order," << fine.n << "," << format_number(fine.dt) << ","
       << format_number(fine.T);
    for (double o : report.pair_orders[i]) os << "," << format_number(o);
    os << "\n";
  }
  if (!report.lsq_orders.empty()) {
    const ErrorRow& fine = report.rows.back();
    os << report.case_name << "_order_lsq," << fine.n << "," << format_number(fine.dt) << ","
       << format_number(fine.T);
    for (double o : report.lsq_orders) os << "," << format_number(o);
    os << "\n";
  }
}

void write_energies_csv(std::ostream& os, const std::vector<EnergyRecord>& energies) {
  os << "i,t,E,H\n";
  for (const auto& r : energies) {
    os << r.step << "," << format_number(r.t) << "," << format_number(r.E) << "," << format_number(r.H) << "\n";
  }
}

void write_summary(std::ostream& os, const RunConfig& cfg, const ExperimentResult& result) {
  os << "# configuration\n" << format_config(cfg);
  os << "# results\n";
  const ErrorReport& r = result.errors;
  if (!r.rows.empty()) {
    for (const auto& row : r.rows) {
      os << "n=" << row.n << " T=" << format_number(row.T);
      for (size_t c = 0; c < r.columns.size(); ++c) os << " " << r.columns[c] << "=" << format_number(row.errors[c]);
      os << "\n";
    }
  }
  for (size_t i = 0; i < r.pair_orders.size(); ++i) {
    os << "order " << r.rows[i].n << "->" << r.rows[i + 1].n << ":";
    for (size_t c = 0; c < r.columns.size(); ++c) os << " " << r.columns[c] << "=" << format_number(r.pair_orders[i][c]);
    os << "\n";
  }
  if (!r.lsq_orders.empty()) {
    os << "order least-squares:";
    for (size_t c = 0; c < r.columns.size(); ++c) os << " " << r.columns[c] << "=" << format_number(r.lsq_orders[c]);
    os << "\n";
  }
  if (!result.energies.empty()) {
    os << "E0=" << format_number(result.energies.front().E) << " H0=" << format_number(result.energies.front().H)
       << " energy_drift=" << format_number(result.energy_drift)
       << " amplitude_drift=" << format_number(result.amplitude_drift) << "\n";
  }
  os << "max_step_residual=" << format_number(result.max_residual) << "\n";
  if (cfg.self_check) {
    os << "# self-check\n";
    for (const auto& line : result.checks) os << line << "\n";
  }
}

int run_experiment(const RunConfig& cfg, std::ostream& log) {
  ExperimentResult result;
  try {
    result = compute_experiment(cfg);
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const SolverError& e) {
    log << "solver failure in " << experiment_name(cfg.experiment) << ": " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const std::invalid_argument& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    log << "cannot create output directory " << dir.string() << ": " << ec.message() << "\n";
    return kExitConfigError;
  }
  auto write = [&](const char* name, auto&& writer) {
    std::ofstream out(dir / name, std::ios::binary);
    writer(out);
    if (!out) throw std::runtime_error(std::string("failed to write ") + (dir / name).string());
  };
  try {
    write("errors.csv", [&](std::ostream& os) { write_errors_csv(os, result.errors); });
    write("energies.csv", [&](std::ostream& os) { write_energies_csv(os, result.energies); });
    write("summary.txt", [&](std::ostream& os) { write_summary(os, cfg, result); });
  } catch (const std::exception& e) {
    log << e.what() << "\n";
    return kExitConfigError;
  }

  if (result.max_residual > cfg.tol) {
    log << "solver failure: step residual " << format_number(result.max_residual) << " exceeds tol "
        << format_number(cfg.tol) << "\n";
    return kExitSolverFailure;
  }
  if (cfg.self_check && !result.violations.empty()) {
    for (const auto& v : result.violations) log << "self-check violation: " << v << "\n";
    return kExitSelfCheckViolation;
  }
  return kExitOk;
}

}  // namespace hodgewave
