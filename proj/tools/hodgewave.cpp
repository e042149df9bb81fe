// Command-line front end: run experiments, dump meshes, export assembled matrices.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "hodgewave/calculus.hpp"
#include "hodgewave/error.hpp"
#include "hodgewave/experiment.hpp"
#include "hodgewave/wave.hpp"

namespace hw = hodgewave;

namespace {

hw::BoundaryCondition parse_bc(const std::string& s) {
  if (s == "essential") return hw::BoundaryCondition::Essential;
  if (s == "natural") return hw::BoundaryCondition::Natural;
  throw hw::ConfigError("boundary condition must be essential or natural, got '" + s + "'");
}

int with_output(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    return std::cout ? hw::kExitOk : hw::kExitConfigError;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open " << path << " for writing\n";
    return hw::kExitConfigError;
  }
  writer(out);
  return out ? hw::kExitOk : hw::kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving mixed finite element solver for the Hodge wave equation"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment and write errors.csv, energies.csv, summary.txt");
  std::string config_path;
  run->add_option("config", config_path, "key=value configuration file");
  std::map<std::string, std::string> flag_values;
  for (const auto& key : hw::config_keys()) {
    run->add_option("--" + key, flag_values[key], "overrides '" + key + "' from the file");
  }

  auto* dump = app.add_subcommand("dump-mesh", "Print the structured mesh, one entity per line");
  int dump_n = 4;
  std::string dump_out;
  dump->add_option("-n,--n", dump_n, "subdivisions per side")->check(CLI::PositiveNumber);
  dump->add_option("-o,--output", dump_out, "output file (default stdout)");

  auto* exporter = app.add_subcommand("export-matrix", "Write an assembled matrix as row col value triples");
  int export_n = 4, export_k = 1;
  std::string which = "mass", bc_name = "essential", export_out;
  double export_dt = 0.1;
  exporter->add_option("-n,--n", export_n, "subdivisions per side")->check(CLI::PositiveNumber);
  exporter->add_option("-k,--k", export_k, "form degree of the middle space")->check(CLI::Range(0, 2));
  exporter->add_option("--matrix", which, "mass | derivative | block-mass | block-stiffness")
      ->check(CLI::IsMember({"mass", "derivative", "block-mass", "block-stiffness"}));
  exporter->add_option("--bc", bc_name, "essential | natural")->check(CLI::IsMember({"essential", "natural"}));
  exporter->add_option("--dt", export_dt, "time step of the block system");
  exporter->add_option("-o,--output", export_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? hw::kExitOk : hw::kExitConfigError;
  }

  try {
    if (*run) {
      hw::ConfigEntries entries;
      if (!config_path.empty()) entries = hw::read_config_file(config_path);
      if (const char* env = std::getenv("HODGEWAVE_OUT"); env && *env) {
        entries["out"] = hw::ConfigEntry{env, "HODGEWAVE_OUT"};
      }
      for (const auto& key : hw::config_keys()) {
        if (run->get_option("--" + key)->count() > 0) entries[key] = hw::ConfigEntry{flag_values[key], "--" + key};
      }
      const hw::RunConfig cfg = hw::make_config(entries);
      const int code = hw::run_experiment(cfg, std::cerr);
      if (code == hw::kExitOk) std::cout << "wrote results to " << cfg.out << "\n";
      return code;
    }
    if (*dump) {
      const auto mesh = hw::SimplicialMesh::structured_unit_square(dump_n);
      return with_output(dump_out, [&](std::ostream& os) { mesh.write_text(os); });
    }
    if (*exporter) {
      auto mesh = std::make_shared<const hw::SimplicialMesh>(hw::SimplicialMesh::structured_unit_square(export_n));
      hw::ComplexOptions options;
      options.bc = parse_bc(bc_name);
      auto complex = std::make_shared<const hw::DeRhamComplex>(mesh, options);
      hw::SparseOperator op;
      if (which == "mass") {
        op = complex->mass(export_k);
      } else if (which == "derivative") {
        if (export_k > 1) throw hw::ConfigError("no derivative out of 2-forms");
        op = complex->derivative(export_k);
      } else {
        auto ops = std::make_shared<const hw::ComplexOperators>(complex, export_k);
        const hw::WaveSystem sys(ops, export_dt);
        if (which == "block-mass") {
          op = hw::SparseOperator{sys.block_mass(), hw::Symmetry::SymmetricPositiveDefinite};
        } else {
          op = hw::SparseOperator{sys.block_stiffness(), hw::Symmetry::Skew};
        }
      }
      return with_output(export_out, [&](std::ostream& os) { op.write_coordinate(os); });
    }
  } catch (const hw::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return hw::kExitConfigError;
  } catch (const hw::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return hw::kExitSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hw::kExitConfigError;
  }
  return hw::kExitOk;
}
