#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hodgewave/error.hpp"
#include "hodgewave/experiment.hpp"

namespace hodgewave {
namespace {

namespace fs = std::filesystem;

RunConfig parse(const std::string& text) { return make_config(parse_config_text(text, "test.cfg")); }

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hodgewave_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Config, TableExampleIsValid) {
  const RunConfig cfg = parse("experiment=k0_convergence\nlevels=4,8,16\ndt=0.0001\nT=0.0004");
  EXPECT_EQ(cfg.experiment, Experiment::K0Convergence);
  EXPECT_EQ(cfg.k, 0);
  EXPECT_EQ(cfg.levels, (std::vector<int>{4, 8, 16}));
  EXPECT_EQ(cfg.dt, 1e-4);
  EXPECT_EQ(cfg.T, 4e-4);
}

TEST(Config, CommentsAndWhitespace) {
  const RunConfig cfg = parse("# header\n\n  experiment = energy_conservation   # trailing\r\nstride=5\n");
  EXPECT_EQ(cfg.experiment, Experiment::EnergyConservation);
  EXPECT_EQ(cfg.stride, 5);
  EXPECT_EQ(cfg.source, SourceKind::Zero);
  EXPECT_EQ(cfg.dt, 0.25);
  EXPECT_EQ(cfg.T, 25.0);
}

TEST(Config, RejectsInvalidValuesWithLineNumbers) {
  EXPECT_NE(error_of("dt=0").find("test.cfg:1: dt=0"), std::string::npos);
  EXPECT_NE(error_of("experiment=custom\ndt=-1").find("test.cfg:2"), std::string::npos);
  EXPECT_NE(error_of("levels=").find("levels must not be empty"), std::string::npos);
  EXPECT_NE(error_of("levels=4,x").find("not a valid number"), std::string::npos);
  EXPECT_NE(error_of("k=3").find("form degree"), std::string::npos);
  EXPECT_NE(error_of("\n\nbogus=1").find("test.cfg:3: unknown key 'bogus'"), std::string::npos);
  EXPECT_NE(error_of("dt=0.1\ndt=0.2").find("duplicate key"), std::string::npos);
  EXPECT_NE(error_of("just words").find("expected key=value"), std::string::npos);
  EXPECT_NE(error_of("dt=0.3\nT=1").find("T/dt must be an integer"), std::string::npos);
  EXPECT_NE(error_of("experiment=nope").find("unknown experiment"), std::string::npos);
  EXPECT_NE(error_of("mean_correct=maybe").find("true or false"), std::string::npos);
  EXPECT_NE(error_of("experiment=k1_longtime\nreport_times=10,5,50").find("increasing"), std::string::npos);
  EXPECT_NE(error_of("experiment=k1_longtime\nreport_times=10,30").find("must equal T"), std::string::npos);
  EXPECT_NE(error_of("dt=inf").find("test.cfg:1"), std::string::npos);
}

TEST(Config, MissingFileIsDistinct) {
  EXPECT_THROW(read_config_file("/nonexistent/hodgewave.cfg"), NotFoundError);
  try {
    read_config_file("/nonexistent/hodgewave.cfg");
  } catch (const NotFoundError& e) {
    EXPECT_NE(std::string(e.what()).find("not found"), std::string::npos);
  }
}

TEST(Config, LaterEntriesOverride) {
  ConfigEntries base = parse_config_text("experiment=k2_convergence\ndt=0.0001\nT=0.0004", "file");
  merge_entries(base, {{"dt", {"0.0002", "--dt"}}});
  const RunConfig cfg = make_config(base);
  EXPECT_EQ(cfg.dt, 2e-4);
  EXPECT_EQ(cfg.k, 2);
  base["T"] = {"0.0003", "--T"};
  try {
    make_config(base);
    FAIL() << "expected a configuration error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("T/dt"), std::string::npos);
  }
}

TEST(Config, FormatRoundTrips) {
  for (const auto e : {Experiment::K0Convergence, Experiment::K1Longtime, Experiment::EnergyConservation,
                       Experiment::Custom}) {
    RunConfig cfg = default_config(e);
    cfg.parallel = true;
    cfg.k2_boundary = BoundaryCondition::Essential;
    const std::string text = format_config(cfg);
    EXPECT_EQ(format_config(parse(text)), text);
  }
  EXPECT_NE(format_config(default_config(Experiment::K0Convergence)).find("T=4e-04\n"), std::string::npos);
  EXPECT_EQ(config_keys().size(), 15u);
}

TEST(Output, NumberFormat) {
  EXPECT_EQ(format_number(6.785e-5), "6.78500e-05");
  EXPECT_EQ(format_number(0.0), "0.00000e+00");
  EXPECT_EQ(format_number(-125.0), "-1.25000e+02");
}

TEST(Output, CsvSchema) {
  ErrorReport report;
  report.case_name = "k2";
  report.columns = {"sigma", "div_sigma", "mu"};
  report.rows = {{4, 1e-4, 4e-4, {1.0, 2.0, 3.0}}, {8, 1e-4, 4e-4, {0.25, 0.5, 0.75}}};
  compute_orders(report, OrderVariable::MeshSize);
  std::ostringstream os;
  write_errors_csv(os, report);
  EXPECT_EQ(os.str(),
            "case,n,dt,T,sigma,div_sigma,mu\n"
            "k2,4,1.00000e-04,4.00000e-04,1.00000e+00,2.00000e+00,3.00000e+00\n"
            "k2,8,1.00000e-04,4.00000e-04,2.50000e-01,5.00000e-01,7.50000e-01\n"
            "k2_order,8,1.00000e-04,4.00000e-04,2.00000e+00,2.00000e+00,2.00000e+00\n"
            "k2_order_lsq,8,1.00000e-04,4.00000e-04,2.00000e+00,2.00000e+00,2.00000e+00\n");
  std::ostringstream es;
  write_energies_csv(es, {{0, 0.0, 1.5, 2.0}, {1, 0.25, 1.5, 2.0}});
  EXPECT_EQ(es.str(), "i,t,E,H\n0,0.00000e+00,1.50000e+00,2.00000e+00\n1,2.50000e-01,1.50000e+00,2.00000e+00\n");
}

TEST(Experiment, WritesFilesAndIsBitIdentical) {
  const fs::path a = scratch("a"), b = scratch("b");
  RunConfig cfg = parse("experiment=k0_convergence\nlevels=2,4\ndt=0.0001\nT=0.0004");
  std::ostringstream log;
  cfg.out = a.string();
  ASSERT_EQ(run_experiment(cfg, log), kExitOk) << log.str();
  cfg.out = b.string();
  ASSERT_EQ(run_experiment(cfg, log), kExitOk) << log.str();
  for (const char* name : {"errors.csv", "energies.csv"}) {
    const std::string content = slurp(a / name);
    EXPECT_FALSE(content.empty()) << name;
    EXPECT_EQ(content, slurp(b / name)) << name;
    EXPECT_EQ(content.find('\r'), std::string::npos);
    EXPECT_EQ(content.back(), '\n');
  }
  const std::string errors = slurp(a / "errors.csv");
  EXPECT_EQ(errors.rfind("case,n,dt,T,mu,curl_mu,omega\n", 0), 0u);
  EXPECT_NE(errors.find("k0_order_lsq"), std::string::npos);
  EXPECT_NE(slurp(a / "summary.txt").find("experiment=k0_convergence"), std::string::npos);
}

TEST(Experiment, EnergyRunConservesAndCountsRows) {
  RunConfig cfg = parse("experiment=energy_conservation\nlevels=4\nT=2.5");
  const ExperimentResult result = compute_experiment(cfg);
  EXPECT_EQ(result.energies.size(), 11u);
  EXPECT_TRUE(result.errors.rows.empty());
  EXPECT_LE(result.energy_drift, 1e-10);
  EXPECT_LE(result.amplitude_drift, 1e-9);
  EXPECT_LE(result.max_residual, cfg.tol);
}

TEST(Experiment, ParallelLevelsDoNotChangeOutput) {
  RunConfig cfg = parse("experiment=k1_convergence\nlevels=2,4,6\nT=0.0002");
  const ExperimentResult serial = compute_experiment(cfg);
  cfg.parallel = true;
  const ExperimentResult parallel = compute_experiment(cfg);
  std::ostringstream x, y;
  write_errors_csv(x, serial.errors);
  write_errors_csv(y, parallel.errors);
  EXPECT_EQ(x.str(), y.str());
}

TEST(Experiment, SelfCheckReportsViolations) {
  // The single-cell mesh is far from the asymptotic regime.
  RunConfig cfg = parse("experiment=k0_convergence\nlevels=1,2\nself_check=true");
  const ExperimentResult result = compute_experiment(cfg);
  EXPECT_FALSE(result.violations.empty());
  std::ostringstream log;
  cfg.out = scratch("violation").string();
  EXPECT_EQ(run_experiment(cfg, log), kExitSelfCheckViolation);
}

TEST(Experiment, ResidualAboveToleranceIsASolverFailure) {
  RunConfig cfg = parse("experiment=k0_convergence\nlevels=2,3\ntol=1e-30");
  std::ostringstream log;
  cfg.out = scratch("residual").string();
  EXPECT_EQ(run_experiment(cfg, log), kExitSolverFailure);
  EXPECT_NE(log.str().find("exceeds tol"), std::string::npos);
}

#ifdef HODGEWAVE_CLI
int cli(const std::string& args, const std::string& env = {}) {
  const std::string command = env + " \"" HODGEWAVE_CLI "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  const fs::path good = dir / "good.cfg", bad = dir / "bad.cfg";
  std::ofstream(good) << "experiment=k2_convergence\nlevels=2,4\n";
  std::ofstream(bad) << "dt=0\n";
  EXPECT_EQ(cli("run " + good.string() + " --out " + (dir / "out").string()), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "out" / "errors.csv"));
  EXPECT_EQ(cli("run " + bad.string()), kExitConfigError);
  EXPECT_EQ(cli("run " + (dir / "missing.cfg").string()), kExitConfigError);
  EXPECT_EQ(cli("run --levels= --out " + (dir / "x").string()), kExitConfigError);
  EXPECT_EQ(cli("run --no-such-flag 1"), kExitConfigError);
  EXPECT_EQ(cli("run " + good.string() + " --experiment k0_convergence --self_check true --levels 1,2 --out " + (dir / "sc").string()),
            kExitSelfCheckViolation);
  EXPECT_EQ(cli("run " + good.string() + " --tol 1e-30 --out " + (dir / "tol").string()), kExitSolverFailure);
}

TEST(Cli, FlagsOverrideFileAndEnvironment) {
  const fs::path dir = scratch("cli_override");
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "experiment=energy_conservation\nlevels=2\nT=1\nout=" << (dir / "file").string() << "\n";
  EXPECT_EQ(cli("run " + cfg.string(), "HODGEWAVE_OUT=" + (dir / "env").string()), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "env" / "energies.csv"));
  EXPECT_FALSE(fs::exists(dir / "file"));
  EXPECT_EQ(cli("run " + cfg.string() + " --out " + (dir / "flag").string() + " --dt 0.5",
                "HODGEWAVE_OUT=" + (dir / "env2").string()),
            kExitOk);
  EXPECT_TRUE(fs::exists(dir / "flag" / "energies.csv"));
  EXPECT_FALSE(fs::exists(dir / "env2"));
  // T = 1 with dt = 0.5: two steps plus the initial row.
  const std::string energies = slurp(dir / "flag" / "energies.csv");
  EXPECT_EQ(std::count(energies.begin(), energies.end(), '\n'), 4);
}

TEST(Cli, MeshAndMatrixDumps) {
  const fs::path dir = scratch("cli_dump");
  EXPECT_EQ(cli("dump-mesh -n 2 -o " + (dir / "mesh.txt").string()), kExitOk);
  const std::string mesh = slurp(dir / "mesh.txt");
  EXPECT_EQ(std::count(mesh.begin(), mesh.end(), '\n'), 9 + 16 + 8);
  EXPECT_EQ(cli("export-matrix -n 2 -k 1 --matrix block-stiffness --dt 0.1 -o " + (dir / "a.txt").string()),
            kExitOk);
  EXPECT_EQ(slurp(dir / "a.txt").rfind("# ", 0), 0u);
  EXPECT_EQ(cli("export-matrix -n 2 -k 2 --matrix derivative"), kExitConfigError);
  EXPECT_EQ(cli("export-matrix -n 2 -k 5"), kExitConfigError);
}
#endif

}  // namespace
}  // namespace hodgewave
