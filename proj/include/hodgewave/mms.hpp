#pragma once

#include <string>
#include <vector>

#include "hodgewave/wave.hpp"

namespace hodgewave {

// An exact solution of the mixed system (sigma = delta u, mu = u_t, omega = d u) with
// the source that produces it. Fields of the absent neighbours are left empty.
struct ManufacturedCase {
  std::string name;
  int k = 0;
  BoundaryCondition bc = BoundaryCondition::Essential;
  SpaceTimeField sigma, dsigma;
  SpaceTimeField mu, dmu;
  SpaceTimeField omega;
  SpaceTimeField source;

  InitialData initial_data(double t0 = 0.0) const;
};

ManufacturedCase case_k0();
ManufacturedCase case_k1();
// The exact flux of this case has a nonzero normal trace, so it is posed by default
// on the complex without trace conditions, where mu = 0 on the boundary is natural.
ManufacturedCase case_k2(BoundaryCondition bc = BoundaryCondition::Natural);
ManufacturedCase case_by_degree(int k);

// Column labels in the order error_norms returns them: sigma and d sigma when V^-
// exists, then mu, then d mu and omega when V^+ exists.
std::vector<std::string> error_columns(const ManufacturedCase& mc);

constexpr int kErrorQuadratureDegree = 12;

std::vector<double> error_norms(const ComplexOperators& ops, const BlockState& state,
                                const ManufacturedCase& mc, double t,
                                int quad_degree = kErrorQuadratureDegree);

struct ErrorRow {
  int n = 0;
  double dt = 0.0;
  double T = 0.0;
  std::vector<double> errors;
};

enum class OrderVariable { MeshSize, TimeStep, None };

struct ErrorReport {
  std::string case_name;
  std::vector<std::string> columns;
  std::vector<ErrorRow> rows;
  OrderVariable order_variable = OrderVariable::None;
  // pair_orders[i][c] compares rows i and i+1.
  std::vector<std::vector<double>> pair_orders;
  std::vector<double> lsq_orders;
};

// log(e_coarse / e_fine) / log(s_coarse / s_fine).
double observed_order(double e_coarse, double e_fine, double s_coarse, double s_fine);
// Slope of the least-squares line through (log s_i, log e_i).
double least_squares_order(const std::vector<double>& errors, const std::vector<double>& sizes);
void compute_orders(ErrorReport& report, OrderVariable variable);

struct StudyOptions {
  bool mean_correct = true;
  bool parallel_levels = false;
  int assembly_threads = 1;
};

struct CaseSolution {
  std::shared_ptr<const ComplexOperators> ops;
  RunResult result;
};

CaseSolution solve_case(const ManufacturedCase& mc, int n, double dt, double T, const StudyOptions& options = {},
                        const StepObserver& observer = {}, int stride = 1);

ErrorReport convergence_study(const ManufacturedCase& mc, const std::vector<int>& levels, double dt, double T,
                              const StudyOptions& options = {});

// One run on level n, with error rows recorded at each report time.
ErrorReport longtime_study(const ManufacturedCase& mc, int n, double dt, const std::vector<double>& report_times,
                           const StudyOptions& options = {});

enum class TemporalReference {
  ExactSolution,  // error columns of error_norms
  FineStep,       // distance to the same-mesh solution with the smallest step divided by refinement
};

// Errors at T on a fixed mesh for a sequence of time steps. Against the fine-step
// reference the columns are the block norm of the state difference followed by the
// L2 norm of each component, so the spatial error cancels.
ErrorReport temporal_study(const ManufacturedCase& mc, int n, const std::vector<double>& dts, double T,
                           const StudyOptions& options = {},
                           TemporalReference reference = TemporalReference::FineStep, int refinement = 8);

}  // namespace hodgewave
