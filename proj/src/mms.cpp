#include "hodgewave/mms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace hodgewave {

namespace {

constexpr double kPi = std::numbers::pi;

// P(z) = z^2 (z - 1)^2 and its first two derivatives.
double poly(double z) { return z * z * (z - 1.0) * (z - 1.0); }
double poly_d1(double z) { return 2.0 * z * (z - 1.0) * (2.0 * z - 1.0); }
double poly_d2(double z) { return 12.0 * z * z - 12.0 * z + 2.0; }

Proxy scalar(double v) { return Proxy(v, 0.0); }

SpatialField at_time(const SpaceTimeField& f, double t) {
  if (!f) return {};
  return [f, t](const Point& x) { return f(x, t); };
}

}  // namespace

InitialData ManufacturedCase::initial_data(double t0) const {
  InitialData data;
  data.sigma = at_time(sigma, t0);
  data.dsigma = at_time(dsigma, t0);
  data.mu = at_time(mu, t0);
  data.dmu = at_time(dmu, t0);
  data.omega = at_time(omega, t0);
  return data;
}

ManufacturedCase case_k0() {
  ManufacturedCase mc;
  mc.name = "k0";
  mc.k = 0;
  mc.mu = [](const Point& p, double t) {
    return scalar(std::exp(-t) * std::sin(kPi * p.x()) * std::sin(kPi * p.y()));
  };
  mc.dmu = [](const Point& p, double t) {
    const double sx = std::sin(kPi * p.x()), cx = std::cos(kPi * p.x());
    const double sy = std::sin(kPi * p.y()), cy = std::cos(kPi * p.y());
    return Proxy(kPi * std::exp(-t) * sx * cy, -kPi * std::exp(-t) * cx * sy);
  };
  mc.omega = [](const Point& p, double t) {
    const double sx = std::sin(kPi * p.x()), cx = std::cos(kPi * p.x());
    const double sy = std::sin(kPi * p.y()), cy = std::cos(kPi * p.y());
    return Proxy(-kPi * std::exp(-t) * sx * cy, kPi * std::exp(-t) * cx * sy);
  };
  mc.source = [](const Point& p, double t) {
    return scalar(-(1.0 + 2.0 * kPi * kPi) * std::exp(-t) * std::sin(kPi * p.x()) * std::sin(kPi * p.y()));
  };
  return mc;
}

ManufacturedCase case_k1() {
  // mu = e^{-t} (A, B) with A = sin^2(pi x) sin^2(pi y) and B = P(x) P(y).
  struct Parts {
    double a, ax, ay, axx, ayy, axy;
    double b, bx, by, bxx, byy, bxy;
  };
  auto parts = [](const Point& p) {
    const double x = p.x(), y = p.y();
    const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
    const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
    Parts q;
    q.a = sx * sx * sy * sy;
    q.ax = 2.0 * kPi * sx * cx * sy * sy;
    q.ay = 2.0 * kPi * sx * sx * sy * cy;
    q.axx = 2.0 * kPi * kPi * std::cos(2.0 * kPi * x) * sy * sy;
    q.ayy = 2.0 * kPi * kPi * sx * sx * std::cos(2.0 * kPi * y);
    q.axy = 4.0 * kPi * kPi * sx * cx * sy * cy;
    q.b = poly(x) * poly(y);
    q.bx = poly_d1(x) * poly(y);
    q.by = poly(x) * poly_d1(y);
    q.bxx = poly_d2(x) * poly(y);
    q.byy = poly(x) * poly_d2(y);
    q.bxy = poly_d1(x) * poly_d1(y);
    return q;
  };

  ManufacturedCase mc;
  mc.name = "k1";
  mc.k = 1;
  mc.sigma = [parts](const Point& p, double t) {
    const Parts q = parts(p);
    return scalar(std::exp(-t) * (q.ay - q.bx));
  };
  mc.dsigma = [parts](const Point& p, double t) {
    const Parts q = parts(p);
    return Proxy(std::exp(-t) * (q.ayy - q.bxy), -std::exp(-t) * (q.axy - q.bxx));
  };
  mc.mu = [parts](const Point& p, double t) {
    const Parts q = parts(p);
    return Proxy(std::exp(-t) * q.a, std::exp(-t) * q.b);
  };
  mc.dmu = [parts](const Point& p, double t) {
    const Parts q = parts(p);
    return scalar(std::exp(-t) * (q.ax + q.by));
  };
  mc.omega = [parts](const Point& p, double t) {
    const Parts q = parts(p);
    return scalar(-std::exp(-t) * (q.ax + q.by));
  };
  mc.source = [parts](const Point& p, double t) {
    const Parts q = parts(p);
    return Proxy(std::exp(-t) * (q.axx + q.ayy - q.a), std::exp(-t) * (q.bxx + q.byy - q.b));
  };
  return mc;
}

ManufacturedCase case_k2(BoundaryCondition bc) {
  ManufacturedCase mc;
  mc.name = "k2";
  mc.k = 2;
  mc.bc = bc;
  mc.sigma = [](const Point& p, double t) {
    const double sx = std::sin(kPi * p.x()), cx = std::cos(kPi * p.x());
    const double sy = std::sin(kPi * p.y()), cy = std::cos(kPi * p.y());
    return Proxy(kPi * std::exp(-t) * cx * sy, kPi * std::exp(-t) * sx * cy);
  };
  mc.dsigma = [](const Point& p, double t) {
    return scalar(-2.0 * kPi * kPi * std::exp(-t) * std::sin(kPi * p.x()) * std::sin(kPi * p.y()));
  };
  mc.mu = [](const Point& p, double t) {
    return scalar(std::exp(-t) * std::sin(kPi * p.x()) * std::sin(kPi * p.y()));
  };
  mc.source = [](const Point& p, double t) {
    return scalar(-(1.0 + 2.0 * kPi * kPi) * std::exp(-t) * std::sin(kPi * p.x()) * std::sin(kPi * p.y()));
  };
  return mc;
}

ManufacturedCase case_by_degree(int k) {
  switch (k) {
    case 0: return case_k0();
    case 1: return case_k1();
    case 2: return case_k2();
    default: throw std::invalid_argument("form degree must be 0, 1 or 2");
  }
}

std::vector<std::string> error_columns(const ManufacturedCase& mc) {
  switch (mc.k) {
    case 0: return {"mu", "curl_mu", "omega"};
    case 1: return {"sigma", "curl_sigma", "mu", "div_mu", "omega"};
    case 2: return {"sigma", "div_sigma", "mu"};
    default: throw std::invalid_argument("form degree must be 0, 1 or 2");
  }
}

std::vector<double> error_norms(const ComplexOperators& ops, const BlockState& state, const ManufacturedCase& mc,
                                double t, int quad_degree) {
  if (ops.degree() != mc.k) throw std::invalid_argument("error_norms: operator degree does not match the case");
  const QuadratureRule quad = reference_quadrature(quad_degree);
  std::vector<double> out;
  auto error = [&](std::shared_ptr<const FeSpace> space, Eigen::VectorXd coeffs, const SpaceTimeField& exact) {
    out.push_back(l2_error(FormFunction(std::move(space), std::move(coeffs)), at_time(exact, t), quad));
  };
  if (ops.has_minus()) {
    error(ops.minus_space_ptr(), state.sigma, mc.sigma);
    error(ops.space_ptr(), ops.d_minus() * state.sigma, mc.dsigma);
  }
  error(ops.space_ptr(), state.mu, mc.mu);
  if (ops.has_plus()) {
    error(ops.plus_space_ptr(), ops.d() * state.mu, mc.dmu);
    error(ops.plus_space_ptr(), state.omega, mc.omega);
  }
  return out;
}

double observed_order(double e_coarse, double e_fine, double s_coarse, double s_fine) {
  return std::log(e_coarse / e_fine) / std::log(s_coarse / s_fine);
}

double least_squares_order(const std::vector<double>& errors, const std::vector<double>& sizes) {
  if (errors.size() != sizes.size() || errors.size() < 2) {
    throw std::invalid_argument("least_squares_order: need at least two matching samples");
  }
  const double m = static_cast<double>(errors.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < errors.size(); ++i) {
    const double lx = std::log(sizes[i]), ly = std::log(errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void compute_orders(ErrorReport& report, OrderVariable variable) {
  report.order_variable = variable;
  report.pair_orders.clear();
  report.lsq_orders.clear();
  if (variable == OrderVariable::None || report.rows.size() < 2) return;
  auto size_of = [variable](const ErrorRow& row) {
    return variable == OrderVariable::MeshSize ? 1.0 / row.n : row.dt;
  };
  for (size_t i = 0; i + 1 < report.rows.size(); ++i) {
    const ErrorRow& a = report.rows[i];
    const ErrorRow& b = report.rows[i + 1];
    std::vector<double> orders;
    for (size_t c = 0; c < a.errors.size(); ++c) {
      orders.push_back(observed_order(a.errors[c], b.errors[c], size_of(a), size_of(b)));
    }
    report.pair_orders.push_back(std::move(orders));
  }
  std::vector<double> sizes;
  for (const auto& row : report.rows) sizes.push_back(size_of(row));
  for (size_t c = 0; c < report.columns.size(); ++c) {
    std::vector<double> errors;
    for (const auto& row : report.rows) errors.push_back(row.errors[c]);
    report.lsq_orders.push_back(least_squares_order(errors, sizes));
  }
}

CaseSolution solve_case(const ManufacturedCase& mc, int n, double dt, double T, const StudyOptions& options,
                        const StepObserver& observer, int stride) {
  auto mesh = std::make_shared<const SimplicialMesh>(SimplicialMesh::structured_unit_square(n));
  ComplexOptions copts;
  copts.bc = mc.bc;
  copts.threads = options.assembly_threads;
  auto complex = std::make_shared<const DeRhamComplex>(mesh, copts);
  auto ops = std::make_shared<const ComplexOperators>(complex, mc.k);
  const WaveSystem sys(ops, dt);
  const BlockState init = initial_state(*ops, mc.initial_data(), options.mean_correct);
  CaseSolution out;
  out.ops = ops;
  out.result = run(sys, init, mc.source, T, observer, stride);
  return out;
}

ErrorReport convergence_study(const ManufacturedCase& mc, const std::vector<int>& levels, double dt, double T,
                              const StudyOptions& options) {
  if (levels.size() < 2) throw std::invalid_argument("convergence_study: at least two levels are required");
  ErrorReport report;
  report.case_name = mc.name;
  report.columns = error_columns(mc);
  report.rows.resize(levels.size());
  auto solve_level = [&](size_t i) {
    const CaseSolution sol = solve_case(mc, levels[i], dt, T, options);
    report.rows[i] = ErrorRow{levels[i], dt, T, error_norms(*sol.ops, sol.result.final_state, mc, T)};
  };
  if (options.parallel_levels) {
    std::vector<std::exception_ptr> failures(levels.size());
    std::vector<std::thread> workers;
    for (size_t i = 0; i < levels.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          solve_level(i);
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
    for (size_t i = 0; i < levels.size(); ++i) solve_level(i);
  }
  compute_orders(report, OrderVariable::MeshSize);
  return report;
}

ErrorReport longtime_study(const ManufacturedCase& mc, int n, double dt, const std::vector<double>& report_times,
                           const StudyOptions& options) {
  if (report_times.empty()) throw std::invalid_argument("longtime_study: no report times");
  std::vector<int> report_steps;
  double last = 0.0;
  for (double t : report_times) {
    if (t <= last && !report_steps.empty()) throw std::invalid_argument("longtime_study: report times must increase");
    report_steps.push_back(step_count(t, dt));
    last = t;
  }
  ErrorReport report;
  report.case_name = mc.name;
  report.columns = error_columns(mc);
  std::shared_ptr<const ComplexOperators> ops;
  std::vector<BlockState> snapshots;
  size_t next = 0;
  const StepObserver observer = [&](int step, const BlockState& state, double, double) {
    if (next < report_steps.size() && step == report_steps[next]) {
      snapshots.push_back(state);
      ++next;
    }
  };
  const CaseSolution sol = solve_case(mc, n, dt, report_times.back(), options, observer,
                                      std::max(1, report_steps.back()));
  for (size_t i = 0; i < snapshots.size(); ++i) {
    report.rows.push_back(
        ErrorRow{n, dt, report_times[i], error_norms(*sol.ops, snapshots[i], mc, report_times[i])});
  }
  return report;
}

ErrorReport temporal_study(const ManufacturedCase& mc, int n, const std::vector<double>& dts, double T,
                           const StudyOptions& options, TemporalReference reference, int refinement) {
  if (dts.size() < 2) throw std::invalid_argument("temporal_study: at least two time steps are required");
  ErrorReport report;
  report.case_name = mc.name;
  if (reference == TemporalReference::ExactSolution) {
    report.columns = error_columns(mc);
    for (double dt : dts) {
      const CaseSolution sol = solve_case(mc, n, dt, T, options);
      report.rows.push_back(ErrorRow{n, dt, T, error_norms(*sol.ops, sol.result.final_state, mc, T)});
    }
  } else {
    if (refinement < 2) throw std::invalid_argument("temporal_study: refinement must be at least 2");
    const double finest = *std::min_element(dts.begin(), dts.end());
    const CaseSolution ref = solve_case(mc, n, finest / refinement, T, options);
    const ComplexOperators& ops = *ref.ops;
    report.columns = {"state"};
    if (ops.has_minus()) report.columns.push_back("sigma");
    report.columns.push_back("mu");
    if (ops.has_plus()) report.columns.push_back("omega");
    auto norm = [](const SparseMatrix& m, const Eigen::VectorXd& v) { return std::sqrt(v.dot(m * v)); };
    for (double dt : dts) {
      const CaseSolution sol = solve_case(mc, n, dt, T, options);
      const BlockState& a = sol.result.final_state;
      const BlockState& b = ref.result.final_state;
      std::vector<double> errors;
      std::vector<double> parts;
      if (ops.has_minus()) parts.push_back(norm(ops.mass_minus(), a.sigma - b.sigma));
      parts.push_back(norm(ops.mass(), a.mu - b.mu));
      if (ops.has_plus()) parts.push_back(norm(ops.mass_plus(), a.omega - b.omega));
      double sq = 0.0;
      for (double p : parts) sq += p * p;
      errors.push_back(std::sqrt(sq));
      errors.insert(errors.end(), parts.begin(), parts.end());
      report.rows.push_back(ErrorRow{n, dt, T, std::move(errors)});
    }
  }
  compute_orders(report, OrderVariable::TimeStep);
  return report;
}

}  // namespace hodgewave
