// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hodgewave/experiment.hpp"
#include "support.hpp"

namespace hw = hodgewave;
using hw::testing::as_field;
using hw::testing::make_complex;
using hw::testing::mass_norm;
using hw::testing::random_vector;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.require(elapsed < budget_s, "runtime budget " + fixed(budget_s) + " s");
  if (!out.pass) ++failures;
  std::printf("%s criterion %d (%s):%s (%.2f s)\n", out.pass ? "PASS" : "FAIL", id, title.c_str(),
              out.detail.str().c_str(), elapsed);
  std::fflush(stdout);
}

void convergence(Outcome& out, const hw::ManufacturedCase& mc, const std::vector<double>& published_orders,
                 const std::vector<std::vector<double>>& published_values = {}) {
  hw::StudyOptions options;
  options.parallel_levels = true;
  const hw::ErrorReport report = hw::convergence_study(mc, {4, 8, 16}, 1e-4, 4e-4, options);
  for (size_t c = 0; c < report.columns.size(); ++c) {
    const double lsq = report.lsq_orders[c];
    out.detail << " " << report.columns[c] << " order " << fixed(lsq) << " (pairs " << fixed(report.pair_orders[0][c])
               << ", " << fixed(report.pair_orders[1][c]) << "; published " << fixed(published_orders[c]) << ")";
    out.require(std::abs(lsq - published_orders[c]) <= 0.25, report.columns[c] + " order");
  }
  for (size_t r = 0; r < published_values.size(); ++r) {
    for (size_t c = 0; c < published_values[r].size(); ++c) {
      const double ratio = report.rows[r].errors[c] / published_values[r][c];
      if (r == published_values.size() - 1) {
        out.detail << " " << report.columns[c] << "(1/16) " << sci(report.rows[r].errors[c]) << " vs "
                   << sci(published_values[r][c]);
      }
      out.require(ratio >= 1.0 / 3.0 && ratio <= 3.0,
                  report.columns[c] + " magnitude at n=" + std::to_string(report.rows[r].n));
    }
  }
}

void operator_suite(Outcome& out) {
  std::mt19937 rng(2024);
  const hw::QuadratureRule quad = hw::reference_quadrature(12);
  double adjoint = 0.0, identity = 0.0, orth = 0.0, idem = 0.0, commute = 0.0, stability = 0.0;
  for (auto bc : {hw::BoundaryCondition::Essential, hw::BoundaryCondition::Natural}) {
    const auto complex = make_complex(4, bc);
    for (int k = 0; k < 3; ++k) {
      const hw::ComplexOperators ops(complex, k);
      for (int trial = 0; trial < 20 && ops.has_minus(); ++trial) {
        const Eigen::VectorXd w = random_vector(rng, ops.dim()), v = random_vector(rng, ops.dim_minus());
        const double lhs = ops.coderivative(w).dot(ops.mass_minus() * v);
        const double rhs = w.dot(ops.mass() * (ops.d_minus() * v));
        adjoint = std::max(adjoint, std::abs(lhs - rhs) / (mass_norm(ops.mass(), w) *
                                                           mass_norm(ops.mass_minus(), v)));
      }
      const hw::FormFunction fn(ops.space_ptr(), random_vector(rng, ops.dim()));
      identity = std::max(identity,
                          (ops.quasi_interpolate(as_field(fn), as_field(fn, true)).coeffs - fn.coeffs)
                              .cwiseAbs().maxCoeff());
      const Eigen::VectorXd v = random_vector(rng, ops.dim());
      const auto dec = ops.hodge_decompose(v);
      orth = std::max(orth, std::abs(dec.z.dot(ops.mass() * dec.kappa)) / v.dot(ops.mass() * v));
      const auto again = ops.hodge_decompose(dec.z);
      idem = std::max(idem, (again.z - dec.z).cwiseAbs().maxCoeff() + again.kappa.cwiseAbs().maxCoeff());

      if (k < 2) {
        for (int trial = 0; trial < 20; ++trial) {
          const auto g = hw::testing::SineSeries::random(rng), h = hw::testing::SineSeries::random(rng);
          hw::SpatialField f, df;
          if (k == 0) {
            f = [g](const hw::Point& x) { return hw::Proxy(g.value(x), 0.0); };
            df = [g](const hw::Point& x) { return hw::Proxy(g.gradient(x).y(), -g.gradient(x).x()); };
          } else {
            f = [g, h](const hw::Point& x) { return hw::Proxy(g.value(x), h.value(x)); };
            df = [g, h](const hw::Point& x) { return hw::Proxy(g.gradient(x).x() + h.gradient(x).y(), 0.0); };
          }
          const Eigen::VectorXd iv = ops.quasi_interpolate(f, df).coeffs;
          const double lhs = mass_norm(ops.mass_plus(), ops.d() * iv);
          const double rhs = hw::l2_error(hw::FormFunction(ops.plus_space_ptr()), df, quad);
          stability = std::max(stability, lhs / rhs - 1.0);
        }
      }
    }
  }
  {
    const hw::ManufacturedCase mc = hw::case_k1();
    const hw::ComplexOperators ops(make_complex(8, hw::BoundaryCondition::Essential, 20), 1);
    const hw::FormFunction iv = ops.quasi_interpolate([&](const hw::Point& x) { return mc.mu(x, 0.0); },
                                                      [&](const hw::Point& x) { return mc.dmu(x, 0.0); });
    const hw::FormFunction q = ops.complex().l2_project(0, [&](const hw::Point& x) {
      return hw::Proxy(-mc.sigma(x, 0.0).x(), 0.0);
    });
    commute = mass_norm(ops.mass_minus(), ops.coderivative(iv.coeffs) - q.coeffs) / mass_norm(ops.mass_minus(), q.coeffs);
  }
  out.detail << " adjointness " << sci(adjoint) << ", I_h identity " << sci(identity) << ", commutation "
             << sci(commute) << ", d-stability excess " << sci(std::max(0.0, stability)) << ", orthogonality "
             << sci(orth) << ", idempotence " << sci(idem);
  out.require(adjoint <= 1e-12, "adjointness");
  out.require(identity <= 1e-12, "I_h identity");
  out.require(commute <= 1e-10, "commutation");
  out.require(stability <= 1e-10, "d-stability");
  out.require(orth <= 1e-12, "orthogonality");
  out.require(idem <= 1e-10, "idempotence");
  for (auto bc : {hw::BoundaryCondition::Essential, hw::BoundaryCondition::Natural}) {
    for (int k = 0; k < 2; ++k) {
      const double c4 = hw::ComplexOperators(make_complex(4, bc), k).poincare_constant();
      const double c8 = hw::ComplexOperators(make_complex(8, bc), k).poincare_constant();
      out.detail << " C_p(k=" << k << (bc == hw::BoundaryCondition::Essential ? ",ess" : ",nat") << ") " << fixed(c4)
                 << "/" << fixed(c8);
      out.require(c4 > 0.0 && c8 > 0.0, "Poincare positivity");
      out.require(std::abs(c4 - c8) <= 0.1 * c8, "Poincare mesh uniformity");
    }
  }
}

}  // namespace

int main() {
  criterion(1, "d d = 0", 1.0, [](Outcome& out) {
    for (int n : {1, 4, 16}) {
      const auto complex = make_complex(n);
      const hw::SparseMatrix dd = complex->derivative(1).matrix * complex->derivative(0).matrix;
      const double worst = dd.nonZeros() ? dd.coeffs().cwiseAbs().maxCoeff() : 0.0;
      out.detail << " n=" << n << " max|D1 D0| " << sci(worst);
      out.require(worst <= 1e-14, "n=" + std::to_string(n));
    }
  });

  criterion(2, "skew block stiffness", 5.0, [](Outcome& out) {
    const auto complex = make_complex(16);
    for (int k = 0; k < 3; ++k) {
      const hw::WaveSystem sys(std::make_shared<const hw::ComplexOperators>(complex, k), 0.1);
      const hw::SparseMatrix sum = sys.block_stiffness() + hw::SparseMatrix(sys.block_stiffness().transpose());
      const double worst = sum.nonZeros() ? sum.coeffs().cwiseAbs().maxCoeff() : 0.0;
      out.detail << " k=" << k << " " << sci(worst);
      out.require(worst <= 1e-14, "k=" + std::to_string(k));
    }
  });

  criterion(3, "energy conservation", 60.0, [](Outcome& out) {
    const hw::RunConfig cfg = hw::default_config(hw::Experiment::EnergyConservation);
    const hw::ExperimentResult r = hw::compute_experiment(cfg);
    out.detail << " rows " << r.energies.size() << ", E0 " << sci(r.energies.front().E) << ", H0 "
               << sci(r.energies.front().H) << ", drift E " << sci(r.energy_drift) << ", drift H "
               << sci(r.amplitude_drift);
    out.require(r.energies.size() == 101, "101 energy rows");
    out.require(r.energy_drift <= 1e-10, "E drift");
    out.require(r.amplitude_drift <= 1e-9, "H drift");
  });

  criterion(4, "k=0 convergence", 120.0, [](Outcome& out) {
    convergence(out, hw::case_k0(), {2.914, 1.904, 1.981},
                {{3.8253e-3, 1.3417e-1, 1.3164e-1}, {5.0314e-4, 3.5025e-2, 3.3567e-2}, {6.7850e-5, 9.5850e-3, 8.4467e-3}});
  });

  criterion(5, "k=1 convergence", 300.0, [](Outcome& out) {
    convergence(out, hw::case_k1(), {2.949, 1.942, 1.950, 1.950, 1.976});
  });

  criterion(6, "k=2 convergence", 120.0, [](Outcome& out) {
    convergence(out, hw::case_k2(), {2.002, 1.985, 1.992});
  });

  criterion(7, "long-time robustness", 600.0, [](Outcome& out) {
    const hw::ErrorReport r = hw::longtime_study(hw::case_k1(), 16, 0.1, {10.0, 30.0, 50.0});
    const size_t mu = 2;
    for (const auto& row : r.rows) out.detail << " mu(T=" << row.T << ") " << sci(row.errors[mu]);
    const double change = std::abs(r.rows.back().errors[mu] / r.rows.front().errors[mu] - 1.0);
    out.detail << ", relative change " << fixed(100.0 * change) << "% (published 3.7500e-01 vs 3.7502e-01)";
    out.require(r.rows.size() == 3, "three report times");
    out.require(change <= 0.2, "T=50 within 20% of T=10");
  });

  criterion(8, "operator property suite", 60.0, operator_suite);

  criterion(9, "temporal order", 300.0, [](Outcome& out) {
    const std::vector<double> dts = {0.1, 0.05, 0.025};
    const hw::ErrorReport r = hw::temporal_study(hw::case_k2(), 32, dts, 1.0);
    for (size_t i = 0; i + 1 < r.rows.size(); ++i) {
      const double ratio = r.rows[i].errors[0] / r.rows[i + 1].errors[0];
      out.detail << " ratio " << dts[i] << "/" << dts[i + 1] << " " << fixed(ratio);
      out.require(ratio >= 3.2 && ratio <= 4.8, "ratio at dt=" + std::to_string(dts[i]));
    }
    const hw::ErrorReport exact =
        hw::temporal_study(hw::case_k2(), 32, dts, 1.0, {}, hw::TemporalReference::ExactSolution);
    out.detail << "; against the exact solution (spatial error included):";
    for (size_t c = 0; c < exact.columns.size(); ++c) {
      out.detail << " " << exact.columns[c];
      for (size_t i = 0; i + 1 < exact.rows.size(); ++i) {
        out.detail << " " << fixed(exact.rows[i].errors[c] / exact.rows[i + 1].errors[c]);
      }
    }
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
