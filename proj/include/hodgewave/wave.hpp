#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hodgewave/calculus.hpp"

namespace hodgewave {

// One time level of the mixed system: sigma in V^-, mu in V, omega in V^+.
struct BlockState {
  double t = 0.0;
  Eigen::VectorXd sigma;
  Eigen::VectorXd mu;
  Eigen::VectorXd omega;
};

// Callables defining the initial data. Each field comes with its exterior derivative,
// which the quasi-interpolant needs; an empty callable stands for zero.
struct InitialData {
  SpatialField sigma, dsigma;  // delta u_0 and d delta u_0
  SpatialField mu, dmu;        // u_1 and d u_1
  SpatialField omega;          // d u_0 (its derivative vanishes)
};

class WaveSystem {
 public:
  WaveSystem(std::shared_ptr<const ComplexOperators> ops, double dt);

  const ComplexOperators& ops() const { return *ops_; }
  double dt() const { return dt_; }
  int size() const { return static_cast<int>(block_mass_.rows()); }

  const SparseMatrix& block_mass() const { return block_mass_; }
  const SparseMatrix& block_stiffness() const { return block_stiffness_; }

  Eigen::VectorXd stack(const BlockState& state) const;
  BlockState unstack(const Eigen::VectorXd& x, double t) const;
  BlockState zero_state(double t = 0.0) const;

  // Integral over [t0, t1] of the load (0, <f(t), v>, 0) by 3-point Gauss in time.
  Eigen::VectorXd source_integral(const SpaceTimeField& f, double t0, double t1) const;

  // (M + dt/2 A) U^i = (M - dt/2 A) U^{i-1} + source_integral.
  // When residual is given it receives max|b - L x| / max|b| of the solve.
  BlockState cn_step(const BlockState& prev, const Eigen::VectorXd& source_integral,
                     double* residual = nullptr) const;
  BlockState cn_step(const BlockState& prev) const;  // zero source

  double energy_E(const BlockState& state) const;
  double energy_H(const BlockState& state) const;

 private:
  void check_lengths(const BlockState& state) const;

  std::shared_ptr<const ComplexOperators> ops_;
  double dt_;
  SparseMatrix block_mass_;
  SparseMatrix block_stiffness_;
  SparseMatrix lhs_, rhs_;
  Eigen::SparseLU<SparseMatrix> solver_;
  LoadAssembler loads_;
};

inline WaveSystem assemble_system(std::shared_ptr<const ComplexOperators> ops, double dt) {
  return WaveSystem(std::move(ops), dt);
}

// Quasi-interpolants of the initial data. With mean_correct, 2-form components of
// a complex with trace conditions have their mean removed.
BlockState initial_state(const ComplexOperators& ops, const InitialData& data, bool mean_correct = true);

struct EnergyRecord {
  int step;
  double t;
  double E;
  double H;
};

using StepObserver = std::function<void(int step, const BlockState& state, double E, double H)>;

struct RunResult {
  std::vector<EnergyRecord> history;  // every stride-th step plus the last one
  BlockState final_state;
  double max_residual = 0.0;  // largest relative step residual
};

// Advance from init.t to init.t + T in N = T/dt steps. The observer sees step 0 and
// every subsequent step.
RunResult run(const WaveSystem& sys, const BlockState& init, const SpaceTimeField& f, double T,
              const StepObserver& observer = {}, int stride = 1);

int step_count(double T, double dt);

}  // namespace hodgewave
