#include "hodgewave/wave.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hodgewave/error.hpp"

namespace hodgewave {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void append_block(Triplets& out, const SparseMatrix& block, Eigen::Index r0, Eigen::Index c0,
                  double scale = 1.0) {
  for (int k = 0; k < block.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(block, k); it; ++it) {
      out.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
    }
  }
}

void append_transpose(Triplets& out, const SparseMatrix& block, Eigen::Index r0, Eigen::Index c0,
                      double scale) {
  for (int k = 0; k < block.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(block, k); it; ++it) {
      out.emplace_back(r0 + it.col(), c0 + it.row(), scale * it.value());
    }
  }
}

Eigen::VectorXd quasi_or_zero(const ComplexOperators& ops, const SpatialField& v, const SpatialField& dv) {
  if (!v) return Eigen::VectorXd::Zero(ops.dim());
  const SpatialField zero = [](const Point&) { return Proxy(0.0, 0.0); };
  return ops.quasi_interpolate(v, dv ? dv : zero).coeffs;
}

void remove_mean(const ComplexOperators& ops, int degree, Eigen::VectorXd& coeffs) {
  const auto& cx = ops.complex();
  if (cx.options().bc != BoundaryCondition::Essential || degree != 2) return;
  const Eigen::VectorXd one = cx.harmonic_basis(2).front();
  const Eigen::VectorXd m_one = cx.mass(2).matrix * one;
  coeffs -= (m_one.dot(coeffs) / m_one.dot(one)) * one;
}

std::shared_ptr<const ComplexOperators> require_operators(std::shared_ptr<const ComplexOperators> ops) {
  if (!ops) throw std::invalid_argument("WaveSystem: null operators");
  return ops;
}

}  // namespace

WaveSystem::WaveSystem(std::shared_ptr<const ComplexOperators> ops, double dt)
    : ops_(require_operators(std::move(ops))),
      dt_(dt),
      loads_(ops_->space(), ops_->complex().quadrature()) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("WaveSystem: dt must be positive");
  const int n0 = ops_->dim_minus(), n1 = ops_->dim(), n2 = ops_->dim_plus();
  const int n = n0 + n1 + n2;

  Triplets mass;
  if (ops_->has_minus()) append_block(mass, ops_->mass_minus(), 0, 0);
  append_block(mass, ops_->mass(), n0, n0);
  if (ops_->has_plus()) append_block(mass, ops_->mass_plus(), n0 + n1, n0 + n1);
  block_mass_.resize(n, n);
  block_mass_.setFromTriplets(mass.begin(), mass.end());

  // Lower blocks M D^- and D^T M^+ ; their transposes are negated entry by entry.
  Triplets stiff;
  if (ops_->has_minus()) {
    const SparseMatrix md = ops_->mass() * ops_->d_minus();
    append_block(stiff, md, n0, 0);
    append_transpose(stiff, md, 0, n0, -1.0);
  }
  if (ops_->has_plus()) {
    const SparseMatrix dtm = SparseMatrix(ops_->d().transpose()) * ops_->mass_plus();
    append_block(stiff, dtm, n0, n0 + n1);
    append_transpose(stiff, dtm, n0 + n1, n0, -1.0);
  }
  block_stiffness_.resize(n, n);
  block_stiffness_.setFromTriplets(stiff.begin(), stiff.end());

  lhs_ = block_mass_ + (0.5 * dt_) * block_stiffness_;
  rhs_ = block_mass_ - (0.5 * dt_) * block_stiffness_;
  lhs_.makeCompressed();
  solver_.analyzePattern(lhs_);
  solver_.factorize(lhs_);
  if (solver_.info() != Eigen::Success) {
    throw SolverError("WaveSystem: factorization of M + dt/2 A failed: " + solver_.lastErrorMessage());
  }
}

Eigen::VectorXd WaveSystem::stack(const BlockState& state) const {
  check_lengths(state);
  Eigen::VectorXd x(size());
  x << state.sigma, state.mu, state.omega;
  return x;
}

BlockState WaveSystem::unstack(const Eigen::VectorXd& x, double t) const {
  if (x.size() != size()) throw std::invalid_argument("WaveSystem::unstack: length mismatch");
  const int n0 = ops_->dim_minus(), n1 = ops_->dim(), n2 = ops_->dim_plus();
  return BlockState{t, x.head(n0), x.segment(n0, n1), x.tail(n2)};
}

BlockState WaveSystem::zero_state(double t) const { return unstack(Eigen::VectorXd::Zero(size()), t); }

void WaveSystem::check_lengths(const BlockState& state) const {
  if (state.sigma.size() != ops_->dim_minus() || state.mu.size() != ops_->dim() ||
      state.omega.size() != ops_->dim_plus()) {
    throw std::invalid_argument("BlockState lengths do not match the free-dof counts");
  }
}

Eigen::VectorXd WaveSystem::source_integral(const SpaceTimeField& f, double t0, double t1) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  if (!f) return out;
  static const LineRule gauss = gauss_legendre(3);
  const Eigen::VectorXd load = loads_.assemble_time_integral(f, gauss, t0, t1);
  out.segment(ops_->dim_minus(), ops_->dim()) = load;
  return out;
}

BlockState WaveSystem::cn_step(const BlockState& prev, const Eigen::VectorXd& source, double* residual) const {
  if (source.size() != size()) throw std::invalid_argument("cn_step: source length mismatch");
  const Eigen::VectorXd b = rhs_ * stack(prev) + source;
  const Eigen::VectorXd x = refined_solve(solver_, lhs_, b);
  if (residual) {
    const double scale = b.size() ? std::max(b.cwiseAbs().maxCoeff(), 1e-300) : 1.0;
    *residual = b.size() ? (b - lhs_ * x).cwiseAbs().maxCoeff() / scale : 0.0;
  }
  if (!x.allFinite()) throw SolverError("cn_step: non-finite solution");
  return unstack(x, prev.t + dt_);
}

BlockState WaveSystem::cn_step(const BlockState& prev) const {
  return cn_step(prev, Eigen::VectorXd::Zero(size()));
}

double WaveSystem::energy_E(const BlockState& state) const {
  const Eigen::VectorXd x = stack(state);
  return std::sqrt(std::max(0.0, x.dot(block_mass_ * x)));
}

double WaveSystem::energy_H(const BlockState& state) const {
  check_lengths(state);
  const ComplexOperators& ops = *ops_;
  double sq = 0.0;
  if (ops.has_minus()) {
    const Eigen::VectorXd dsigma = ops.d_minus() * state.sigma;
    sq += dsigma.dot(ops.mass() * dsigma);
    const Eigen::VectorXd delta_mu = ops.coderivative(state.mu);
    sq += delta_mu.dot(ops.mass_minus() * delta_mu);
  }
  if (ops.has_plus()) {
    const Eigen::VectorXd dmu = ops.d() * state.mu;
    sq += dmu.dot(ops.mass_plus() * dmu);
    const Eigen::VectorXd delta_omega = ops.coderivative_plus(state.omega);
    sq += delta_omega.dot(ops.mass() * delta_omega);
  }
  return std::sqrt(std::max(0.0, sq));
}

BlockState initial_state(const ComplexOperators& ops, const InitialData& data, bool mean_correct) {
  BlockState state;
  state.t = 0.0;
  const int k = ops.degree();
  if (ops.has_minus()) {
    ComplexOperators minus(ops.complex_ptr(), k - 1);
    state.sigma = quasi_or_zero(minus, data.sigma, data.dsigma);
    if (mean_correct) remove_mean(ops, k - 1, state.sigma);
  } else {
    state.sigma = Eigen::VectorXd(0);
  }
  state.mu = quasi_or_zero(ops, data.mu, data.dmu);
  if (mean_correct) remove_mean(ops, k, state.mu);
  if (ops.has_plus()) {
    ComplexOperators plus(ops.complex_ptr(), k + 1);
    state.omega = quasi_or_zero(plus, data.omega, {});
    if (mean_correct) remove_mean(ops, k + 1, state.omega);
  } else {
    state.omega = Eigen::VectorXd(0);
  }
  return state;
}

int step_count(double T, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(T >= 0.0)) throw std::invalid_argument("T must be nonnegative");
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("T = " + std::to_string(T) + " is not an integer multiple of dt = " +
                                std::to_string(dt));
  }
  return static_cast<int>(n);
}

RunResult run(const WaveSystem& sys, const BlockState& init, const SpaceTimeField& f, double T,
              const StepObserver& observer, int stride) {
  if (stride < 1) throw std::invalid_argument("run: stride must be positive");
  const int steps = step_count(T, sys.dt());
  RunResult result;
  BlockState state = init;
  auto record = [&](int i) {
    const double E = sys.energy_E(state), H = sys.energy_H(state);
    if (i % stride == 0 || i == steps) result.history.push_back({i, state.t, E, H});
    if (observer) observer(i, state, E, H);
  };
  record(0);
  for (int i = 1; i <= steps; ++i) {
    const double t0 = init.t + (i - 1) * sys.dt();
    const double t1 = init.t + i * sys.dt();
    double residual = 0.0;
    state = sys.cn_step(state, sys.source_integral(f, t0, t1), &residual);
    state.t = t1;
    result.max_residual = std::max(result.max_residual, residual);
    record(i);
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace hodgewave
