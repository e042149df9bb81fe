#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "hodgewave/assembly.hpp"

namespace hodgewave {

struct ComplexOptions {
  BoundaryCondition bc = BoundaryCondition::Essential;
  int assembly_degree = 8;  // load vectors and projections
  int threads = 1;
  // Mass shift on multiplier spaces whose derivative has a kernel (constants of the
  // 0-forms without trace conditions).
  double kernel_shift = 1e-10;
};

// The full discrete complex V^0 -d-> V^1 -d-> V^2 on one mesh: spaces, masses,
// derivative matrices and mass factorizations. Immutable after construction.
class DeRhamComplex {
 public:
  DeRhamComplex(std::shared_ptr<const SimplicialMesh> mesh, ComplexOptions options = {});

  const SimplicialMesh& mesh() const { return *mesh_; }
  const ComplexOptions& options() const { return options_; }
  const QuadratureRule& quadrature() const { return quad_; }

  const FeSpace& space(int degree) const { return *spaces_.at(degree); }
  std::shared_ptr<const FeSpace> space_ptr(int degree) const { return spaces_.at(degree); }
  const SparseOperator& mass(int degree) const { return mass_.at(degree); }
  // d from degree to degree + 1.
  const SparseOperator& derivative(int degree) const { return derivative_.at(degree); }

  Eigen::VectorXd solve_mass(int degree, const Eigen::VectorXd& rhs) const;

  // Coefficient vectors of the discrete harmonic forms of the given degree: the
  // constant 2-form with trace conditions, the constant 0-form without.
  std::vector<Eigen::VectorXd> harmonic_basis(int degree) const;
  // dim ker d on V^degree.
  int kernel_dimension(int degree) const;

  // L2 projection onto V^degree.
  FormFunction l2_project(int degree, const SpatialField& f) const;

 private:
  std::shared_ptr<const SimplicialMesh> mesh_;
  ComplexOptions options_;
  QuadratureRule quad_;
  std::array<std::shared_ptr<const FeSpace>, 3> spaces_;
  std::array<SparseOperator, 3> mass_;
  std::array<SparseOperator, 2> derivative_;
  std::array<std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>>, 3> mass_solvers_;
};

// Three consecutive spaces V^- -d^-> V -d-> V^+ of a complex around form degree k,
// with the factorizations used by the Hodge decomposition and the quasi-interpolant.
// Absent neighbours (k = 0 or k = 2) behave as zero-dimensional spaces.
class ComplexOperators {
 public:
  ComplexOperators(std::shared_ptr<const DeRhamComplex> complex, int k);

  const DeRhamComplex& complex() const { return *complex_; }
  std::shared_ptr<const DeRhamComplex> complex_ptr() const { return complex_; }
  int degree() const { return k_; }
  bool has_minus() const { return k_ > 0; }
  bool has_plus() const { return k_ < 2; }

  const FeSpace& space() const { return complex_->space(k_); }
  std::shared_ptr<const FeSpace> space_ptr() const { return complex_->space_ptr(k_); }
  std::shared_ptr<const FeSpace> minus_space_ptr() const;
  std::shared_ptr<const FeSpace> plus_space_ptr() const;

  int dim_minus() const { return has_minus() ? complex_->space(k_ - 1).num_free() : 0; }
  int dim() const { return space().num_free(); }
  int dim_plus() const { return has_plus() ? complex_->space(k_ + 1).num_free() : 0; }

  // Mass and derivative blocks; absent neighbours give empty matrices of matching shape.
  const SparseMatrix& mass_minus() const { return mass_minus_; }
  const SparseMatrix& mass() const { return complex_->mass(k_).matrix; }
  const SparseMatrix& mass_plus() const { return mass_plus_; }
  const SparseMatrix& d_minus() const { return d_minus_; }  // dim x dim_minus
  const SparseMatrix& d() const { return d_; }              // dim_plus x dim

  Eigen::VectorXd solve_mass_minus(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd solve_mass(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd solve_mass_plus(const Eigen::VectorXd& rhs) const;

  // delta_h w in V^-: M^- (delta_h w) = (D^-)^T M w.
  Eigen::VectorXd coderivative(const Eigen::VectorXd& w) const;
  // delta_h^+ w in V for w in V^+.
  Eigen::VectorXd coderivative_plus(const Eigen::VectorXd& w) const;

  struct Decomposition {
    Eigen::VectorXd z;      // in ker d (range of d^- plus harmonic forms)
    Eigen::VectorXd kappa;  // L2-orthogonal complement
  };
  Decomposition hodge_decompose(const Eigen::VectorXd& v) const;

  // Projection-based quasi-interpolant of a continuous form v with exterior
  // derivative dv: L2 projection onto ker d plus the d-energy projection onto its
  // orthogonal complement.
  FormFunction quasi_interpolate(const SpatialField& v, const SpatialField& dv) const;

  // C_p = lambda_min^{-1/2} of the pencil (D^T M^+ D, M) on the complement of ker d,
  // by a dense eigensolve.
  double poincare_constant() const;
  static constexpr int kPoincareMaxDofs = 2000;

 private:
  bool minus_has_kernel() const;

  std::shared_ptr<const DeRhamComplex> complex_;
  int k_;
  SparseMatrix mass_minus_, mass_plus_, d_minus_, d_;
  std::vector<Eigen::VectorXd> harmonics_;
  // (D^-)^T M D^- for the projection onto the range of d^-.
  std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>> exact_solver_;
  SparseMatrix exact_matrix_;
  // [[D^T M^+ D, C], [C^T, -eps R]] with C the constraint against ker d.
  std::unique_ptr<Eigen::SparseLU<SparseMatrix>> saddle_solver_;
  SparseMatrix saddle_matrix_;
};

// Stand-alone L2 projection onto a space (assembles and factorizes its mass).
FormFunction l2_project(std::shared_ptr<const FeSpace> space, const SpatialField& f,
                        const QuadratureRule& quad);

// Solve with a factorization followed by residual correction passes.
template <typename Solver>
Eigen::VectorXd refined_solve(const Solver& solver, const SparseMatrix& A, const Eigen::VectorXd& b,
                              int passes = 2) {
  Eigen::VectorXd x = solver.solve(b);
  for (int p = 0; p < passes; ++p) {
    const Eigen::VectorXd r = b - A * x;
    x += solver.solve(r);
  }
  return x;
}

}  // namespace hodgewave
