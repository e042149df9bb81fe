#include "hodgewave/calculus.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

#include "hodgewave/error.hpp"

namespace hodgewave {

namespace {

// Exact for products of two basis functions of every family.
constexpr int kMassDegree = 4;

template <typename Solver>
void check_factorization(const Solver& solver, const std::string& what) {
  if (solver.info() != Eigen::Success) throw SolverError("factorization failed: " + what);
}

SparseMatrix block2x2(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c,
                      const SparseMatrix& d) {
  const Eigen::Index n = a.rows(), m = d.rows();
  std::vector<Eigen::Triplet<double>> entries;
  auto push = [&](const SparseMatrix& blk, Eigen::Index r0, Eigen::Index c0) {
    for (int k = 0; k < blk.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(blk, k); it; ++it) {
        entries.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
      }
    }
  };
  push(a, 0, 0);
  push(b, 0, n);
  push(c, n, 0);
  push(d, n, n);
  SparseMatrix out(n + m, n + m);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

}  // namespace

DeRhamComplex::DeRhamComplex(std::shared_ptr<const SimplicialMesh> mesh, ComplexOptions options)
    : mesh_(std::move(mesh)), options_(options), quad_(reference_quadrature(options.assembly_degree)) {
  for (int k = 0; k < 3; ++k) {
    spaces_[k] = std::make_shared<const FeSpace>(mesh_, k, family_for_degree(k), options_.bc);
  }
  const QuadratureRule mass_quad = reference_quadrature(kMassDegree);
  AssemblyOptions assembly;
  assembly.threads = options_.threads;
  for (int k = 0; k < 3; ++k) {
    mass_[k] = mass_matrix(*spaces_[k], mass_quad, assembly);
    mass_solvers_[k] = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>(mass_[k].matrix);
    check_factorization(*mass_solvers_[k], "mass matrix of degree " + std::to_string(k));
  }
  for (int k = 0; k < 2; ++k) derivative_[k] = derivative_matrix(*spaces_[k], *spaces_[k + 1]);
}

Eigen::VectorXd DeRhamComplex::solve_mass(int degree, const Eigen::VectorXd& rhs) const {
  return refined_solve(*mass_solvers_.at(degree), mass_[degree].matrix, rhs);
}

std::vector<Eigen::VectorXd> DeRhamComplex::harmonic_basis(int degree) const {
  const bool essential = options_.bc == BoundaryCondition::Essential;
  if ((essential && degree == 2) || (!essential && degree == 0)) {
    return {interpolate(spaces_[degree], [](const Point&) { return Proxy(1.0, 0.0); }).coeffs};
  }
  return {};
}

int DeRhamComplex::kernel_dimension(int degree) const {
  // Exactness: ker d^k = range d^{k-1} plus harmonic forms.
  int dim_kernel = static_cast<int>(harmonic_basis(0).size());
  for (int k = 1; k <= degree; ++k) {
    const int rank_prev = spaces_[k - 1]->num_free() - dim_kernel;
    dim_kernel = rank_prev + static_cast<int>(harmonic_basis(k).size());
  }
  return dim_kernel;
}

FormFunction DeRhamComplex::l2_project(int degree, const SpatialField& f) const {
  return FormFunction(spaces_.at(degree), solve_mass(degree, load_vector(*spaces_[degree], f, quad_)));
}

FormFunction l2_project(std::shared_ptr<const FeSpace> space, const SpatialField& f,
                        const QuadratureRule& quad) {
  const SparseOperator mass = mass_matrix(*space, reference_quadrature(kMassDegree));
  Eigen::SimplicialLDLT<SparseMatrix> solver(mass.matrix);
  check_factorization(solver, "mass matrix");
  const Eigen::VectorXd b = load_vector(*space, f, quad);
  return FormFunction(std::move(space), refined_solve(solver, mass.matrix, b));
}

ComplexOperators::ComplexOperators(std::shared_ptr<const DeRhamComplex> complex, int k)
    : complex_(std::move(complex)), k_(k) {
  if (!complex_) throw std::invalid_argument("ComplexOperators: null complex");
  if (k < 0 || k > 2) throw std::invalid_argument("ComplexOperators: degree must be 0, 1 or 2");
  const int n = dim();
  if (has_minus()) {
    mass_minus_ = complex_->mass(k - 1).matrix;
    d_minus_ = complex_->derivative(k - 1).matrix;
  } else {
    mass_minus_.resize(0, 0);
    d_minus_.resize(n, 0);
  }
  if (has_plus()) {
    mass_plus_ = complex_->mass(k + 1).matrix;
    d_ = complex_->derivative(k).matrix;
  } else {
    mass_plus_.resize(0, 0);
    d_.resize(0, n);
  }
  harmonics_ = complex_->harmonic_basis(k);

  const double eps = complex_->options().kernel_shift;
  if (has_minus() && has_plus()) {
    exact_matrix_ = SparseMatrix(d_minus_.transpose() * mass() * d_minus_);
    SparseMatrix shifted = exact_matrix_;
    if (minus_has_kernel()) shifted += eps * mass_minus_;
    exact_solver_ = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>(shifted);
    check_factorization(*exact_solver_, "exact-form projection");
  }
  if (has_plus()) {
    const SparseMatrix stiffness = d_.transpose() * mass_plus_ * d_;
    // Constraint columns: M D^- and M h for every harmonic h.
    const int m_minus = dim_minus();
    const int m = m_minus + static_cast<int>(harmonics_.size());
    std::vector<Eigen::Triplet<double>> c_entries;
    if (has_minus()) {
      const SparseMatrix md = mass() * d_minus_;
      for (int col = 0; col < md.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(md, col); it; ++it) c_entries.emplace_back(it.row(), col, it.value());
      }
    }
    for (size_t h = 0; h < harmonics_.size(); ++h) {
      const Eigen::VectorXd mh = mass() * harmonics_[h];
      for (int i = 0; i < n; ++i) {
        if (mh[i] != 0.0) c_entries.emplace_back(i, m_minus + static_cast<int>(h), mh[i]);
      }
    }
    SparseMatrix constraint(n, m);
    constraint.setFromTriplets(c_entries.begin(), c_entries.end());
    SparseMatrix shift(m, m);
    if (has_minus() && minus_has_kernel()) {
      std::vector<Eigen::Triplet<double>> s_entries;
      for (int col = 0; col < mass_minus_.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(mass_minus_, col); it; ++it) {
          s_entries.emplace_back(it.row(), col, -eps * it.value());
        }
      }
      shift.setFromTriplets(s_entries.begin(), s_entries.end());
    }
    // Refinement passes run against the unshifted matrices, so the shift only
    // selects a representative in the multiplier kernel.
    saddle_matrix_ = block2x2(stiffness, constraint, SparseMatrix(constraint.transpose()), SparseMatrix(m, m));
    saddle_matrix_.makeCompressed();
    SparseMatrix shifted = block2x2(stiffness, constraint, SparseMatrix(constraint.transpose()), shift);
    shifted.makeCompressed();
    saddle_solver_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
    saddle_solver_->analyzePattern(shifted);
    saddle_solver_->factorize(shifted);
    check_factorization(*saddle_solver_,
                        "constrained d-energy projection (violated Poincare inequality?)");
  }
}

bool ComplexOperators::minus_has_kernel() const {
  return has_minus() && complex_->kernel_dimension(k_ - 1) > 0;
}

std::shared_ptr<const FeSpace> ComplexOperators::minus_space_ptr() const {
  return has_minus() ? complex_->space_ptr(k_ - 1) : nullptr;
}

std::shared_ptr<const FeSpace> ComplexOperators::plus_space_ptr() const {
  return has_plus() ? complex_->space_ptr(k_ + 1) : nullptr;
}

Eigen::VectorXd ComplexOperators::solve_mass_minus(const Eigen::VectorXd& rhs) const {
  if (!has_minus()) return Eigen::VectorXd(0);
  return complex_->solve_mass(k_ - 1, rhs);
}

Eigen::VectorXd ComplexOperators::solve_mass(const Eigen::VectorXd& rhs) const {
  return complex_->solve_mass(k_, rhs);
}

Eigen::VectorXd ComplexOperators::solve_mass_plus(const Eigen::VectorXd& rhs) const {
  if (!has_plus()) return Eigen::VectorXd(0);
  return complex_->solve_mass(k_ + 1, rhs);
}

Eigen::VectorXd ComplexOperators::coderivative(const Eigen::VectorXd& w) const {
  if (!has_minus()) return Eigen::VectorXd(0);
  return solve_mass_minus(d_minus_.transpose() * (mass() * w));
}

Eigen::VectorXd ComplexOperators::coderivative_plus(const Eigen::VectorXd& w) const {
  if (!has_plus()) return Eigen::VectorXd::Zero(dim());
  return solve_mass(d_.transpose() * (mass_plus_ * w));
}

ComplexOperators::Decomposition ComplexOperators::hodge_decompose(const Eigen::VectorXd& v) const {
  if (v.size() != dim()) throw std::invalid_argument("hodge_decompose: vector length mismatch");
  Decomposition out;
  if (!has_plus()) {
    // Top degree: everything is closed.
    out.z = v;
    out.kappa = Eigen::VectorXd::Zero(dim());
    return out;
  }
  out.z = Eigen::VectorXd::Zero(dim());
  const Eigen::VectorXd mv = mass() * v;
  if (has_minus()) {
    const Eigen::VectorXd p = refined_solve(*exact_solver_, exact_matrix_, Eigen::VectorXd(d_minus_.transpose() * mv));
    out.z += d_minus_ * p;
  }
  for (const auto& h : harmonics_) out.z += (h.dot(mv) / h.dot(mass() * h)) * h;
  out.kappa = v - out.z;
  return out;
}

FormFunction ComplexOperators::quasi_interpolate(const SpatialField& v, const SpatialField& dv) const {
  const QuadratureRule& quad = complex_->quadrature();
  const Eigen::VectorXd bv = load_vector(space(), v, quad);
  Eigen::VectorXd result = Eigen::VectorXd::Zero(dim());
  if (!has_plus()) {
    result = solve_mass(bv);
    return FormFunction(space_ptr(), std::move(result));
  }
  if (has_minus()) {
    const Eigen::VectorXd p = refined_solve(*exact_solver_, exact_matrix_, Eigen::VectorXd(d_minus_.transpose() * bv));
    result += d_minus_ * p;
  }
  for (const auto& h : harmonics_) result += (h.dot(bv) / h.dot(mass() * h)) * h;

  const Eigen::VectorXd bdv = load_vector(complex_->space(k_ + 1), dv, quad);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(saddle_matrix_.rows());
  rhs.head(dim()) = d_.transpose() * bdv;
  const Eigen::VectorXd sol = refined_solve(*saddle_solver_, saddle_matrix_, rhs);
  result += sol.head(dim());
  return FormFunction(space_ptr(), std::move(result));
}

double ComplexOperators::poincare_constant() const {
  if (!has_plus()) throw std::invalid_argument("poincare_constant: d vanishes on the top degree");
  if (dim() > kPoincareMaxDofs) {
    throw std::invalid_argument("poincare_constant: " + std::to_string(dim()) +
                                " free dofs exceed the dense eigensolve limit of " +
                                std::to_string(kPoincareMaxDofs));
  }
  const Eigen::MatrixXd stiffness = Eigen::MatrixXd(d_.transpose() * mass_plus_ * d_);
  const Eigen::MatrixXd mass_dense = Eigen::MatrixXd(mass());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(stiffness, mass_dense, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw SolverError("poincare_constant: eigensolve failed");
  const int zero_modes = complex_->kernel_dimension(k_);
  if (zero_modes >= dim()) throw std::invalid_argument("poincare_constant: complement of ker d is trivial");
  const double lambda = eig.eigenvalues()[zero_modes];
  if (!(lambda > 0.0)) throw SolverError("poincare_constant: nonpositive eigenvalue on the complement of ker d");
  return 1.0 / std::sqrt(lambda);
}

}  // namespace hodgewave
