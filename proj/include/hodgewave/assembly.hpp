#pragma once

#include <iosfwd>

#include <Eigen/Sparse>

#include "hodgewave/fespace.hpp"
#include "hodgewave/quadrature.hpp"

namespace hodgewave {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class Symmetry { SymmetricPositiveDefinite, Skew, General };

// Sparse matrix between free-dof vectors with a declared symmetry class.
struct SparseOperator {
  SparseMatrix matrix;
  Symmetry symmetry = Symmetry::General;

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }
  // max |A - A^T| (symmetric tags) or max |A + A^T| (skew), relative to max |A|.
  double symmetry_defect() const;
  // A "# rows cols nnz" line, then one "row col value" triple per line, zero-based,
  // 17 significant digits.
  void write_coordinate(std::ostream& os) const;
};

struct AssemblyOptions {
  // Element-local matrices may be computed by several threads; the global sum is
  // always accumulated in ascending triangle order.
  int threads = 1;
};

// Gram matrix of the basis over the free dofs.
SparseOperator mass_matrix(const FeSpace& space, const QuadratureRule& quad,
                           const AssemblyOptions& options = {});

// D with d(sum_j c_j phi_j) = sum_i (D c)_i psi_i, built by exact interpolation of the
// derivative of each source basis function into the target element.
SparseOperator derivative_matrix(const FeSpace& source, const FeSpace& target);

// Entries <f, phi_i> over the free dofs.
Eigen::VectorXd load_vector(const FeSpace& space, const SpatialField& f,
                            const QuadratureRule& quad);

// Load vectors for many right-hand sides on one space: physical quadrature points,
// scaled weights and signed basis values are tabulated once.
class LoadAssembler {
 public:
  LoadAssembler(const FeSpace& space, const QuadratureRule& quad);

  Eigen::VectorXd assemble(const SpatialField& f) const;
  // Integral over [t0, t1] of the load of f(., t) with the given rule on [0, 1].
  Eigen::VectorXd assemble_time_integral(const SpaceTimeField& f, const LineRule& rule, double t0,
                                         double t1) const;

 private:
  template <typename Eval>
  Eigen::VectorXd accumulate(Eval&& eval) const;

  int num_free_;
  int local_dim_;
  int points_per_triangle_;
  std::vector<Point> points_;
  std::vector<double> weights_;
  std::vector<Proxy> basis_;
  std::vector<int> free_;
};

// ||exact - fn||_{L2}; with derivative = true both sides are the exterior derivative
// (exact is then the derivative of the continuous field).
double l2_error(const FormFunction& fn, const SpatialField& exact, const QuadratureRule& quad,
                bool derivative = false);

// Integral of a form over the domain (scalar proxies only).
double integrate(const SimplicialMesh& mesh, const SpatialField& f, const QuadratureRule& quad);

}  // namespace hodgewave
