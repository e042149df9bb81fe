#include "hodgewave/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "hodgewave/reference.hpp"

namespace hodgewave {

namespace {

using LocalMatrix = Eigen::Matrix<double, FeSpace::kMaxLocalDofs, FeSpace::kMaxLocalDofs>;

int polynomial_degree(Family family) { return family == Family::Discontinuous1 ? 1 : 2; }

LocalMatrix element_mass(const FeSpace& space, const QuadratureRule& quad, int t) {
  const int n = space.local_dim();
  const double det = space.mesh().jacobian(t).determinant();
  std::array<Proxy, FeSpace::kMaxLocalDofs> phi;
  LocalMatrix local = LocalMatrix::Zero();
  for (int q = 0; q < quad.size(); ++q) {
    space.basis(t, quad.points[q], phi);
    const double w = quad.weights[q] * det;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) local(i, j) += w * phi[i].dot(phi[j]);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) local(i, j) = local(j, i);
  }
  return local;
}

}  // namespace

double SparseOperator::symmetry_defect() const {
  const SparseMatrix transposed = matrix.transpose();
  const SparseMatrix defect =
      symmetry == Symmetry::Skew ? SparseMatrix(matrix + transposed) : SparseMatrix(matrix - transposed);
  double scale = 0.0, worst = 0.0;
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  for (int k = 0; k < defect.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(defect, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return scale > 0.0 ? worst / scale : worst;
}

void SparseOperator::write_coordinate(std::ostream& os) const {
  os << "# " << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
  os << std::setprecision(17);
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

SparseOperator mass_matrix(const FeSpace& space, const QuadratureRule& quad,
                           const AssemblyOptions& options) {
  const int needed = 2 * polynomial_degree(space.family());
  if (quad.degree < needed) {
    throw std::invalid_argument("mass_matrix: quadrature degree " + std::to_string(quad.degree) +
                                " below " + std::to_string(needed) + " required for " +
                                std::string(family_name(space.family())));
  }
  const SimplicialMesh& mesh = space.mesh();
  const int nt = mesh.num_triangles();
  std::vector<LocalMatrix> locals(nt);
  const int threads = std::clamp(options.threads, 1, std::max(1, nt));
  if (threads == 1) {
    for (int t = 0; t < nt; ++t) locals[t] = element_mass(space, quad, t);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (int t = w; t < nt; t += threads) locals[t] = element_mass(space, quad, t);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<size_t>(nt) * space.local_dim() * space.local_dim());
  for (int t = 0; t < nt; ++t) {
    const auto dofs = space.local_dofs(t);
    for (int i = 0; i < space.local_dim(); ++i) {
      const int fi = space.free_index(dofs[i].global);
      if (fi < 0) continue;
      for (int j = 0; j < space.local_dim(); ++j) {
        const int fj = space.free_index(dofs[j].global);
        if (fj < 0) continue;
        entries.emplace_back(fi, fj, dofs[i].sign * dofs[j].sign * locals[t](i, j));
      }
    }
  }
  SparseOperator out;
  out.matrix.resize(space.num_free(), space.num_free());
  out.matrix.setFromTriplets(entries.begin(), entries.end());
  out.symmetry = Symmetry::SymmetricPositiveDefinite;
  return out;
}

SparseOperator derivative_matrix(const FeSpace& source, const FeSpace& target) {
  if (&source.mesh() != &target.mesh()) {
    throw std::invalid_argument("derivative_matrix: spaces live on different meshes");
  }
  if (target.degree() != source.degree() + 1) {
    throw std::invalid_argument("derivative_matrix: target degree must be source degree + 1");
  }
  if (source.boundary_condition() == BoundaryCondition::Natural &&
      target.boundary_condition() == BoundaryCondition::Essential) {
    throw std::invalid_argument(
        "derivative_matrix: d of a space without trace conditions does not land in a "
        "space with homogeneous trace");
  }
  const SimplicialMesh& mesh = source.mesh();
  std::vector<Eigen::Triplet<double>> entries;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto src = source.local_dofs(t);
    const auto dst = target.local_dofs(t);
    auto emit = [&](int row_local, int col_local, double value) {
      if (value == 0.0) return;
      const int r = target.free_index(dst[row_local].global);
      const int c = source.free_index(src[col_local].global);
      if (r < 0 || c < 0) return;
      entries.emplace_back(r, c, dst[row_local].sign * src[col_local].sign * value);
    };
    if (source.family() == Family::Lagrange2) {
      const auto& local = reference::curl_interpolation();
      for (int k = 0; k < reference::kRtDofs; ++k) {
        // Edge rows are shared; the first incident triangle writes them.
        if (k < 6 && mesh.edge_triangles(mesh.triangle_edge(t, k / 2))[0] != t) continue;
        for (int i = 0; i < reference::kP2Dofs; ++i) emit(k, i, local(k, i));
      }
    } else {
      const auto& local = reference::div_interpolation();
      for (int j = 0; j < reference::kP1Dofs; ++j) {
        for (int k = 0; k < reference::kRtDofs; ++k) emit(j, k, local(j, k));
      }
    }
  }
  SparseOperator out;
  out.matrix.resize(target.num_free(), source.num_free());
  out.matrix.setFromTriplets(entries.begin(), entries.end());
  out.symmetry = Symmetry::General;
  return out;
}

Eigen::VectorXd load_vector(const FeSpace& space, const SpatialField& f, const QuadratureRule& quad) {
  return LoadAssembler(space, quad).assemble(f);
}

LoadAssembler::LoadAssembler(const FeSpace& space, const QuadratureRule& quad)
    : num_free_(space.num_free()), local_dim_(space.local_dim()), points_per_triangle_(quad.size()) {
  const SimplicialMesh& mesh = space.mesh();
  const size_t nt = static_cast<size_t>(mesh.num_triangles());
  points_.reserve(nt * quad.size());
  weights_.reserve(nt * quad.size());
  basis_.reserve(nt * quad.size() * local_dim_);
  free_.reserve(nt * local_dim_);
  std::array<Proxy, FeSpace::kMaxLocalDofs> phi;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double det = mesh.jacobian(t).determinant();
    const auto dofs = space.local_dofs(t);
    for (int i = 0; i < local_dim_; ++i) free_.push_back(space.free_index(dofs[i].global));
    for (int q = 0; q < quad.size(); ++q) {
      points_.push_back(mesh.to_physical(t, quad.points[q]));
      weights_.push_back(quad.weights[q] * det);
      space.basis(t, quad.points[q], phi);
      for (int i = 0; i < local_dim_; ++i) basis_.push_back(dofs[i].sign * phi[i]);
    }
  }
}

template <typename Eval>
Eigen::VectorXd LoadAssembler::accumulate(Eval&& eval) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_free_);
  const size_t nt = free_.size() / static_cast<size_t>(std::max(local_dim_, 1));
  size_t point = 0;
  for (size_t t = 0; t < nt; ++t) {
    const int* free = free_.data() + t * local_dim_;
    for (int q = 0; q < points_per_triangle_; ++q, ++point) {
      const Proxy value = weights_[point] * eval(points_[point]);
      const Proxy* phi = basis_.data() + point * local_dim_;
      for (int i = 0; i < local_dim_; ++i) {
        if (free[i] >= 0) out[free[i]] += value.dot(phi[i]);
      }
    }
  }
  return out;
}

Eigen::VectorXd LoadAssembler::assemble(const SpatialField& f) const {
  return accumulate([&](const Point& x) { return f(x); });
}

Eigen::VectorXd LoadAssembler::assemble_time_integral(const SpaceTimeField& f, const LineRule& rule, double t0,
                                                      double t1) const {
  const double len = t1 - t0;
  std::vector<double> times, weights;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    times.push_back(t0 + len * rule.points[q]);
    weights.push_back(len * rule.weights[q]);
  }
  return accumulate([&](const Point& x) {
    Proxy sum = Proxy::Zero();
    for (size_t q = 0; q < times.size(); ++q) sum += weights[q] * f(x, times[q]);
    return sum;
  });
}

double l2_error(const FormFunction& fn, const SpatialField& exact, const QuadratureRule& quad,
                bool derivative) {
  const SimplicialMesh& mesh = fn.space->mesh();
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double det = mesh.jacobian(t).determinant();
    double local = 0.0;
    for (int q = 0; q < quad.size(); ++q) {
      const Point& xi = quad.points[q];
      const Proxy discrete = derivative ? evaluate_derivative_local(fn, t, xi) : evaluate_local(fn, t, xi);
      local += quad.weights[q] * (exact(mesh.to_physical(t, xi)) - discrete).squaredNorm();
    }
    sum += det * local;
  }
  return std::sqrt(sum);
}

double integrate(const SimplicialMesh& mesh, const SpatialField& f, const QuadratureRule& quad) {
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double det = mesh.jacobian(t).determinant();
    double local = 0.0;
    for (int q = 0; q < quad.size(); ++q) local += quad.weights[q] * f(mesh.to_physical(t, quad.points[q])).x();
    sum += det * local;
  }
  return sum;
}

}  // namespace hodgewave
