#include "hodgewave/fespace.hpp"

#include <stdexcept>
#include <string>

#include "hodgewave/quadrature.hpp"
#include "hodgewave/reference.hpp"

namespace hodgewave {

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Lagrange2: return "P2Lambda0";
    case Family::RaviartThomas1: return "P2-Lambda1";
    case Family::Discontinuous1: return "P1Lambda2";
  }
  return "?";
}

Family family_for_degree(int degree) {
  switch (degree) {
    case 0: return Family::Lagrange2;
    case 1: return Family::RaviartThomas1;
    case 2: return Family::Discontinuous1;
  }
  throw std::invalid_argument("no element family for form degree " + std::to_string(degree));
}

FeSpace::FeSpace(std::shared_ptr<const SimplicialMesh> mesh, int degree, Family family,
                 BoundaryCondition bc)
    : mesh_(std::move(mesh)), degree_(degree), family_(family), bc_(bc) {
  if (!mesh_) throw std::invalid_argument("FeSpace: null mesh");
  if (degree < 0 || degree > 2 || family_for_degree(degree) != family) {
    throw std::invalid_argument("FeSpace: family " + std::string(family_name(family)) +
                                " does not discretize " + std::to_string(degree) + "-forms");
  }
  const SimplicialMesh& m = *mesh_;
  const bool essential = bc_ == BoundaryCondition::Essential;
  std::vector<bool> removed;
  switch (family_) {
    case Family::Lagrange2:
      local_dim_ = reference::kP2Dofs;
      removed.assign(static_cast<size_t>(m.num_vertices() + m.num_edges()), false);
      if (essential) {
        for (int v = 0; v < m.num_vertices(); ++v) removed[v] = m.is_boundary_vertex(v);
        for (int e = 0; e < m.num_edges(); ++e) removed[m.num_vertices() + e] = m.is_boundary_edge(e);
      }
      break;
    case Family::RaviartThomas1:
      local_dim_ = reference::kRtDofs;
      removed.assign(static_cast<size_t>(2 * m.num_edges() + 2 * m.num_triangles()), false);
      if (essential) {
        for (int e = 0; e < m.num_edges(); ++e) {
          removed[2 * e] = removed[2 * e + 1] = m.is_boundary_edge(e);
        }
      }
      break;
    case Family::Discontinuous1:
      local_dim_ = reference::kP1Dofs;
      removed.assign(static_cast<size_t>(3 * m.num_triangles()), false);
      break;
  }
  free_index_.assign(removed.size(), -1);
  for (size_t g = 0; g < removed.size(); ++g) {
    if (!removed[g]) {
      free_index_[g] = static_cast<int>(global_index_.size());
      global_index_.push_back(static_cast<int>(g));
    }
  }
}

std::array<LocalDof, FeSpace::kMaxLocalDofs> FeSpace::local_dofs(int t) const {
  std::array<LocalDof, kMaxLocalDofs> out{};
  const SimplicialMesh& m = *mesh_;
  const auto& tri = m.triangle(t);
  switch (family_) {
    case Family::Lagrange2:
      for (int i = 0; i < 3; ++i) {
        out[i] = {tri[i], 1.0};
        out[3 + i] = {m.num_vertices() + m.triangle_edge(t, i), 1.0};
      }
      break;
    case Family::RaviartThomas1:
      for (int k = 0; k < 6; ++k) {
        const int i = k / 2;
        const int e = m.triangle_edge(t, i);
        const int vertex = tri[reference::rt_edge_dof_vertex(k)];
        out[k] = {2 * e + (vertex == m.edge(e).a ? 0 : 1),
                  static_cast<double>(m.triangle_edge_sign(t, i))};
      }
      out[6] = {2 * m.num_edges() + 2 * t, 1.0};
      out[7] = {2 * m.num_edges() + 2 * t + 1, 1.0};
      break;
    case Family::Discontinuous1:
      for (int j = 0; j < 3; ++j) out[j] = {3 * t + j, 1.0};
      break;
  }
  return out;
}

void FeSpace::basis(int t, const Point& xi, std::span<Proxy> out) const {
  const Eigen::Matrix2d& J = mesh_->jacobian(t);
  const double det = J.determinant();
  switch (family_) {
    case Family::Lagrange2:
      for (int i = 0; i < reference::kP2Dofs; ++i) out[i] = Proxy(reference::p2_value(i, xi), 0.0);
      break;
    case Family::RaviartThomas1:
      for (int k = 0; k < reference::kRtDofs; ++k) out[k] = J * reference::rt_value(k, xi) / det;
      break;
    case Family::Discontinuous1:
      for (int j = 0; j < reference::kP1Dofs; ++j) out[j] = Proxy(reference::p1_value(j, xi) / det, 0.0);
      break;
  }
}

void FeSpace::basis_derivative(int t, const Point& xi, std::span<Proxy> out) const {
  const Eigen::Matrix2d& J = mesh_->jacobian(t);
  const double det = J.determinant();
  switch (family_) {
    case Family::Lagrange2:
      // rot(J^{-T} g) = J rot(g) / det J for 2 x 2 matrices.
      for (int i = 0; i < reference::kP2Dofs; ++i) {
        out[i] = J * reference::rot(reference::p2_gradient(i, xi)) / det;
      }
      break;
    case Family::RaviartThomas1:
      for (int k = 0; k < reference::kRtDofs; ++k) {
        out[k] = Proxy(reference::rt_divergence(k, xi) / det, 0.0);
      }
      break;
    case Family::Discontinuous1:
      for (int j = 0; j < reference::kP1Dofs; ++j) out[j] = Proxy::Zero();
      break;
  }
}

FormFunction::FormFunction(std::shared_ptr<const FeSpace> s, Eigen::VectorXd c)
    : space(std::move(s)), coeffs(std::move(c)) {
  if (!space) throw std::invalid_argument("FormFunction: null space");
  if (coeffs.size() != space->num_free()) {
    throw std::invalid_argument("FormFunction: coefficient length " +
                                std::to_string(coeffs.size()) + " != free dof count " +
                                std::to_string(space->num_free()));
  }
}

FormFunction::FormFunction(std::shared_ptr<const FeSpace> s)
    : FormFunction(s, Eigen::VectorXd::Zero(s ? s->num_free() : 0)) {}

namespace {

template <bool Derivative>
Proxy evaluate_impl(const FormFunction& fn, int t, const Point& xi) {
  const FeSpace& space = *fn.space;
  std::array<Proxy, FeSpace::kMaxLocalDofs> phi;
  if constexpr (Derivative) {
    space.basis_derivative(t, xi, phi);
  } else {
    space.basis(t, xi, phi);
  }
  const auto dofs = space.local_dofs(t);
  Proxy out = Proxy::Zero();
  for (int i = 0; i < space.local_dim(); ++i) {
    const int f = space.free_index(dofs[i].global);
    if (f >= 0) out += dofs[i].sign * fn.coeffs[f] * phi[i];
  }
  return out;
}

}  // namespace

Proxy evaluate_local(const FormFunction& fn, int t, const Point& xi) {
  return evaluate_impl<false>(fn, t, xi);
}

Proxy evaluate_derivative_local(const FormFunction& fn, int t, const Point& xi) {
  return evaluate_impl<true>(fn, t, xi);
}

std::vector<Proxy> evaluate(const FormFunction& fn, std::span<const Point> points) {
  const SimplicialMesh& mesh = fn.space->mesh();
  std::vector<Proxy> out;
  out.reserve(points.size());
  for (const Point& x : points) {
    const int t = mesh.locate(x);
    out.push_back(evaluate_local(fn, t, mesh.to_reference(t, x)));
  }
  return out;
}

FormFunction interpolate(std::shared_ptr<const FeSpace> space, const SpatialField& field) {
  const FeSpace& V = *space;
  const SimplicialMesh& mesh = V.mesh();
  Eigen::VectorXd full = Eigen::VectorXd::Zero(V.num_dofs());
  switch (V.family()) {
    case Family::Lagrange2:
      for (int v = 0; v < mesh.num_vertices(); ++v) full[v] = field(mesh.vertex(v)).x();
      for (int e = 0; e < mesh.num_edges(); ++e) {
        const Point mid = 0.5 * (mesh.vertex(mesh.edge(e).a) + mesh.vertex(mesh.edge(e).b));
        full[mesh.num_vertices() + e] = field(mid).x();
      }
      break;
    case Family::RaviartThomas1:
      for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Eigen::Matrix2d& J = mesh.jacobian(t);
        const Eigen::Matrix2d pullback = J.determinant() * J.inverse();
        const auto local = reference::rt_dofs(
            [&](const Point& xi) { return Eigen::Vector2d(pullback * field(mesh.to_physical(t, xi))); });
        const auto dofs = V.local_dofs(t);
        for (int k = 0; k < reference::kRtDofs; ++k) full[dofs[k].global] = dofs[k].sign * local[k];
      }
      break;
    case Family::Discontinuous1: {
      static const QuadratureRule rule = reference_quadrature(6);
      Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
      for (int q = 0; q < rule.size(); ++q) {
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            mass(i, j) += rule.weights[q] * reference::p1_value(i, rule.points[q]) *
                          reference::p1_value(j, rule.points[q]);
          }
        }
      }
      const Eigen::Matrix3d mass_inv = mass.inverse();
      for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double det = mesh.jacobian(t).determinant();
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        for (int q = 0; q < rule.size(); ++q) {
          const double val = det * field(mesh.to_physical(t, rule.points[q])).x();
          for (int i = 0; i < 3; ++i) rhs[i] += rule.weights[q] * reference::p1_value(i, rule.points[q]) * val;
        }
        full.segment<3>(3 * t) = mass_inv * rhs;
      }
      break;
    }
  }
  Eigen::VectorXd coeffs(V.num_free());
  for (int f = 0; f < V.num_free(); ++f) coeffs[f] = full[V.global_index(f)];
  return FormFunction(std::move(space), std::move(coeffs));
}

}  // namespace hodgewave
