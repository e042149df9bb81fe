#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hodgewave/mesh.hpp"

namespace hodgewave {

// Pointwise value of a form through its vector proxy: 0- and 2-forms are scalars held
// in x(), 1-forms are vector fields whose normal component carries the trace.
using Proxy = Eigen::Vector2d;
using SpatialField = std::function<Proxy(const Point&)>;
using SpaceTimeField = std::function<Proxy(const Point&, double)>;

inline int proxy_components(int degree) { return degree == 1 ? 2 : 1; }

// Element families of the complex P2 Lambda^0 -> P2^- Lambda^1 -> P1 Lambda^2.
enum class Family {
  Lagrange2,       // continuous quadratics, 0-forms
  RaviartThomas1,  // P1^2 + x P1 with continuous normal component, 1-forms
  Discontinuous1,  // discontinuous linears, 2-forms
};

// Essential: the homogeneous trace is imposed by dropping boundary dofs.
// Natural: every dof is kept.
enum class BoundaryCondition { Essential, Natural };

std::string_view family_name(Family family);
Family family_for_degree(int degree);

struct LocalDof {
  int global;   // index among all dofs
  double sign;  // orientation of the global basis function relative to the local one
};

// Finite element space of k-forms over a mesh, with the dof map and the basis
// evaluated through the affine (k = 0), contravariant Piola (k = 1) and inverse
// Jacobian-determinant (k = 2) pullbacks.
class FeSpace {
 public:
  static constexpr int kMaxLocalDofs = 8;

  FeSpace(std::shared_ptr<const SimplicialMesh> mesh, int degree, Family family,
          BoundaryCondition bc);

  const SimplicialMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const SimplicialMesh> mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  Family family() const { return family_; }
  BoundaryCondition boundary_condition() const { return bc_; }

  int num_dofs() const { return static_cast<int>(free_index_.size()); }
  int num_free() const { return static_cast<int>(global_index_.size()); }
  // Free position of a global dof, or -1 if it carries boundary trace and was removed.
  int free_index(int global) const { return free_index_[global]; }
  int global_index(int free) const { return global_index_[free]; }
  int local_dim() const { return local_dim_; }

  std::array<LocalDof, kMaxLocalDofs> local_dofs(int t) const;

  // Physical local basis (before the orientation sign) at reference point xi of
  // triangle t, and its exterior derivative as a proxy of degree k + 1.
  void basis(int t, const Point& xi, std::span<Proxy> out) const;
  void basis_derivative(int t, const Point& xi, std::span<Proxy> out) const;

 private:
  std::shared_ptr<const SimplicialMesh> mesh_;
  int degree_;
  Family family_;
  BoundaryCondition bc_;
  int local_dim_;
  std::vector<int> free_index_;
  std::vector<int> global_index_;
};

// Coefficient vector over the free dofs of one space.
struct FormFunction {
  std::shared_ptr<const FeSpace> space;
  Eigen::VectorXd coeffs;

  FormFunction() = default;
  FormFunction(std::shared_ptr<const FeSpace> s, Eigen::VectorXd c);
  explicit FormFunction(std::shared_ptr<const FeSpace> s);  // zero function
};

// Value at reference point xi of triangle t.
Proxy evaluate_local(const FormFunction& fn, int t, const Point& xi);
Proxy evaluate_derivative_local(const FormFunction& fn, int t, const Point& xi);

// Point evaluation; throws std::out_of_range for points outside the mesh.
std::vector<Proxy> evaluate(const FormFunction& fn, std::span<const Point> points);

// Canonical interpolation through the element dofs (nodal values, edge flux
// moments with interior moments, local L2 projection). Exact on the polynomial space.
FormFunction interpolate(std::shared_ptr<const FeSpace> space, const SpatialField& field);

}  // namespace hodgewave
