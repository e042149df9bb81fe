#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "hodgewave/mesh.hpp"

// Shape functions and degrees of freedom of the three elements of the discrete
// complex on the reference triangle, with local vertices (0,0), (1,0), (0,1).
namespace hodgewave::reference {

using Vec2 = Eigen::Vector2d;

// Continuous quadratics. Local dofs: values at v0, v1, v2, then at the midpoints of
// local edges 0, 1, 2.
inline constexpr int kP2Dofs = 6;
double p2_value(int i, const Point& xi);
Vec2 p2_gradient(int i, const Point& xi);

// Raviart-Thomas space P1^2 + x P1 (dimension 8). Local dof 2 i + j is the flux
// moment over local edge i against the linear function equal to one at endpoint
// local vertex (i + 1 + j) mod 3; dofs 6 and 7 are twice the integrals of the two
// components.
inline constexpr int kRtDofs = 8;
Vec2 rt_value(int k, const Point& xi);
double rt_divergence(int k, const Point& xi);
// Local vertex at which the weight of edge dof k equals one.
inline int rt_edge_dof_vertex(int k) { return (k / 2 + 1 + k % 2) % 3; }
std::array<double, kRtDofs> rt_dofs(const std::function<Vec2(const Point&)>& v);

// Discontinuous linears with the monomial basis {1, xi, eta}.
inline constexpr int kP1Dofs = 3;
double p1_value(int j, const Point& xi);

// Exact representations of d on the reference element: rt coefficients of the
// rotated gradient of each quadratic, and {1, xi, eta} coefficients of the divergence
// of each rt basis function.
const Eigen::Matrix<double, kRtDofs, kP2Dofs>& curl_interpolation();
const Eigen::Matrix<double, kP1Dofs, kRtDofs>& div_interpolation();

// Rotated gradient, the proxy of d on 0-forms: (dq/dy, -dq/dx).
inline Vec2 rot(const Vec2& grad) { return Vec2(grad.y(), -grad.x()); }

}  // namespace hodgewave::reference
