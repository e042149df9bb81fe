#pragma once

#include <vector>

#include "hodgewave/mesh.hpp"

namespace hodgewave {

// Quadrature on the reference triangle (0,0), (1,0), (0,1).
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;  // sum to 1/2
  int degree = 0;               // polynomials up to this total degree are exact

  int size() const { return static_cast<int>(points.size()); }
};

// Largest degree reference_quadrature accepts.
inline constexpr int kMaxQuadratureDegree = 40;

// Rule exact to the requested total degree and invariant under the six vertex
// permutations of the reference triangle. Built from a collapsed Gauss-Legendre
// product rule symmetrized over the permutation group.
QuadratureRule reference_quadrature(int degree);

// Gauss-Legendre rule with npts points on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};
LineRule gauss_legendre(int npts);

}  // namespace hodgewave
