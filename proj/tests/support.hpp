#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "hodgewave/calculus.hpp"

namespace hodgewave::testing {

constexpr double kPi = std::numbers::pi;

inline std::shared_ptr<const SimplicialMesh> unit_square(int n) {
  return std::make_shared<const SimplicialMesh>(SimplicialMesh::structured_unit_square(n));
}

inline std::shared_ptr<const SimplicialMesh> reference_triangle() {
  return std::make_shared<const SimplicialMesh>(SimplicialMesh::from_triangles(
      {Point(0.0, 0.0), Point(1.0, 0.0), Point(0.0, 1.0)}, {{0, 1, 2}}));
}

inline std::shared_ptr<const DeRhamComplex> make_complex(int n, BoundaryCondition bc = BoundaryCondition::Essential,
                                                         int assembly_degree = 8) {
  ComplexOptions options;
  options.bc = bc;
  options.assembly_degree = assembly_degree;
  return std::make_shared<const DeRhamComplex>(unit_square(n), options);
}

inline Eigen::VectorXd random_vector(std::mt19937& rng, int size) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = dist(rng);
  return v;
}

inline Point random_point(std::mt19937& rng, double margin = 0.0) {
  std::uniform_real_distribution<double> dist(margin, 1.0 - margin);
  return Point(dist(rng), dist(rng));
}

inline std::vector<Point> interior_points(std::mt19937& rng, int count) {
  std::vector<Point> points;
  for (int i = 0; i < count; ++i) points.push_back(random_point(rng, 1e-3));
  return points;
}

// A smooth scalar g(x, y) = sum a_pq sin(p pi x) sin(q pi y) vanishing on the boundary,
// with its gradient.
struct SineSeries {
  std::vector<std::array<double, 3>> terms;  // (p, q, a)

  static SineSeries random(std::mt19937& rng, int modes = 3) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_int_distribution<int> freq(1, 3);
    SineSeries s;
    for (int i = 0; i < modes; ++i) s.terms.push_back({double(freq(rng)), double(freq(rng)), amp(rng)});
    return s;
  }
  double value(const Point& x) const {
    double v = 0.0;
    for (const auto& [p, q, a] : terms) v += a * std::sin(p * kPi * x.x()) * std::sin(q * kPi * x.y());
    return v;
  }
  Eigen::Vector2d gradient(const Point& x) const {
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (const auto& [p, q, a] : terms) {
      g.x() += a * p * kPi * std::cos(p * kPi * x.x()) * std::sin(q * kPi * x.y());
      g.y() += a * q * kPi * std::sin(p * kPi * x.x()) * std::cos(q * kPi * x.y());
    }
    return g;
  }
  double laplacian(const Point& x) const {
    double v = 0.0;
    for (const auto& [p, q, a] : terms) {
      v -= a * (p * p + q * q) * kPi * kPi * std::sin(p * kPi * x.x()) * std::sin(q * kPi * x.y());
    }
    return v;
  }
};

}  // namespace hodgewave::testing

namespace hodgewave::testing {

// A discrete form (or its exterior derivative) as a callable on physical points.
inline SpatialField as_field(const FormFunction& fn, bool derivative = false) {
  return [fn, derivative](const Point& x) {
    const SimplicialMesh& m = fn.space->mesh();
    const int t = m.locate(x);
    const Point xi = m.to_reference(t, x);
    return derivative ? evaluate_derivative_local(fn, t, xi) : evaluate_local(fn, t, xi);
  };
}

inline double mass_norm(const SparseMatrix& m, const Eigen::VectorXd& v) { return std::sqrt(v.dot(m * v)); }

}  // namespace hodgewave::testing
