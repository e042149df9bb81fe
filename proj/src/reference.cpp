#include "hodgewave/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "hodgewave/quadrature.hpp"

namespace hodgewave::reference {

namespace {

std::array<double, 3> barycentric(const Point& xi) {
  return {1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
}

const std::array<Vec2, 3> kBaryGrad = {Vec2(-1.0, -1.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};

const std::array<Point, 3> kVertices = {Point(0.0, 0.0), Point(1.0, 0.0), Point(0.0, 1.0)};

// Spanning set of P1^2 + x P1.
Vec2 monomial(int j, const Point& xi) {
  const double x = xi.x(), y = xi.y();
  switch (j) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {x, 0.0};
    case 3: return {y, 0.0};
    case 4: return {0.0, x};
    case 5: return {0.0, y};
    case 6: return {x * x, x * y};
    case 7: return {x * y, y * y};
  }
  throw std::out_of_range("rt monomial index");
}

double monomial_divergence(int j, const Point& xi) {
  switch (j) {
    case 2: case 5: return 1.0;
    case 6: return 3.0 * xi.x();
    case 7: return 3.0 * xi.y();
    default: return 0.0;
  }
}

using RtMatrix = Eigen::Matrix<double, kRtDofs, kRtDofs>;

// Columns hold the monomial coefficients of the nodal basis.
const RtMatrix& rt_coefficients() {
  static const RtMatrix coeffs = [] {
    RtMatrix vandermonde;
    for (int j = 0; j < kRtDofs; ++j) {
      const auto dofs = rt_dofs([j](const Point& xi) { return monomial(j, xi); });
      for (int d = 0; d < kRtDofs; ++d) vandermonde(d, j) = dofs[d];
    }
    return RtMatrix(vandermonde.inverse());
  }();
  return coeffs;
}

// The interpolation matrices have rational entries with small denominators; rounding
// them to those rationals removes the solver noise from the Vandermonde inverse.
template <typename Matrix>
Matrix snap_rational(Matrix m) {
  constexpr int kMaxDenominator = 36;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      for (int q = 1; q <= kMaxDenominator; ++q) {
        const double scaled = m(i, j) * q;
        if (std::abs(scaled - std::round(scaled)) < 1e-9) {
          m(i, j) = std::round(scaled) / q;
          break;
        }
      }
    }
  }
  return m;
}

}  // namespace

double p2_value(int i, const Point& xi) {
  const auto l = barycentric(xi);
  if (i < 3) return l[i] * (2.0 * l[i] - 1.0);
  const int e = i - 3;
  return 4.0 * l[(e + 1) % 3] * l[(e + 2) % 3];
}

Vec2 p2_gradient(int i, const Point& xi) {
  const auto l = barycentric(xi);
  if (i < 3) return (4.0 * l[i] - 1.0) * kBaryGrad[i];
  const int e = i - 3, a = (e + 1) % 3, b = (e + 2) % 3;
  return 4.0 * (l[a] * kBaryGrad[b] + l[b] * kBaryGrad[a]);
}

std::array<double, kRtDofs> rt_dofs(const std::function<Vec2(const Point&)>& v) {
  static const LineRule line = gauss_legendre(4);
  static const QuadratureRule tri = reference_quadrature(4);
  std::array<double, kRtDofs> out{};
  for (int i = 0; i < 3; ++i) {
    const Point& p = kVertices[(i + 1) % 3];
    const Point& q = kVertices[(i + 2) % 3];
    const Vec2 t = q - p;
    const Vec2 n(t.y(), -t.x());  // outward, scaled by the edge length
    for (size_t g = 0; g < line.points.size(); ++g) {
      const double s = line.points[g];
      const double flux = v(p + s * t).dot(n) * line.weights[g];
      out[2 * i] += flux * (1.0 - s);
      out[2 * i + 1] += flux * s;
    }
  }
  for (int g = 0; g < tri.size(); ++g) {
    const Vec2 val = v(tri.points[g]);
    out[6] += 2.0 * tri.weights[g] * val.x();
    out[7] += 2.0 * tri.weights[g] * val.y();
  }
  return out;
}

Vec2 rt_value(int k, const Point& xi) {
  const auto& c = rt_coefficients();
  Vec2 out = Vec2::Zero();
  for (int j = 0; j < kRtDofs; ++j) out += c(j, k) * monomial(j, xi);
  return out;
}

double rt_divergence(int k, const Point& xi) {
  const auto& c = rt_coefficients();
  double out = 0.0;
  for (int j = 0; j < kRtDofs; ++j) out += c(j, k) * monomial_divergence(j, xi);
  return out;
}

double p1_value(int j, const Point& xi) {
  switch (j) {
    case 0: return 1.0;
    case 1: return xi.x();
    case 2: return xi.y();
  }
  throw std::out_of_range("p1 basis index");
}

const Eigen::Matrix<double, kRtDofs, kP2Dofs>& curl_interpolation() {
  static const Eigen::Matrix<double, kRtDofs, kP2Dofs> m = [] {
    Eigen::Matrix<double, kRtDofs, kP2Dofs> out;
    for (int i = 0; i < kP2Dofs; ++i) {
      const auto dofs = rt_dofs([i](const Point& xi) { return rot(p2_gradient(i, xi)); });
      for (int d = 0; d < kRtDofs; ++d) out(d, i) = dofs[d];
    }
    return snap_rational(out);
  }();
  return m;
}

const Eigen::Matrix<double, kP1Dofs, kRtDofs>& div_interpolation() {
  static const Eigen::Matrix<double, kP1Dofs, kRtDofs> m = [] {
    // The divergence of the nodal basis expanded in {1, xi, eta}: only monomials
    // 2, 5 (constant) and 6, 7 (linear) contribute.
    const auto& c = rt_coefficients();
    Eigen::Matrix<double, kP1Dofs, kRtDofs> out;
    for (int k = 0; k < kRtDofs; ++k) {
      out(0, k) = c(2, k) + c(5, k);
      out(1, k) = 3.0 * c(6, k);
      out(2, k) = 3.0 * c(7, k);
    }
    return snap_rational(out);
  }();
  return m;
}

}  // namespace hodgewave::reference
