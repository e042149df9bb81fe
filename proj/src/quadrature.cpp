#include "hodgewave/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace hodgewave {

namespace {

// Legendre P_n(x) and P_{n-1}(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

LineRule gauss_legendre(int npts) {
  if (npts < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  LineRule rule;
  rule.points.resize(npts);
  rule.weights.resize(npts);
  for (int i = 0; i < (npts + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [pn, pm] = legendre(npts, x);
      const double dp = npts * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [pn, pm] = legendre(npts, x);
    const double dp = npts * (x * pn - pm) / (x * x - 1.0);
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);  // halved for [0, 1]
    rule.points[i] = 0.5 * (1.0 - x);
    rule.points[npts - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = w;
    rule.weights[npts - 1 - i] = w;
  }
  if (npts % 2 == 1) rule.points[npts / 2] = 0.5;
  return rule;
}

QuadratureRule reference_quadrature(int degree) {
  if (degree < 0 || degree > kMaxQuadratureDegree) {
    throw std::invalid_argument("reference_quadrature: degree " + std::to_string(degree) +
                                " outside tabulated range [0, " +
                                std::to_string(kMaxQuadratureDegree) + "]");
  }
  // Collapsed map x = u, y = v (1 - u) with Jacobian (1 - u): the u-integrand has
  // degree degree + 1.
  const int m = std::max(1, (degree + 2 + 1) / 2);
  const LineRule line = gauss_legendre(m);
  std::vector<std::array<double, 3>> bary;
  std::vector<double> base_weights;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double u = line.points[i];
      const double v = line.points[j];
      const double x = u, y = v * (1.0 - u);
      bary.push_back({1.0 - x - y, x, y});
      base_weights.push_back(line.weights[i] * line.weights[j] * (1.0 - u));
    }
  }
  static constexpr std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
  QuadratureRule rule;
  rule.degree = degree;
  for (const auto& p : perms) {
    for (size_t q = 0; q < bary.size(); ++q) {
      rule.points.emplace_back(bary[q][p[1]], bary[q][p[2]]);
      rule.weights.push_back(base_weights[q] / 6.0);
    }
  }
  return rule;
}

}  // namespace hodgewave
