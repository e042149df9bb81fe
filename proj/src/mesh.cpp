#include "hodgewave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hodgewave {

SimplicialMesh SimplicialMesh::structured_unit_square(int n) {
  if (n < 1) {
    throw std::invalid_argument("structured_unit_square: n must be positive, got " +
                                std::to_string(n));
  }
  std::vector<Point> vertices;
  vertices.reserve(static_cast<size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(static_cast<size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }
  SimplicialMesh mesh = from_triangles(std::move(vertices), std::move(triangles));
  mesh.level_ = n;
  return mesh;
}

SimplicialMesh SimplicialMesh::from_triangles(std::vector<Point> vertices,
                                              std::vector<std::array<int, 3>> triangles) {
  SimplicialMesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.triangles_ = std::move(triangles);
  for (const auto& tri : mesh.triangles_) {
    for (int v : tri) {
      if (v < 0 || v >= mesh.num_vertices()) {
        throw std::invalid_argument("from_triangles: vertex index out of range");
      }
    }
  }
  mesh.build_topology();
  return mesh;
}

void SimplicialMesh::build_topology() {
  const int nt = num_triangles();
  jacobians_.resize(nt);
  h_ = 0.0;
  max_diameter_ = 0.0;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    Eigen::Matrix2d J;
    J.col(0) = vertices_[tri[1]] - vertices_[tri[0]];
    J.col(1) = vertices_[tri[2]] - vertices_[tri[0]];
    jacobians_[t] = J;
    const double area = 0.5 * J.determinant();
    if (!(area > 0.0)) {
      throw std::invalid_argument("from_triangles: triangle " + std::to_string(t) +
                                  " is not counterclockwise");
    }
    h_ = std::max(h_, std::sqrt(area));
    for (int i = 0; i < 3; ++i) {
      max_diameter_ =
          std::max(max_diameter_, (vertices_[tri[(i + 1) % 3]] - vertices_[tri[i]]).norm());
    }
  }

  // Canonical edge numbering: lexicographic in (low, high).
  std::vector<std::pair<int, int>> keys;
  keys.reserve(static_cast<size_t>(3 * nt));
  for (const auto& tri : triangles_) {
    for (int i = 0; i < 3; ++i) {
      const int p = tri[(i + 1) % 3], q = tri[(i + 2) % 3];
      keys.emplace_back(std::min(p, q), std::max(p, q));
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  edges_.clear();
  edges_.reserve(keys.size());
  for (const auto& [a, b] : keys) edges_.push_back({a, b});

  triangle_edges_.assign(nt, {0, 0, 0});
  triangle_edge_signs_.assign(nt, {0, 0, 0});
  edge_triangles_.assign(edges_.size(), {-1, -1});
  for (int t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) {
      const int p = tri[(i + 1) % 3], q = tri[(i + 2) % 3];
      const auto key = std::make_pair(std::min(p, q), std::max(p, q));
      const int e = static_cast<int>(std::lower_bound(keys.begin(), keys.end(), key) - keys.begin());
      triangle_edges_[t][i] = e;
      triangle_edge_signs_[t][i] = p < q ? 1 : -1;
      auto& inc = edge_triangles_[e];
      if (inc[0] < 0) {
        inc[0] = t;
      } else if (inc[1] < 0) {
        inc[1] = t;
      } else {
        throw std::invalid_argument("from_triangles: edge shared by more than two triangles");
      }
    }
  }

  boundary_vertex_.assign(vertices_.size(), false);
  for (int e = 0; e < num_edges(); ++e) {
    if (is_boundary_edge(e)) {
      boundary_vertex_[edges_[e].a] = true;
      boundary_vertex_[edges_[e].b] = true;
    }
  }
}

double SimplicialMesh::signed_area(int t) const { return 0.5 * jacobians_[t].determinant(); }

Point SimplicialMesh::to_physical(int t, const Point& xi) const {
  return vertices_[triangles_[t][0]] + jacobians_[t] * xi;
}

Point SimplicialMesh::to_reference(int t, const Point& x) const {
  return jacobians_[t].inverse() * (x - vertices_[triangles_[t][0]]);
}

int SimplicialMesh::locate(const Point& x) const {
  constexpr double tol = 1e-12;
  auto inside = [&](int t) {
    const Point xi = to_reference(t, x);
    return xi.x() >= -tol && xi.y() >= -tol && xi.x() + xi.y() <= 1.0 + tol;
  };
  if (level_) {
    const int n = *level_;
    if (x.x() >= -tol && x.x() <= 1.0 + tol && x.y() >= -tol && x.y() <= 1.0 + tol) {
      const int i = std::clamp(static_cast<int>(std::floor(x.x() * n)), 0, n - 1);
      const int j = std::clamp(static_cast<int>(std::floor(x.y() * n)), 0, n - 1);
      const int base = 2 * (j * n + i);
      if (inside(base)) return base;
      if (inside(base + 1)) return base + 1;
    }
  } else {
    for (int t = 0; t < num_triangles(); ++t) {
      if (inside(t)) return t;
    }
  }
  throw std::out_of_range("locate: point (" + std::to_string(x.x()) + ", " +
                          std::to_string(x.y()) + ") lies outside the mesh");
}

Eigen::SparseMatrix<double> SimplicialMesh::vertex_edge_incidence() const {
  std::vector<Eigen::Triplet<double>> entries;
  for (int e = 0; e < num_edges(); ++e) {
    entries.emplace_back(e, edges_[e].a, -1.0);
    entries.emplace_back(e, edges_[e].b, 1.0);
  }
  Eigen::SparseMatrix<double> m(num_edges(), num_vertices());
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

Eigen::SparseMatrix<double> SimplicialMesh::edge_triangle_incidence() const {
  std::vector<Eigen::Triplet<double>> entries;
  for (int t = 0; t < num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      entries.emplace_back(t, triangle_edges_[t][i], triangle_edge_signs_[t][i]);
    }
  }
  Eigen::SparseMatrix<double> m(num_triangles(), num_edges());
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

void SimplicialMesh::write_text(std::ostream& os) const {
  for (int v = 0; v < num_vertices(); ++v) {
    os << "vertex " << v << ' ' << vertices_[v].x() << ' ' << vertices_[v].y() << ' '
       << (boundary_vertex_[v] ? 1 : 0) << '\n';
  }
  for (int e = 0; e < num_edges(); ++e) {
    os << "edge " << e << ' ' << edges_[e].a << ' ' << edges_[e].b << ' '
       << (is_boundary_edge(e) ? 1 : 0) << '\n';
  }
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    const bool on_boundary = is_boundary_edge(triangle_edges_[t][0]) ||
                             is_boundary_edge(triangle_edges_[t][1]) ||
                             is_boundary_edge(triangle_edges_[t][2]);
    os << "triangle " << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' '
       << (on_boundary ? 1 : 0) << '\n';
  }
}

BoundaryEntities boundary_entities(const SimplicialMesh& mesh) {
  BoundaryEntities out;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.is_boundary_vertex(v)) out.vertices.push_back(v);
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.is_boundary_edge(e)) out.edges.push_back(e);
  }
  return out;
}

}  // namespace hodgewave
