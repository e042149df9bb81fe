#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hodgewave {

using Point = Eigen::Vector2d;

// Edge with canonical orientation low -> high vertex index.
struct Edge {
  int a;
  int b;
};

// Oriented triangulation of a planar polygon. Triangles are stored counterclockwise;
// local edge i of a triangle is the one opposite its local vertex i, traversed from
// local vertex i+1 to i+2. Immutable once built.
class SimplicialMesh {
 public:
  // Uniform n x n grid of the unit square, each cell cut along its lower-left to
  // upper-right diagonal.
  static SimplicialMesh structured_unit_square(int n);

  // Generic constructor; triangles with clockwise orientation are rejected.
  static SimplicialMesh from_triangles(std::vector<Point> vertices,
                                       std::vector<std::array<int, 3>> triangles);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  const Point& vertex(int v) const { return vertices_[v]; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }

  int triangle_edge(int t, int i) const { return triangle_edges_[t][i]; }
  // +1 if triangle t traverses its local edge i in the edge's stored direction.
  int triangle_edge_sign(int t, int i) const { return triangle_edge_signs_[t][i]; }
  // Incident triangles of an edge; the second entry is -1 on the boundary.
  const std::array<int, 2>& edge_triangles(int e) const { return edge_triangles_[e]; }

  bool is_boundary_vertex(int v) const { return boundary_vertex_[v]; }
  bool is_boundary_edge(int e) const { return edge_triangles_[e][1] < 0; }

  double signed_area(int t) const;
  // Affine map x = v0 + J xi from the reference triangle (0,0), (1,0), (0,1).
  const Eigen::Matrix2d& jacobian(int t) const { return jacobians_[t]; }
  Point to_physical(int t, const Point& xi) const;
  Point to_reference(int t, const Point& x) const;

  // max over triangles of |K|^{1/2}.
  double h() const { return h_; }
  double max_diameter() const { return max_diameter_; }
  // Grid resolution n for structured meshes; reports label them h = 1/n.
  std::optional<int> structured_level() const { return level_; }

  // Triangle containing x; throws for points outside the mesh.
  int locate(const Point& x) const;

  // Signed incidence: edges x vertices (-1 at a, +1 at b) and triangles x edges.
  Eigen::SparseMatrix<double> vertex_edge_incidence() const;
  Eigen::SparseMatrix<double> edge_triangle_incidence() const;

  // Plain-text dump, one entity per line: kind, index, constituents, boundary flag.
  void write_text(std::ostream& os) const;

 private:
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::array<int, 3>> triangle_edge_signs_;
  std::vector<std::array<int, 2>> edge_triangles_;
  std::vector<bool> boundary_vertex_;
  std::vector<Eigen::Matrix2d> jacobians_;
  double h_ = 0.0;
  double max_diameter_ = 0.0;
  std::optional<int> level_;
};

struct BoundaryEntities {
  std::vector<int> vertices;
  std::vector<int> edges;
};

BoundaryEntities boundary_entities(const SimplicialMesh& mesh);

}  // namespace hodgewave
