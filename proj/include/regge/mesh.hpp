#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "regge/jet.hpp"
#include "regge/polyquad.hpp"

namespace regge {

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

struct Edge {
  std::array<int, 2> v{};           // v[0] < v[1]; global orientation v[0] -> v[1]
  std::array<int, 2> tri{-1, -1};   // incident triangles, tri[1] = -1 on the boundary
  std::array<int, 2> local{-1, -1}; // local edge index within each incident triangle
};

// Oriented planar triangulation. Local edge i of a triangle is opposite local vertex i and runs
// from vertex (i+1)%3 to (i+2)%3, following the counterclockwise traversal.
class Mesh {
 public:
  Mesh(std::vector<Vec2d> vertices, std::vector<std::array<int, 3>> triangles);

  static Mesh build_structured(const Rect& domain, int n);
  Mesh refine() const;

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  const Vec2d& vertex(int v) const { return vertices_[v]; }
  const std::vector<Vec2d>& vertices() const { return vertices_; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const Edge& edge(int e) const { return edges_[e]; }

  int tri_edge(int t, int i) const { return tri_edges_[t][i]; }
  // +1 when local edge i of t runs along the global edge orientation.
  int tri_edge_sign(int t, int i) const { return tri_edge_sign_[t][i]; }

  bool vertex_on_boundary(int v) const { return vertex_boundary_[v]; }
  bool edge_on_boundary(int e) const { return edges_[e].tri[1] < 0; }
  // Edge with at least one endpoint off the boundary.
  bool edge_has_interior_vertex(int e) const {
    return !vertex_boundary_[edges_[e].v[0]] || !vertex_boundary_[edges_[e].v[1]];
  }

  // Triangles around v, consecutive entries sharing an edge through v. Closed fan for interior v.
  const std::vector<int>& star(int v) const { return stars_[v]; }

  int local_vertex(int t, int v) const;
  // Euclidean vector of local edge i of t in its counterclockwise direction.
  Vec2d edge_vector(int t, int i) const;
  Vec2d point(int t, const Bary& b) const;
  double area(int t) const;
  double diameter(int t) const;
  double h() const;
  // Gradients of the barycentric coordinates of t (constant).
  std::array<Vec2d, 3> dlambda(int t) const;
  Bary barycentric(int t, const Vec2d& x) const;
  // Barycentric point of parameter s along local edge i (counterclockwise direction).
  static Bary edge_point(int i, double s);

  // Throws std::logic_error naming the first violated invariant.
  void validate() const;

 private:
  void build_connectivity();

  std::vector<Vec2d> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<std::array<int, 3>> tri_edge_sign_;
  std::vector<char> vertex_boundary_;
  std::vector<std::vector<int>> stars_;
};

std::string mesh_to_json(const Mesh& m);
Mesh mesh_from_json(const std::string& text);

}  // namespace regge
