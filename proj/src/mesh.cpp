#include "regge/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace regge {

namespace {

double cross(const Vec2d& a, const Vec2d& b) { return a[0] * b[1] - a[1] * b[0]; }
Vec2d sub(const Vec2d& a, const Vec2d& b) { return {a[0] - b[0], a[1] - b[1]}; }

}  // namespace

Mesh::Mesh(std::vector<Vec2d> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  build_connectivity();
}

void Mesh::build_connectivity() {
  const int nv = num_vertices();
  const int nt = num_triangles();
  if (nt == 0) throw std::invalid_argument("mesh has no triangles");
  for (int t = 0; t < nt; ++t) {
    for (int v : triangles_[t])
      if (v < 0 || v >= nv) throw std::invalid_argument("triangle " + std::to_string(t) + " has invalid vertex index");
    if (area(t) <= 0.0) throw std::invalid_argument("triangle " + std::to_string(t) + " is not counterclockwise");
  }

  std::map<std::pair<int, int>, int> lookup;
  tri_edges_.assign(nt, {-1, -1, -1});
  tri_edge_sign_.assign(nt, {0, 0, 0});
  for (int t = 0; t < nt; ++t)
    for (int i = 0; i < 3; ++i) {
      const int a = triangles_[t][(i + 1) % 3];
      const int b = triangles_[t][(i + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, fresh] = lookup.try_emplace({key.first, key.second}, num_edges());
      if (fresh) {
        Edge e;
        e.v = {key.first, key.second};
        e.tri[0] = t;
        e.local[0] = i;
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.tri[1] >= 0) throw std::invalid_argument("edge shared by more than two triangles");
        const int s0 = tri_edge_sign_[e.tri[0]][e.local[0]];
        if ((a < b ? 1 : -1) == s0) throw std::invalid_argument("adjacent triangles have inconsistent orientation");
        e.tri[1] = t;
        e.local[1] = i;
      }
      tri_edges_[t][i] = it->second;
      tri_edge_sign_[t][i] = a < b ? 1 : -1;
    }

  vertex_boundary_.assign(nv, 0);
  std::vector<int> boundary_degree(nv, 0);
  std::vector<int> boundary_next(nv, -1);
  int nbe = 0;
  for (const Edge& e : edges_)
    if (e.tri[1] < 0) {
      ++nbe;
      const int t = e.tri[0];
      const int i = e.local[0];
      const int a = triangles_[t][(i + 1) % 3];
      const int b = triangles_[t][(i + 2) % 3];
      vertex_boundary_[a] = vertex_boundary_[b] = 1;
      ++boundary_degree[a];
      ++boundary_degree[b];
      boundary_next[a] = b;
    }

  std::vector<char> used(nv, 0);
  for (const auto& tri : triangles_)
    for (int v : tri) used[v] = 1;
  for (int v = 0; v < nv; ++v)
    if (!used[v]) throw std::invalid_argument("vertex " + std::to_string(v) + " is not used by any triangle");
  for (int v = 0; v < nv; ++v)
    if (vertex_boundary_[v] && boundary_degree[v] != 2)
      throw std::invalid_argument("boundary is not a manifold curve at vertex " + std::to_string(v));

  // Simply connected: one boundary loop and Euler characteristic one.
  int start = -1;
  for (int v = 0; v < nv && start < 0; ++v)
    if (vertex_boundary_[v]) start = v;
  int loop = 0;
  for (int v = start; start >= 0;) {
    v = boundary_next[v];
    ++loop;
    if (v == start || loop > nbe) break;
  }
  if (loop != nbe) throw std::invalid_argument("domain boundary has more than one component (holes are not supported)");
  if (nv - num_edges() + nt != 1)
    throw std::invalid_argument("domain is not simply connected (V - E + F != 1)");

  stars_.assign(nv, {});
  std::vector<std::vector<std::pair<int, int>>> fans(nv);  // (a-vertex, triangle)
  std::vector<std::vector<int>> b_of(nv);
  for (int t = 0; t < nt; ++t)
    for (int i = 0; i < 3; ++i) {
      const int z = triangles_[t][i];
      fans[z].push_back({triangles_[t][(i + 1) % 3], t});
      b_of[z].push_back(triangles_[t][(i + 2) % 3]);
    }
  for (int z = 0; z < nv; ++z) {
    auto& fan = fans[z];
    std::map<int, int> by_a;
    for (std::size_t k = 0; k < fan.size(); ++k) by_a[fan[k].first] = static_cast<int>(k);
    int first = 0;
    if (vertex_boundary_[z]) {
      for (std::size_t k = 0; k < fan.size(); ++k)
        if (std::find(b_of[z].begin(), b_of[z].end(), fan[k].first) == b_of[z].end()) first = static_cast<int>(k);
    }
    int k = first;
    for (std::size_t step = 0; step < fan.size(); ++step) {
      stars_[z].push_back(fan[k].second);
      const int t = fan[k].second;
      const int b = triangles_[t][(local_vertex(t, z) + 2) % 3];
      auto it = by_a.find(b);
      if (it == by_a.end()) break;
      k = it->second;
      if (k == first) break;
    }
    if (stars_[z].size() != fan.size())
      throw std::invalid_argument("vertex star of " + std::to_string(z) + " is not a single fan");
  }
}

Mesh Mesh::build_structured(const Rect& d, int n) {
  if (n < 1) throw std::invalid_argument("build_structured: n must be at least 1");
  std::vector<Vec2d> verts;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.push_back({d.x0 + (d.x1 - d.x0) * i / n, d.y0 + (d.y1 - d.y0) * j / n});
  std::vector<std::array<int, 3>> tris;
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), dd = id(i, j + 1);
      // Diagonals point away from the centre so that no edge joins two boundary vertices.
      const bool sw_ne = (2 * i + 1 < n) == (2 * j + 1 < n);
      if (sw_ne) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, dd});
      } else {
        tris.push_back({a, b, dd});
        tris.push_back({b, c, dd});
      }
    }
  return Mesh(std::move(verts), std::move(tris));
}

Mesh Mesh::refine() const {
  std::vector<Vec2d> verts = vertices_;
  const int nv = num_vertices();
  for (const Edge& e : edges_) {
    const Vec2d& p = vertices_[e.v[0]];
    const Vec2d& q = vertices_[e.v[1]];
    verts.push_back({0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])});
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * triangles_.size());
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& v = triangles_[t];
    const int m0 = nv + tri_edges_[t][0], m1 = nv + tri_edges_[t][1], m2 = nv + tri_edges_[t][2];
    tris.push_back({v[0], m2, m1});
    tris.push_back({m2, v[1], m0});
    tris.push_back({m1, m0, v[2]});
    tris.push_back({m0, m1, m2});
  }
  return Mesh(std::move(verts), std::move(tris));
}

int Mesh::local_vertex(int t, int v) const {
  for (int i = 0; i < 3; ++i)
    if (triangles_[t][i] == v) return i;
  return -1;
}

Vec2d Mesh::edge_vector(int t, int i) const {
  return sub(vertices_[triangles_[t][(i + 2) % 3]], vertices_[triangles_[t][(i + 1) % 3]]);
}

Vec2d Mesh::point(int t, const Bary& b) const {
  Vec2d x{0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    x[0] += b[i] * vertices_[triangles_[t][i]][0];
    x[1] += b[i] * vertices_[triangles_[t][i]][1];
  }
  return x;
}

double Mesh::area(int t) const {
  const auto& v = triangles_[t];
  return 0.5 * cross(sub(vertices_[v[1]], vertices_[v[0]]), sub(vertices_[v[2]], vertices_[v[0]]));
}

double Mesh::diameter(int t) const {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec2d e = edge_vector(t, i);
    d = std::max(d, std::hypot(e[0], e[1]));
  }
  return d;
}

double Mesh::h() const {
  double h = 0.0;
  for (int t = 0; t < num_triangles(); ++t) h = std::max(h, diameter(t));
  return h;
}

std::array<Vec2d, 3> Mesh::dlambda(int t) const {
  // grad lambda_i is the inward normal of edge i scaled by 1/height.
  const double a2 = 2.0 * area(t);
  std::array<Vec2d, 3> d;
  for (int i = 0; i < 3; ++i) {
    const Vec2d e = edge_vector(t, i);
    d[i] = {-e[1] / a2, e[0] / a2};
  }
  return d;
}

Bary Mesh::barycentric(int t, const Vec2d& x) const {
  const auto d = dlambda(t);
  const Vec2d& p0 = vertices_[triangles_[t][0]];
  const Vec2d r = sub(x, p0);
  const double l1 = d[1][0] * r[0] + d[1][1] * r[1];
  const double l2 = d[2][0] * r[0] + d[2][1] * r[1];
  return {1.0 - l1 - l2, l1, l2};
}

Bary Mesh::edge_point(int i, double s) {
  Bary b{0.0, 0.0, 0.0};
  b[(i + 1) % 3] = 1.0 - s;
  b[(i + 2) % 3] = s;
  return b;
}

void Mesh::validate() const {
  for (int t = 0; t < num_triangles(); ++t)
    if (area(t) <= 0.0) throw std::logic_error("orientation: triangle " + std::to_string(t));
  for (int e = 0; e < num_edges(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.tri[0] < 0) throw std::logic_error("edge without triangle");
    for (int s = 0; s < 2; ++s) {
      if (ed.tri[s] < 0) continue;
      if (tri_edges_[ed.tri[s]][ed.local[s]] != e) throw std::logic_error("edge incidence mismatch");
    }
    if (ed.tri[1] >= 0 && tri_edge_sign_[ed.tri[0]][ed.local[0]] == tri_edge_sign_[ed.tri[1]][ed.local[1]])
      throw std::logic_error("interior edge traversed in the same direction by both sides");
  }
  if (num_vertices() - num_edges() + num_triangles() != 1) throw std::logic_error("Euler relation");
  for (int z = 0; z < num_vertices(); ++z) {
    const auto& s = stars_[z];
    const std::size_t m = s.size();
    for (std::size_t k = 0; k + 1 < m + (vertex_boundary_[z] ? 0 : 1); ++k) {
      const int t0 = s[k];
      const int t1 = s[(k + 1) % m];
      const int b = triangles_[t0][(local_vertex(t0, z) + 2) % 3];
      if (local_vertex(t1, b) < 0) throw std::logic_error("star ordering at vertex " + std::to_string(z));
    }
  }
}

std::string mesh_to_json(const Mesh& m) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : m.vertices()) j["vertices"].push_back({v[0], v[1]});
  j["triangles"] = m.triangles();
  return j.dump();
}

Mesh mesh_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<Vec2d> verts;
  for (const auto& v : j.at("vertices")) verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  auto tris = j.at("triangles").get<std::vector<std::array<int, 3>>>();
  return Mesh(std::move(verts), std::move(tris));
}

}  // namespace regge
