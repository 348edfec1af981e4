#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "regge/mesh.hpp"

using namespace regge;

TEST_SUITE("mesh") {

TEST_CASE("structured meshes have the expected counts") {
  const Mesh m1 = Mesh::build_structured({}, 1);
  CHECK(m1.num_vertices() == 4);
  CHECK(m1.num_triangles() == 2);
  CHECK(m1.num_edges() == 5);
  const Mesh m2 = Mesh::build_structured({}, 2);
  CHECK(m2.num_vertices() == 9);
  CHECK(m2.num_triangles() == 8);
  CHECK(m2.num_edges() == 16);
  for (int n : {1, 2, 3, 4, 7}) {
    const Mesh m = Mesh::build_structured({}, n);
    CHECK(m.num_triangles() == 2 * n * n);
    CHECK(m.num_vertices() - m.num_edges() + m.num_triangles() == 1);
    CHECK_NOTHROW(m.validate());
  }
}

TEST_CASE("mesh size of the n = 4 square") {
  CHECK(Mesh::build_structured({}, 4).h() == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-15));
}

TEST_CASE("n = 0 is rejected") { CHECK_THROWS_AS(Mesh::build_structured({}, 0), std::invalid_argument); }

TEST_CASE("red refinement") {
  const Mesh m = Mesh::build_structured({}, 1);
  const Mesh r = m.refine();
  CHECK(r.num_triangles() == 8);
  CHECK(m.h() == doctest::Approx(2.0 * r.h()));
  CHECK_NOTHROW(r.validate());
  const Mesh rr = Mesh::build_structured({0.0, 0.0, 2.0, 1.0}, 3).refine().refine();
  CHECK_NOTHROW(rr.validate());
  CHECK(rr.num_triangles() == 18 * 16);
  // shape regularity: the smallest angle is preserved by red refinement
  auto min_ratio = [](const Mesh& mm) {
    double q = 1e300;
    for (int t = 0; t < mm.num_triangles(); ++t) q = std::min(q, mm.area(t) / (mm.diameter(t) * mm.diameter(t)));
    return q;
  };
  CHECK(min_ratio(rr) == doctest::Approx(min_ratio(Mesh::build_structured({0.0, 0.0, 2.0, 1.0}, 3))));
}

TEST_CASE("interior edge classification agrees with a brute-force derivation") {
  for (const Mesh& m : {Mesh::build_structured({}, 1), Mesh::build_structured({}, 4),
                        Mesh::build_structured({}, 3).refine()}) {
    // boundary vertices re-derived from coordinates on the unit square
    for (int e = 0; e < m.num_edges(); ++e) {
      auto on_bdry = [&](int v) {
        const Vec2d& p = m.vertex(v);
        return p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0;
      };
      const bool interior = !on_bdry(m.edge(e).v[0]) || !on_bdry(m.edge(e).v[1]);
      CHECK(m.edge_has_interior_vertex(e) == interior);
      CHECK(m.vertex_on_boundary(m.edge(e).v[0]) == on_bdry(m.edge(e).v[0]));
    }
  }
}

TEST_CASE("structured meshes with n >= 2 have no chords") {
  for (int n : {2, 3, 4, 5}) {
    const Mesh m = Mesh::build_structured({}, n).refine();
    for (int e = 0; e < m.num_edges(); ++e)
      CHECK(m.edge_on_boundary(e) == !m.edge_has_interior_vertex(e));
  }
}

TEST_CASE("vertex stars are ordered fans") {
  const Mesh m = Mesh::build_structured({}, 3);
  for (int z = 0; z < m.num_vertices(); ++z) {
    const auto& s = m.star(z);
    std::set<int> uniq(s.begin(), s.end());
    CHECK(uniq.size() == s.size());
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      // consecutive triangles share an edge through z
      int shared = 0;
      for (int a : m.triangle(s[k]))
        for (int b : m.triangle(s[k + 1]))
          if (a == b) ++shared;
      CHECK(shared == 2);
    }
  }
  // interior vertex of the n = 2 union-jack mesh is surrounded by all eight triangles
  CHECK(m.star(5).size() >= 4);
  CHECK(Mesh::build_structured({}, 2).star(4).size() == 8);
}

TEST_CASE("edge incidence and orientation signs") {
  const Mesh m = Mesh::build_structured({}, 2);
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int i = 0; i < 3; ++i) {
      const Edge& e = m.edge(m.tri_edge(t, i));
      const int a = m.triangle(t)[(i + 1) % 3];
      const int b = m.triangle(t)[(i + 2) % 3];
      CHECK(m.tri_edge_sign(t, i) == (a == e.v[0] && b == e.v[1] ? 1 : -1));
    }
}

TEST_CASE("barycentric helpers") {
  const Mesh m = Mesh::build_structured({0.0, 0.0, 2.0, 3.0}, 2);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Bary b{0.2, 0.5, 0.3};
    const Bary back = m.barycentric(t, m.point(t, b));
    for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(b[i]));
    const auto d = m.dlambda(t);
    CHECK(d[0][0] + d[1][0] + d[2][0] == doctest::Approx(0.0));
  }
  const Bary e = Mesh::edge_point(0, 0.25);
  CHECK(e[0] == 0.0);
  CHECK(e[1] == 0.75);
  CHECK(e[2] == 0.25);
}

TEST_CASE("invalid triangulations are rejected") {
  // clockwise triangle
  CHECK_THROWS_AS(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}}), std::invalid_argument);
  // square with a square hole: 8 vertices, ring of 8 triangles
  std::vector<Vec2d> v{{0, 0}, {3, 0}, {3, 3}, {0, 3}, {1, 1}, {2, 1}, {2, 2}, {1, 2}};
  std::vector<std::array<int, 3>> t{{0, 1, 5}, {0, 5, 4}, {1, 2, 6}, {1, 6, 5},
                                    {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
  CHECK_THROWS_AS(Mesh(v, t), std::invalid_argument);
  // three triangles on one edge
  CHECK_THROWS_AS(Mesh({{0, 0}, {1, 0}, {0, 1}, {0, -1}, {1, 1}}, {{0, 1, 2}, {0, 3, 1}, {1, 4, 0}}),
                  std::invalid_argument);
}

TEST_CASE("JSON round trip") {
  const Mesh m = Mesh::build_structured({}, 3);
  const Mesh back = mesh_from_json(mesh_to_json(m));
  CHECK(back.num_vertices() == m.num_vertices());
  CHECK(back.num_edges() == m.num_edges());
  CHECK(back.triangles() == m.triangles());
}

}  // TEST_SUITE
