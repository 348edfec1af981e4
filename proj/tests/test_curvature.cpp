#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "regge/curvature.hpp"
#include "regge/geom.hpp"
#include "regge/linalg.hpp"
#include "support.hpp"

using namespace regge;
using namespace regge::testing;

namespace {

// Fan of five triangles around the origin.
std::shared_ptr<const Mesh> pentagon_fan() {
  std::vector<Vec2d> v{{0.0, 0.0}};
  for (int k = 0; k < 5; ++k) v.push_back({std::cos(2 * kPi * k / 5), std::sin(2 * kPi * k / 5)});
  std::vector<std::array<int, 3>> t;
  for (int k = 0; k < 5; ++k) t.push_back({0, 1 + k, 1 + (k + 1) % 5});
  return std::make_shared<const Mesh>(std::move(v), std::move(t));
}

std::vector<double> euclidean_lengths(const Mesh& m) {
  std::vector<double> l(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    const Vec2d& a = m.vertex(m.edge(e).v[0]);
    const Vec2d& b = m.vertex(m.edge(e).v[1]);
    l[e] = std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  return l;
}

// Angle at local vertex i of t from the lengths of its edges.
double law_of_cosines(const Mesh& m, const std::vector<double>& l, int t, int i) {
  const double a = l[m.tri_edge(t, i)];
  const double b = l[m.tri_edge(t, (i + 1) % 3)];
  const double c = l[m.tri_edge(t, (i + 2) % 3)];
  return std::acos((b * b + c * c - a * a) / (2 * b * c));
}

// Geodesic curvature of a straight edge with Christoffel symbols from central differences of g.
double fd_geodesic_curvature(const Mesh& m, const TensorField& g, int t, const Bary& b, const Vec2d& tv) {
  const auto dl = m.dlambda(t);
  const double h = 1e-4;
  std::array<Mat2d, 2> dg;
  for (int k = 0; k < 2; ++k) {
    Bary p = b, q = b;
    for (int j = 0; j < 3; ++j) {
      p[j] += h * dl[j][k];
      q[j] -= h * dl[j][k];
    }
    const Mat2d gp = g.tensor_jet(t, p).val, gq = g.tensor_jet(t, q).val;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) dg[k][i][j] = (gp[i][j] - gq[i][j]) / (2 * h);
  }
  const Mat2d gv = g.tensor_jet(t, b).val;
  const Mat2d gi = inverse2(gv);
  const double tl = std::sqrt(bilinear(gv, tv, tv));
  const Vec2d tau{tv[0] / tl, tv[1] / tl};
  const Vec2d nu{tv[1], -tv[0]};
  const double nl = std::sqrt(bilinear(gi, nu, nu));
  const Vec2d n{(gi[0][0] * nu[0] + gi[0][1] * nu[1]) / nl, (gi[1][0] * nu[0] + gi[1][1] * nu[1]) / nl};
  // g(n, Gamma(tau, tau)) = n^l Gamma_{ij,l} tau^i tau^j
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) s += n[l] * tau[i] * tau[j] * 0.5 * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
  return -s;
}

}  // namespace

TEST_SUITE("curvature") {

TEST_CASE("time quadrature") {
  TimeQuadInfo info;
  const auto v = integrate_in_time([](double t) { return std::vector<double>{std::exp(t), 1.0 / (1.0 + t)}; }, {}, &info);
  CHECK(v[0] == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  CHECK(v[1] == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(info.panels >= 2);
  CHECK(info.nodes.size() == static_cast<std::size_t>(5 * info.panels));
  const auto z = integrate_in_time([](double) { return std::vector<double>{0.0}; });
  CHECK(z[0] == 0.0);
  CHECK_THROWS_AS(integrate_in_time([](double t) { return std::vector<double>{1.0 / std::sqrt(t)}; }, {1e-14, 8}),
                  TimeQuadratureError);
}

TEST_CASE("angle defects") {
  auto fan = pentagon_fan();
  const ConstantTensor delta(identity2());
  CHECK(std::abs(angle_defect(*fan, delta, 0)) < 1e-14);
  CHECK_THROWS_AS(angle_defect(*fan, delta, 1), std::invalid_argument);
  // five unit equilateral triangles
  const PiecewiseConstantTensor cone(metric_from_edge_lengths(*fan, std::vector<double>(fan->num_edges(), 1.0)));
  CHECK(std::abs(angle_defect(*fan, cone, 0) - kPi / 3) < 1e-13);
  // random lengths against the law of cosines
  auto m = square(3);
  std::vector<double> l = euclidean_lengths(*m);
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0.95, 1.05);
  for (double& x : l) x *= u(rng);
  const PiecewiseConstantTensor g(metric_from_edge_lengths(*m, l));
  for (int z = 0; z < m->num_vertices(); ++z) {
    if (m->vertex_on_boundary(z)) continue;
    double sum = 0.0;
    for (int t : m->star(z)) sum += law_of_cosines(*m, l, t, m->local_vertex(t, z));
    CHECK(std::abs(angle_defect(*m, g, z) - (2 * kPi - sum)) < 1e-12);
  }
}

TEST_CASE("geodesic-curvature jumps") {
  auto m = square(3);
  const ConstantTensor delta(identity2());
  std::vector<double> l = euclidean_lengths(*m);
  for (std::size_t i = 0; i < l.size(); ++i) l[i] *= 1.0 + 0.03 * std::sin(3.0 * i);
  const PiecewiseConstantTensor pc(metric_from_edge_lengths(*m, l));
  const ClosedFormTensor conf(m, [](const Jet2& x, const Jet2& y) { return conformal(x, y, 0.4); });
  const ReggeField gh = interp_regge(regge_space(m, 2), conf);
  const EdgeQuadRule er = edge_rule(12);
  for (int e = 0; e < m->num_edges(); ++e) {
    if (m->edge_on_boundary(e)) {
      CHECK_THROWS_AS(jump_geodesic(*m, delta, e, 0.5), std::invalid_argument);
      continue;
    }
    CHECK(std::abs(jump_geodesic(*m, delta, e, 0.3)) < 1e-14);
    CHECK(std::abs(jump_geodesic(*m, pc, e, 0.3)) < 1e-14);
    const Edge& ed = m->edge(e);
    const Vec2d& a = m->vertex(ed.v[0]);
    const Vec2d& b = m->vertex(ed.v[1]);
    const Vec2d te{b[0] - a[0], b[1] - a[1]};
    double got = 0.0, ref = 0.0, size = 0.0;
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      const double s = er.points[q];
      const double ds = er.weights[q] * std::sqrt(bilinear(gh.tensor_jet(ed.tri[0], Mesh::edge_point(ed.local[0], m->tri_edge_sign(ed.tri[0], ed.local[0]) > 0 ? s : 1 - s)).val, te, te));
      got += ds * jump_geodesic(*m, gh, e, s);
      for (int side = 0; side < 2; ++side) {
        const int t = ed.tri[side], i = ed.local[side];
        const Bary bp = Mesh::edge_point(i, m->tri_edge_sign(t, i) > 0 ? s : 1 - s);
        const double k = fd_geodesic_curvature(*m, gh, t, bp, m->edge_vector(t, i));
        ref += ds * k;
        size += ds * std::abs(k);
      }
    }
    CHECK(std::abs(got - ref) < 1e-6 * size);
  }
}

TEST_CASE("curvature decomposition") {
  auto fan = pentagon_fan();
  const PiecewiseConstantTensor cone(metric_from_edge_lengths(*fan, std::vector<double>(fan->num_edges(), 1.0)));
  const ReggeField gc = interp_regge(regge_space(fan, 0), cone);
  auto v1 = std::make_shared<const FeSpace>(fan, SpaceKind::Lagrange, 1);
  Eigen::VectorXd hat = Eigen::VectorXd::Zero(v1->ndofs());
  hat[0] = 1.0;
  const FeFunction apex(v1, hat);
  for (const TensorField* g : {static_cast<const TensorField*>(&cone), static_cast<const TensorField*>(&gc)}) {
    const CurvatureReport r = distributional_curvature(*fan, *g, apex, 6);
    CHECK(std::abs(r.total - kPi / 3) < 1e-13);
    CHECK(std::abs(r.angle_defect[0] - kPi / 3) < 1e-13);
    for (double x : r.triangle) CHECK(std::abs(x) < 1e-13);
    for (double x : r.edge) CHECK(std::abs(x) < 1e-13);
  }
  // flat metrics give identically zero reports
  auto m = square(3);
  auto vs = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, 3);
  const FeFunction v(vs, random_free(*vs, 4));
  const ConstantTensor delta(identity2());
  const ConstantTensor scaled({{{2.0, 0.5}, {0.5, 1.0}}});
  for (const TensorField* g : {static_cast<const TensorField*>(&delta), static_cast<const TensorField*>(&scaled)}) {
    const CurvatureReport r = distributional_curvature(*m, *g, v, 8);
    for (double x : r.triangle) CHECK(std::abs(x) < 1e-13);
    for (double x : r.edge) CHECK(std::abs(x) < 1e-13);
    for (double x : r.vertex) CHECK(std::abs(x) < 1e-13);
  }
  // Gauss-Bonnet: v = 1 at every interior vertex of a piecewise-constant metric
  std::vector<double> l = euclidean_lengths(*m);
  for (std::size_t i = 0; i < l.size(); ++i) l[i] *= 1.0 + 0.04 * std::cos(5.0 * i);
  const PiecewiseConstantTensor pc(metric_from_edge_lengths(*m, l));
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(vs->ndofs());
  for (int z = 0; z < m->num_vertices(); ++z) ones[z] = m->vertex_on_boundary(z) ? 0.0 : 1.0;
  auto p1 = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, 1);
  const FeFunction patch(p1, ones.head(p1->ndofs()));
  const CurvatureReport r = distributional_curvature(*m, pc, patch, 6);
  double defects = 0.0;
  for (double x : r.angle_defect) defects += x;
  CHECK(std::abs(defects) > 1e-3);
  CHECK(std::abs(r.total - defects) < 1e-13);
  CHECK(std::abs(r.total - (r.triangle_sum + r.edge_sum + r.vertex_sum)) == 0.0);
  CHECK(r.to_json().find("\"angle_defect\"") != std::string::npos);
}

TEST_CASE("path formula reproduces the distributional curvature") {
  for (int r = 1; r <= 2; ++r) {
    auto m = square(4);
    const ClosedFormTensor conf(m, [](const Jet2& x, const Jet2& y) { return conformal(x, y); });
    const ReggeField gh = interp_regge(regge_space(m, r), conf);
    auto vs = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, r + 1);
    const int qd = default_form_quad(r);
    const ScalarLoad direct = distributional_curvature_load(*m, gh, qd);
    TimeQuadInfo info;
    const ScalarLoad path = curvature_path_load(*m, gh, qd, {}, &info);
    CHECK(info.panels >= 2);
    for (unsigned k = 0; k < 5; ++k) {
      const FeFunction v(vs, random_free(*vs, 90 + 10 * r + k));
      CHECK(rel_diff(apply(direct, v), apply(path, v)) < 1e-8);
    }
    // random metric as well
    const ReggeField gr = random_metric(regge_space(m, r), 17 + r);
    const FeFunction v(vs, random_free(*vs, 123));
    CHECK(rel_diff(apply(distributional_curvature_load(*m, gr, qd), v), apply(curvature_path_load(*m, gr, qd), v)) < 1e-8);
  }
}

TEST_CASE("discrete curvature and connection") {
  auto m = square(4);
  const int r = 1;
  const int qd = default_form_quad(r);
  auto vs = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, r + 1);
  auto ws = std::make_shared<const FeSpace>(m, SpaceKind::Edge, r + 1);
  const ConstantTensor delta(identity2());
  CHECK(discrete_curvature(delta, vs, qd).coeffs().cwiseAbs().maxCoeff() < 1e-12);
  const ConnectionOneForm flat = canonical_connection(delta, ws, ConnectionTarget::Discrete, qd);
  CHECK(flat.discrete->coeffs().cwiseAbs().maxCoeff() < 1e-14);
  const ConstantTensor scaled({{{2.5, 0.0}, {0.0, 2.5}}});
  const ConnectionOneForm sc = canonical_connection(scaled, ws, ConnectionTarget::Discrete, qd);
  CHECK(sc.discrete->coeffs().cwiseAbs().maxCoeff() < 1e-12);

  const ClosedFormTensor conf(m, [](const Jet2& x, const Jet2& y) { return conformal(x, y); });
  const ReggeField gh = interp_regge(regge_space(m, r), conf);
  const FeFunction kh = discrete_curvature(gh, vs, qd);
  const ConnectionOneForm gam = canonical_connection(gh, ws, ConnectionTarget::Discrete, qd);
  REQUIRE(gam.discrete.has_value());
  const SparseMatrix mv = mass_matrix(*vs, gh, qd);
  const SparseMatrix mw = mass_matrix(*ws, gh, qd);
  const SparseMatrix d0 = d0_matrix(*vs, *ws);
  for (unsigned k = 0; k < 20; ++k) {
    const Eigen::VectorXd v = random_free(*vs, 500 + k);
    const double a = gam.discrete->coeffs().dot(mw * (d0 * v));
    const double b = kh.coeffs().dot(mv * v);
    CHECK(std::abs(a + b) < 1e-8 * std::abs(b));
  }
  // co-exact gauge perturbations leave the pairing unchanged
  auto xs = std::make_shared<const FeSpace>(m, SpaceKind::TwoForm, r);
  const SparseMatrix d1 = d1_matrix(*ws, *xs);
  const SparseMatrix mx = mass_matrix(*xs, gh, qd);
  const Eigen::VectorXd f = random_vector(xs->ndofs(), 77);
  const Eigen::VectorXd gauge_load = -(d1.transpose() * (mx * f));
  const Eigen::VectorXd shift = project_functional(Functional{ws, ws->extend_free(ws->restrict_free(gauge_load))}, gh, qd);
  CHECK(shift.norm() > 1e-3);
  for (unsigned k = 0; k < 5; ++k) {
    const Eigen::VectorXd dv = d0 * random_free(*vs, 600 + k);
    const double a = gam.discrete->coeffs().dot(mw * dv);
    const double b = (gam.discrete->coeffs() + shift).dot(mw * dv);
    CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("reference connection") {
  auto m = square(2);
  const ConstantTensor delta(identity2());
  auto ws = std::make_shared<const FeSpace>(m, SpaceKind::Edge, 2);
  const FeOneForm a(ws, random_free(*ws, 3));
  CHECK(apply(reference_connection_load(*m, delta, 8), a) == 0.0);
  const ClosedFormTensor conf(m, [](const Jet2& x, const Jet2& y) { return conformal(x, y, 0.3); });
  // Euclidean closed form of the integrand at t = 0: with f = e^{2 phi} - 1, it is 1/2 (-f_y, f_x)
  for (const Vec2d& x : {Vec2d{0.3, 0.6}, Vec2d{0.8, 0.1}}) {
    const TensorJet gj = conf.at(x);
    const Vec2d i0 = reference_connection_integrand(gj, 0.0);
    const Jet2 phi = 0.3 * sin(kPi * Jet2::coordinate(x[0], 0)) * sin(kPi * Jet2::coordinate(x[1], 1));
    const Jet2 f = exp(2.0 * phi) - 1.0;
    CHECK(i0[0] == doctest::Approx(-0.5 * f.g[1]).epsilon(1e-13));
    CHECK(i0[1] == doctest::Approx(0.5 * f.g[0]).epsilon(1e-13));
  }
  // pairing against alpha equals 1/2 of the time integral of <div S sigma, alpha> under the path metric
  const int qd = 10;
  const double got = apply(reference_connection_load(*m, conf, qd), a);
  const TriQuadRule tr = tri_rule(qd);
  const auto ref = integrate_in_time([&](double t) {
    const LinearTensor path = euclidean_path(conf, t);
    const LinearTensor sigma = minus_euclidean(conf);
    double s = 0.0;
    for (int tri = 0; tri < m->num_triangles(); ++tri)
      for (std::size_t q = 0; q < tr.points.size(); ++q) {
        const TensorJet gj = path.tensor_jet(tri, tr.points[q]);
        const Mat2d gi = inverse2(gj.val);
        const Vec2d d = div_s_sigma(gj, sigma.tensor_jet(tri, tr.points[q]));
        const Vec2d al = a.oneform_jet(tri, tr.points[q]).val;
        double dot = 0.0;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) dot += gi[i][j] * d[i] * al[j];
        s += tr.weights[q] * m->area(tri) * std::sqrt(det2(gj.val)) * 0.5 * dot;
      }
    return std::vector<double>{s};
  });
  CHECK(std::abs(got) > 1e-4);
  CHECK(rel_diff(got, ref[0]) < 1e-9);
}

}  // TEST_SUITE
