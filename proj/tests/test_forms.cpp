#include <doctest.h>

#include <cmath>

#include "regge/forms.hpp"
#include "regge/geom.hpp"
#include "support.hpp"

using namespace regge;
using namespace regge::testing;

namespace {

// Euclidean evaluation of b_h(delta; sigma, v) with normals from rotated edge vectors.
double euclidean_bh(const Mesh& m, const TensorField& sigma, const ScalarField& v, int qd) {
  const TriQuadRule tr = tri_rule(qd);
  const EdgeQuadRule er = edge_rule(qd);
  double s = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      const Mat2d sg = sigma.tensor_jet(t, tr.points[q]).val;
      const Mat2d h = v.scalar_jet(t, tr.points[q]).hess;
      const double tr_s = sg[0][0] + sg[1][1];
      double dot = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) dot += (sg[i][j] - (i == j ? tr_s : 0.0)) * h[i][j];
      s += tr.weights[q] * m.area(t) * dot;
    }
    for (int i = 0; i < 3; ++i) {
      const Vec2d tv = m.edge_vector(t, i);
      const double len = std::hypot(tv[0], tv[1]);
      const Vec2d tau{tv[0] / len, tv[1] / len};
      const Vec2d nu{tau[1], -tau[0]};
      for (std::size_t q = 0; q < er.points.size(); ++q) {
        const Bary b = Mesh::edge_point(i, er.points[q]);
        const Vec2d gv = v.scalar_jet(t, b).grad;
        s += er.weights[q] * len * bilinear(sigma.tensor_jet(t, b).val, tau, tau) * (gv[0] * nu[0] + gv[1] * nu[1]);
      }
    }
  }
  return s;
}

double scale_of(const ScalarLoad& load, const ScalarField& v) {
  // Sum of absolute term contributions, a natural size for relative comparisons.
  double s = 0.0;
  for (std::size_t i = 0; i < load.size(); ++i) {
    const ScalarJet j = v.scalar_jet(load.triangle(i), load.point(i));
    const double* c = load.coef(i);
    s += std::abs(c[0] * j.val) + std::abs(c[1] * j.grad[0]) + std::abs(c[2] * j.grad[1]) +
         std::abs(c[3] * j.hess[0][0]) + std::abs(c[4] * j.hess[0][1]) + std::abs(c[5] * j.hess[1][0]) +
         std::abs(c[6] * j.hess[1][1]);
  }
  return s;
}

}  // namespace

TEST_SUITE("forms") {

TEST_CASE("Euclidean metric in its own direction gives zero") {
  auto m = square(3);
  const ConstantTensor delta(identity2());
  for (int r = 0; r <= 2; ++r) {
    const FormContext ctx{*m, delta, default_form_quad(r)};
    auto vs = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, r + 1);
    auto ws = std::make_shared<const FeSpace>(m, SpaceKind::Edge, r + 1);
    const FeFunction v(vs, random_free(*vs, 3 + r));
    const FeOneForm a(ws, random_free(*ws, 7 + r));
    CHECK(std::abs(bh_direct(ctx, delta, v)) < 1e-12);
    CHECK(std::abs(bh_ibp(ctx, delta, v)) < 1e-12);
    CHECK(std::abs(ch_direct(ctx, delta, a)) < 1e-12);
    CHECK(std::abs(ch_ibp(ctx, delta, a)) < 1e-12);
  }
}

TEST_CASE("direct b_h matches an independent Euclidean evaluation") {
  for (int n : {1, 3}) {
    auto m = square(n);
    const ConstantTensor delta(identity2());
    const ClosedFormTensor sigma(m, [](const Jet2& x, const Jet2& y) { return SymJet2{1.0 + y * y, 0.5 * x * y, 2.0 + x * x}; });
    auto vs = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, 3);
    const FeFunction v(vs, random_free(*vs, 19));
    const FormContext ctx{*m, delta, 10};
    const double a = bh_direct(ctx, sigma, v);
    const double b = euclidean_bh(*m, sigma, v, 10);
    CHECK(std::abs(a) > 1e-3);
    CHECK(rel_diff(a, b) < 1e-12);
    // constant sigma = E11 on the two-triangle square
    const ConstantTensor e11({{{1.0, 0.0}, {0.0, 0.0}}});
    CHECK(std::abs(bh_direct(ctx, e11, v) - euclidean_bh(*m, e11, v, 10)) < 1e-12);
  }
}

TEST_CASE("direct and integrated-by-parts forms agree") {
  for (int n : {2, 4}) {
    auto m = square(n);
    for (int r = 1; r <= 2; ++r) {
      auto rs = regge_space(m, r);
      const ReggeField g = random_metric(rs, 100 * n + r);
      REQUIRE(is_metric(g, *m).ok);
      const ReggeField sigma = random_regge(rs, 200 * n + r);
      const FormContext ctx{*m, g, default_form_quad(r)};
      auto vs = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, r + 1);
      auto ws = std::make_shared<const FeSpace>(m, SpaceKind::Edge, r + 1);
      const FeFunction v(vs, random_free(*vs, 300 * n + r));
      const FeOneForm a(ws, random_free(*ws, 400 * n + r));
      CHECK(rel_diff(bh_direct(ctx, sigma, v), bh_ibp(ctx, sigma, v)) < 1e-9);
      CHECK(rel_diff(ch_direct(ctx, sigma, a), ch_ibp(ctx, sigma, a)) < 1e-9);
      // sigma = g: the integrated form vanishes termwise and the direct form up to quadrature
      const ScalarLoad self = bh_direct_load(ctx, g);
      CHECK(std::abs(apply(self, v)) < 1e-9 * scale_of(self, v));
      CHECK(std::abs(bh_ibp(ctx, g, v)) < 1e-12);
    }
  }
}

TEST_CASE("c_h on an exact one-form equals b_h") {
  auto m = square(3);
  for (int r = 0; r <= 2; ++r) {
    auto rs = regge_space(m, r);
    const ReggeField g = random_metric(rs, 31 + r);
    const ReggeField sigma = random_regge(rs, 41 + r);
    const FormContext ctx{*m, g, default_form_quad(r)};
    auto vs = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, r + 1);
    const FeFunction v(vs, random_free(*vs, 51 + r));
    const GradientOneForm dv(v);
    CHECK(rel_diff(ch_direct(ctx, sigma, dv), bh_direct(ctx, sigma, v)) < 1e-10);
  }
}

TEST_CASE("matrix action agrees with the scalar assembly") {
  auto m = square(2);
  for (int r = 0; r <= 2; ++r) {
    auto rs = regge_space(m, r);
    const ReggeField g = random_metric(rs, 61 + r);
    const FormContext ctx{*m, g, default_form_quad(r)};
    auto vs = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, r + 1);
    auto ws = std::make_shared<const FeSpace>(m, SpaceKind::Edge, r + 1);
    const SparseMatrix b = bh_matrix(ctx, *rs, *vs);
    const SparseMatrix c = ch_matrix(ctx, *rs, *ws);
    CHECK(b.rows() == vs->num_free());
    CHECK(c.rows() == ws->num_free());
    for (unsigned k = 0; k < 20; ++k) {
      const ReggeField sigma = random_regge(rs, 1000 + 50 * r + k);
      const FeFunction v(vs, random_free(*vs, 2000 + 50 * r + k));
      const FeOneForm a(ws, random_free(*ws, 3000 + 50 * r + k));
      const double mb = vs->restrict_free(v.coeffs()).dot(b * sigma.coeffs());
      const double mc = ws->restrict_free(a.coeffs()).dot(c * sigma.coeffs());
      CHECK(rel_diff(mb, bh_direct(ctx, sigma, v)) < 1e-12);
      CHECK(rel_diff(mc, ch_direct(ctx, sigma, a)) < 1e-12);
      const Eigen::VectorXd fb = assemble(bh_direct_load(ctx, sigma), *vs);
      CHECK((vs->restrict_free(fb) - b * sigma.coeffs()).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + fb.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("Euclidean b_h annihilates symmetric gradients") {
  auto m = square(3);
  const ConstantTensor delta(identity2());
  for (int r = 0; r <= 2; ++r) {
    auto us = std::make_shared<const FeSpace>(m, SpaceKind::LagrangeVector, r + 1);
    auto vs = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, r + 1);
    const FeVectorField u(us, random_vector(us->ndofs(), 71 + r));
    const DeformationField eps(u, delta);
    const FeFunction v(vs, random_free(*vs, 81 + r));
    const FormContext ctx{*m, delta, default_form_quad(r)};
    const ScalarLoad load = bh_direct_load(ctx, eps);
    CHECK(std::abs(apply(load, v)) < 1e-11 * scale_of(load, v));
  }
}

TEST_CASE("piecewise-constant sigma under the Euclidean metric leaves only vertex terms") {
  auto m = square(3);
  const ConstantTensor delta(identity2());
  std::vector<Mat2d> vals(m->num_triangles());
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& s : vals) {
    s = {{{u(rng), u(rng)}, {0.0, u(rng)}}};
    s[1][0] = s[0][1];
  }
  const PiecewiseConstantTensor sigma(vals);
  auto vs = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, 2);
  const FeFunction v(vs, random_free(*vs, 8));
  const FormContext ctx{*m, delta, 6};
  const EntityTags tags(*m);
  const auto parts = apply_by_entity(bh_ibp_load(ctx, sigma), v, tags.count());
  double tri_edge = 0.0, vert = 0.0;
  for (int k = 0; k < tags.count(); ++k) (k < tags.vertex(0) ? tri_edge : vert) += std::abs(parts[k]);
  CHECK(tri_edge < 1e-13);
  CHECK(vert > 1e-3);
  const auto zero = apply_by_entity(bh_ibp_load(ctx, delta), v, tags.count());
  for (double z : zero) CHECK(std::abs(z) < 1e-14);
}

TEST_CASE("flipping the normal-derivative terms changes b_h") {
  auto m = square(2);
  auto rs = regge_space(m, 1);
  const ReggeField g = random_metric(rs, 9);
  const ReggeField sigma = random_regge(rs, 10);
  auto vs = std::make_shared<const FeSpace>(m, SpaceKind::Lagrange, 2);
  const FeFunction v(vs, random_free(*vs, 11));
  const FormContext good{*m, g, default_form_quad(1)};
  const FormContext bad{*m, g, default_form_quad(1), true};
  CHECK(rel_diff(bh_direct(good, sigma, v), bh_direct(bad, sigma, v)) > 1e-3);
}

TEST_CASE("a metric without tangential continuity is rejected") {
  auto m = square(2);
  std::vector<Mat2d> vals(m->num_triangles(), identity2());
  vals[0][0][0] = 2.0;
  const PiecewiseConstantTensor g(vals);
  const ConstantTensor delta(identity2());
  const FormContext ctx{*m, g, 4};
  CHECK_THROWS_AS(bh_direct_load(ctx, delta), std::logic_error);
}

}  // TEST_SUITE
