#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "regge/polyquad.hpp"

using namespace regge;

namespace {

double fact(int n) { return n <= 1 ? 1.0 : n * fact(n - 1); }

// Integral of xi^a eta^b over the reference triangle (area 1/2), Beta-function identity.
double monomial_integral(int a, int b) { return fact(a) * fact(b) / fact(a + b + 2); }

double apply_rule(const TriQuadRule& r, int a, int b) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.points.size(); ++q)
    s += r.weights[q] * std::pow(r.points[q][1], a) * std::pow(r.points[q][2], b);
  return 0.5 * s;  // area of the reference triangle
}

}  // namespace

TEST_SUITE("polyquad") {

TEST_CASE("centroid rule for degree zero") {
  const auto r = tri_rule(0);
  REQUIRE(r.points.size() == 1);
  CHECK(r.weights[0] == 1.0);
  CHECK(r.points[0][0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("weights sum to one") {
  for (int d : {0, 1, 2, 5, 9, 20, 40, kMaxQuadDegree}) {
    const auto r = tri_rule(d);
    double s = 0.0;
    for (double w : r.weights) s += w;
    CHECK(std::abs(s - 1.0) < 1e-14);
  }
}

TEST_CASE("degree four rule integrates x^2 y^2 to 1/180") {
  CHECK(std::abs(apply_rule(tri_rule(4), 2, 2) - 1.0 / 180.0) < 1e-16);
}

TEST_CASE("monomial exactness up to the rule degree") {
  for (int d : {2, 3, 6, 11, 20, 30, 40}) {
    const auto r = tri_rule(d);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        const double exact = monomial_integral(a, b);
        CHECK(std::abs(apply_rule(r, a, b) - exact) <= 1e-13 * exact);
      }
  }
}

TEST_CASE("random polynomial of rule degree") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int d : {4, 8, 16, 24}) {
    const auto r = tri_rule(d);
    double exact = 0.0, approx = 0.0;
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        const double c = u(rng);
        exact += c * monomial_integral(a, b);
        approx += c * apply_rule(r, a, b);
      }
    CHECK(std::abs(approx - exact) <= 1e-13 * exact);
  }
}

TEST_CASE("rules above the maximum are rejected") {
  CHECK_THROWS_AS(tri_rule(kMaxQuadDegree + 1), std::invalid_argument);
  CHECK_THROWS_AS(tri_rule(-1), std::invalid_argument);
}

TEST_CASE("edge rule exactness") {
  for (int d : {0, 1, 4, 9, 21}) {
    const auto r = edge_rule(d);
    for (int k = 0; k <= d; ++k) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.points.size(); ++q) s += r.weights[q] * std::pow(r.points[q], k);
      CHECK(std::abs(s - 1.0 / (k + 1)) < 1e-14);
    }
  }
}

TEST_CASE("shifted Legendre orthogonality") {
  const auto r = edge_rule(20);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.points.size(); ++q)
        s += r.weights[q] * shifted_legendre(i, r.points[q]) * shifted_legendre(j, r.points[q]);
      CHECK(std::abs(s - (i == j ? 1.0 / (2 * i + 1) : 0.0)) < 1e-14);
    }
  CHECK(shifted_legendre(3, 0.0) == doctest::Approx(-1.0));
  CHECK(shifted_legendre(3, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("Bernstein partition of unity and derivative sums") {
  for (int n : {0, 1, 2, 3, 5}) {
    const BernsteinBasis basis(n);
    CHECK(basis.size() == (n + 1) * (n + 2) / 2);
    for (const Bary& b : {Bary{0.2, 0.3, 0.5}, Bary{1.0, 0.0, 0.0}, Bary{0.1, 0.8, 0.1}}) {
      const auto v = eval_basis(basis, b);
      double s = 0.0;
      Vec2d g{0.0, 0.0};
      for (int k = 0; k < basis.size(); ++k) {
        s += v.val[k];
        g[0] += v.grad[k][0];
        g[1] += v.grad[k][1];
      }
      CHECK(std::abs(s - 1.0) < 1e-14);
      CHECK(std::abs(g[0]) < 1e-12);
      CHECK(std::abs(g[1]) < 1e-12);
    }
  }
}

TEST_CASE("Bernstein derivatives match finite differences") {
  const BernsteinBasis basis(4);
  const double xi = 0.27, eta = 0.31;
  auto at = [&](double x, double y) { return eval_basis(basis, Bary{1.0 - x - y, x, y}); };
  const auto c = at(xi, eta);
  double errs[2] = {0.0, 0.0};
  for (int s = 0; s < 2; ++s) {
    const double h = s == 0 ? 1e-3 : 5e-4;
    const auto px = at(xi + h, eta), mx = at(xi - h, eta), py = at(xi, eta + h), my = at(xi, eta - h);
    for (int k = 0; k < basis.size(); ++k) {
      errs[s] = std::max(errs[s], std::abs((px.val[k] - mx.val[k]) / (2 * h) - c.grad[k][0]));
      errs[s] = std::max(errs[s], std::abs((py.val[k] - my.val[k]) / (2 * h) - c.grad[k][1]));
      errs[s] = std::max(errs[s], std::abs((px.grad[k][0] - mx.grad[k][0]) / (2 * h) - c.hess[k][0][0]));
      errs[s] = std::max(errs[s], std::abs((py.grad[k][0] - my.grad[k][0]) / (2 * h) - c.hess[k][1][0]));
      errs[s] = std::max(errs[s], std::abs((py.grad[k][1] - my.grad[k][1]) / (2 * h) - c.hess[k][1][1]));
    }
  }
  CHECK(errs[0] < 1e-4);
  // second order: halving the step divides the error by about four
  CHECK(errs[1] < 0.3 * errs[0]);
}

TEST_CASE("Bernstein product and elevation evaluate consistently") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const BernsteinBasis b2(2), b3(3), b5(5);
  std::vector<double> a(b2.size()), c(b3.size());
  for (auto& x : a) x = u(rng);
  for (auto& x : c) x = u(rng);
  const auto p = bernstein_product(2, a, 3, c);
  const auto e = bernstein_elevate(2, a, 5);
  const Bary pt{0.15, 0.6, 0.25};
  std::vector<double> v2(b2.size()), v3(b3.size()), v5(b5.size());
  b2.eval(pt, v2.data());
  b3.eval(pt, v3.data());
  b5.eval(pt, v5.data());
  double fa = 0, fc = 0, fp = 0, fe = 0;
  for (int k = 0; k < b2.size(); ++k) fa += a[k] * v2[k];
  for (int k = 0; k < b3.size(); ++k) fc += c[k] * v3[k];
  for (int k = 0; k < b5.size(); ++k) {
    fp += p[k] * v5[k];
    fe += e[k] * v5[k];
  }
  CHECK(fp == doctest::Approx(fa * fc).epsilon(1e-13));
  CHECK(fe == doctest::Approx(fa).epsilon(1e-13));
  const auto m = bernstein_monomial({1, 2, 0});
  double fm = 0;
  std::vector<double> v3b(b3.size());
  b3.eval(pt, v3b.data());
  for (int k = 0; k < b3.size(); ++k) fm += m[k] * v3b[k];
  CHECK(fm == doctest::Approx(pt[0] * pt[1] * pt[1]).epsilon(1e-13));
}

}  // TEST_SUITE
