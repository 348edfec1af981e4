#include "regge/polyquad.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace regge {

EdgeQuadRule gauss_legendre(int npoints) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  EdgeQuadRule r;
  r.points.resize(npoints);
  r.weights.resize(npoints);
  r.degree = 2 * npoints - 1;
  if (npoints == 1) {
    r.points[0] = 0.5;
    r.weights[0] = 1.0;
    return r;
  }
  for (int i = 0; i < (npoints + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (npoints + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= npoints; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = npoints * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // [-1,1] -> [0,1]; x is the largest remaining root
    r.points[i] = 0.5 * (1.0 - x);
    r.points[npoints - 1 - i] = 0.5 * (1.0 + x);
    r.weights[i] = r.weights[npoints - 1 - i] = 0.5 * w;
  }
  return r;
}

EdgeQuadRule edge_rule(int degree) {
  if (degree < 0 || degree > 2 * kMaxQuadDegree)
    throw std::invalid_argument("edge_rule: unsupported degree " + std::to_string(degree));
  EdgeQuadRule r = gauss_legendre(degree / 2 + 1);
  return r;
}

TriQuadRule tri_rule(int degree) {
  if (degree < 0 || degree > kMaxQuadDegree)
    throw std::invalid_argument("tri_rule: unsupported degree " + std::to_string(degree));
  TriQuadRule r;
  r.degree = degree;
  if (degree <= 1) {
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(1.0);
    return r;
  }
  // Collapsed (Duffy) product rule: the Jacobian (1-u) raises the u-degree by one.
  const EdgeQuadRule gu = gauss_legendre((degree + 2) / 2 + 1);
  const EdgeQuadRule gv = gauss_legendre(degree / 2 + 1);
  for (std::size_t i = 0; i < gu.points.size(); ++i)
    for (std::size_t j = 0; j < gv.points.size(); ++j) {
      const double u = gu.points[i];
      const double xi = u;
      const double eta = gv.points[j] * (1.0 - u);
      r.points.push_back({1.0 - xi - eta, xi, eta});
      r.weights.push_back(2.0 * gu.weights[i] * gv.weights[j] * (1.0 - u));
    }
  return r;
}

double shifted_legendre(int j, double s) {
  const double x = 2.0 * s - 1.0;
  if (j == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= j; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// n!/a! lambda^a with zero for negative entries.
double bern_value(const MultiIndex& a, const Bary& b) {
  if (a[0] < 0 || a[1] < 0 || a[2] < 0) return 0.0;
  double v = multinomial(a);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < a[i]; ++k) v *= b[i];
  return v;
}

}  // namespace

double multinomial(const MultiIndex& a) {
  return factorial(a[0] + a[1] + a[2]) / (factorial(a[0]) * factorial(a[1]) * factorial(a[2]));
}

BernsteinBasis::BernsteinBasis(int degree) : n_(degree) {
  if (degree < 0) throw std::invalid_argument("BernsteinBasis: negative degree");
  lookup_.assign((n_ + 1) * (n_ + 1), -1);
  for (int i = 0; i <= n_; ++i)
    for (int j = 0; j <= n_ - i; ++j) {
      lookup_[i * (n_ + 1) + j] = static_cast<int>(idx_.size());
      idx_.push_back({n_ - i - j, i, j});
    }
}

int BernsteinBasis::index_of(const MultiIndex& a) const {
  if (a[0] < 0 || a[1] < 0 || a[2] < 0 || a[0] + a[1] + a[2] != n_) return -1;
  return lookup_[a[1] * (n_ + 1) + a[2]];
}

void BernsteinBasis::eval(const Bary& b, double* val) const {
  for (int k = 0; k < size(); ++k) val[k] = bern_value(idx_[k], b);
}

void BernsteinBasis::eval(const Bary& b, const std::array<Vec2d, 3>& dlam, double* val, Vec2d* grad,
                          Mat2d* hess) const {
  for (int k = 0; k < size(); ++k) {
    const MultiIndex& a = idx_[k];
    if (val) val[k] = bern_value(a, b);
    if (grad) {
      Vec2d g{0.0, 0.0};
      for (int i = 0; i < 3; ++i) {
        MultiIndex ai = a;
        --ai[i];
        const double d = n_ * bern_value(ai, b);
        g[0] += d * dlam[i][0];
        g[1] += d * dlam[i][1];
      }
      grad[k] = g;
    }
    if (hess) {
      Mat2d h{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          MultiIndex aij = a;
          --aij[i];
          --aij[j];
          const double d = n_ * (n_ - 1) * bern_value(aij, b);
          if (d == 0.0) continue;
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) h[p][q] += d * dlam[i][p] * dlam[j][q];
        }
      hess[k] = h;
    }
  }
}

BasisValues eval_basis(const BernsteinBasis& basis, const Bary& point) {
  BasisValues out;
  out.val.resize(basis.size());
  out.grad.resize(basis.size());
  out.hess.resize(basis.size());
  basis.eval(point, reference_dlambda(), out.val.data(), out.grad.data(), out.hess.data());
  return out;
}

std::vector<double> bernstein_product(int m, const std::vector<double>& a, int n, const std::vector<double>& b) {
  const BernsteinBasis bm(m), bn(n), bmn(m + n);
  std::vector<double> c(bmn.size(), 0.0);
  for (int i = 0; i < bm.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j < bn.size(); ++j) {
      if (b[j] == 0.0) continue;
      const MultiIndex& al = bm.index(i);
      const MultiIndex& be = bn.index(j);
      const MultiIndex s{al[0] + be[0], al[1] + be[1], al[2] + be[2]};
      c[bmn.index_of(s)] += a[i] * b[j] * multinomial(al) * multinomial(be) / multinomial(s);
    }
  }
  return c;
}

std::vector<double> bernstein_elevate(int n, const std::vector<double>& a, int to_degree) {
  if (to_degree < n) throw std::invalid_argument("bernstein_elevate: target degree below source");
  if (to_degree == n) return a;
  const int k = to_degree - n;
  return bernstein_product(n, a, k, std::vector<double>(BernsteinBasis(k).size(), 1.0));
}

std::vector<double> bernstein_monomial(const MultiIndex& g) {
  const BernsteinBasis b(g[0] + g[1] + g[2]);
  std::vector<double> c(b.size(), 0.0);
  c[b.index_of(g)] = 1.0 / multinomial(g);
  return c;
}

}  // namespace regge
