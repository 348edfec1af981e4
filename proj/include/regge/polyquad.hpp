#pragma once

#include <array>
#include <vector>

#include "regge/jet.hpp"

namespace regge {

using Bary = std::array<double, 3>;

// Gauss-Legendre points and weights on [0,1], weights summing to 1.
struct EdgeQuadRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

// Points in barycentric coordinates; weights sum to 1 (area-normalized).
struct TriQuadRule {
  std::vector<Bary> points;
  std::vector<double> weights;
  int degree = 0;
};

inline constexpr int kMaxQuadDegree = 60;

EdgeQuadRule gauss_legendre(int npoints);
EdgeQuadRule edge_rule(int degree);
TriQuadRule tri_rule(int degree);

// Shifted Legendre polynomial P_j(2s - 1) on [0,1].
double shifted_legendre(int j, double s);

using MultiIndex = std::array<int, 3>;

// Bernstein basis B^n_a = n!/a! lambda^a on a triangle.
class BernsteinBasis {
 public:
  explicit BernsteinBasis(int degree);

  int degree() const { return n_; }
  int size() const { return static_cast<int>(idx_.size()); }
  const std::vector<MultiIndex>& indices() const { return idx_; }
  const MultiIndex& index(int k) const { return idx_[k]; }
  int index_of(const MultiIndex& a) const;

  void eval(const Bary& b, double* val) const;
  // Physical derivatives from the constant gradients of the barycentric coordinates.
  void eval(const Bary& b, const std::array<Vec2d, 3>& dlam, double* val, Vec2d* grad, Mat2d* hess) const;

 private:
  int n_;
  std::vector<MultiIndex> idx_;
  std::vector<int> lookup_;
};

struct BasisValues {
  std::vector<double> val;
  std::vector<Vec2d> grad;
  std::vector<Mat2d> hess;
};

// Values and derivatives in reference coordinates (xi, eta) with lambda = (1-xi-eta, xi, eta).
BasisValues eval_basis(const BernsteinBasis& basis, const Bary& point);

inline const std::array<Vec2d, 3>& reference_dlambda() {
  static const std::array<Vec2d, 3> d{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};
  return d;
}

// Multinomial n!/a!.
double multinomial(const MultiIndex& a);

// Bernstein coefficient algebra on a single triangle.
std::vector<double> bernstein_product(int m, const std::vector<double>& a, int n, const std::vector<double>& b);
std::vector<double> bernstein_elevate(int n, const std::vector<double>& a, int to_degree);
// Coefficients of the monomial lambda^g in degree |g| Bernstein form.
std::vector<double> bernstein_monomial(const MultiIndex& g);

}  // namespace regge
