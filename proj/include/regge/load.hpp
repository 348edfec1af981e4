#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "regge/fespace.hpp"
#include "regge/fields.hpp"

namespace regge {

// A functional given as a list of point evaluations of a test function and its derivatives.
// Each term carries a triangle, a barycentric point, an entity tag and K coefficients.
template <int K>
class PointLoad {
 public:
  static constexpr int kWidth = K;

  void add(int t, const Bary& b, int entity, const std::array<double, K>& c) {
    tri_.push_back(t);
    pts_.push_back(b);
    ent_.push_back(entity);
    coef_.insert(coef_.end(), c.begin(), c.end());
  }
  void append(const PointLoad& o) {
    tri_.insert(tri_.end(), o.tri_.begin(), o.tri_.end());
    pts_.insert(pts_.end(), o.pts_.begin(), o.pts_.end());
    ent_.insert(ent_.end(), o.ent_.begin(), o.ent_.end());
    coef_.insert(coef_.end(), o.coef_.begin(), o.coef_.end());
  }

  std::size_t size() const { return tri_.size(); }
  int triangle(std::size_t i) const { return tri_[i]; }
  const Bary& point(std::size_t i) const { return pts_[i]; }
  int entity(std::size_t i) const { return ent_[i]; }
  const double* coef(std::size_t i) const { return &coef_[i * K]; }
  std::vector<double>& coefficients() { return coef_; }
  const std::vector<double>& coefficients() const { return coef_; }

  bool same_layout(const PointLoad& o) const { return tri_ == o.tri_ && pts_ == o.pts_; }
  void axpy(double a, const PointLoad& o) {
    if (!same_layout(o)) throw std::logic_error("loads with different point layouts cannot be combined");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += a * o.coef_[i];
  }
  void scale(double a) {
    for (double& c : coef_) c *= a;
  }

 private:
  std::vector<int> tri_;
  std::vector<Bary> pts_;
  std::vector<int> ent_;
  std::vector<double> coef_;
};

// Coefficients (c, g0, g1, h00, h01, h10, h11) of c v + g . grad v + h : Hess v.
using ScalarLoad = PointLoad<7>;
// Coefficients (a0, a1, j00, j01, j10, j11) of a . alpha + sum_ij j_ij d_i alpha_j.
using OneFormLoad = PointLoad<6>;

inline std::array<double, 7> scalar_coef(double c, const Vec2d& g = {0.0, 0.0}, const Mat2d& h = {}) {
  return {c, g[0], g[1], h[0][0], h[0][1], h[1][0], h[1][1]};
}
inline std::array<double, 6> oneform_coef(const Vec2d& a, const Mat2d& j = {}) {
  return {a[0], a[1], j[0][0], j[0][1], j[1][0], j[1][1]};
}

double apply(const ScalarLoad& load, const ScalarField& v);
double apply(const OneFormLoad& load, const OneFormField& alpha);
// Sum of the absolute values of the individual coefficient-times-jet products; a size for relative checks.
double apply_magnitude(const ScalarLoad& load, const ScalarField& v);
// Contributions grouped by entity tag.
std::vector<double> apply_by_entity(const ScalarLoad& load, const ScalarField& v, int num_entities);

// Load vector over a Lagrange or edge space; constrained entries are zero.
Eigen::VectorXd assemble(const ScalarLoad& load, const FeSpace& v);
Eigen::VectorXd assemble(const OneFormLoad& load, const FeSpace& w);

}  // namespace regge
