#include "regge/fields.hpp"

#include <limits>

namespace regge {

namespace {

std::array<Jet2, 2> coordinates(const Vec2d& x) { return {Jet2::coordinate(x[0], 0), Jet2::coordinate(x[1], 1)}; }

}  // namespace

Jet2 ClosedFormScalar::at(const Vec2d& x) const {
  const auto c = coordinates(x);
  return f_(c[0], c[1]);
}

ScalarJet ClosedFormScalar::scalar_jet(int t, const Bary& b) const {
  return to_scalar_jet(at(mesh_->point(t, b)));
}

std::array<Jet2, 2> ClosedFormOneForm::at(const Vec2d& x) const {
  const auto c = coordinates(x);
  return f_(c[0], c[1]);
}

OneFormJet ClosedFormOneForm::oneform_jet(int t, const Bary& b) const {
  const auto u = at(mesh_->point(t, b));
  OneFormJet j;
  for (int c = 0; c < 2; ++c) {
    j.val[c] = u[c].v;
    for (int i = 0; i < 2; ++i) j.jac[i][c] = u[c].g[i];
  }
  return j;
}

TensorJet ClosedFormTensor::at(const Vec2d& x) const {
  const auto c = coordinates(x);
  return to_tensor_jet(f_(c[0], c[1]));
}

TensorJet ClosedFormTensor::tensor_jet(int t, const Bary& b) const { return at(mesh_->point(t, b)); }

TensorJet ConstantTensor::tensor_jet(int, const Bary&) const {
  TensorJet j;
  j.val = value_;
  return j;
}

TensorJet PiecewiseConstantTensor::tensor_jet(int t, const Bary&) const {
  TensorJet j;
  j.val = values_[t];
  return j;
}

TensorJet add(const TensorJet& a, const TensorJet& b, double scale_b) {
  TensorJet r = a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      r.val[i][j] += scale_b * b.val[i][j];
      for (int k = 0; k < 2; ++k) {
        r.d[k][i][j] += scale_b * b.d[k][i][j];
        for (int l = 0; l < 2; ++l) r.dd[k][l][i][j] += scale_b * b.dd[k][l][i][j];
      }
    }
  return r;
}

TensorJet scale(const TensorJet& a, double s) { return add(TensorJet{}, a, s); }

TensorJet LinearTensor::tensor_jet(int t, const Bary& b) const {
  TensorJet r;
  r.val = constant_;
  for (const auto& [c, f] : terms_) r = add(r, f->tensor_jet(t, b), c);
  return r;
}

LinearTensor euclidean_path(const TensorField& g, double t) {
  const Mat2d id = identity2();
  Mat2d c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = (1.0 - t) * id[i][j];
  return LinearTensor(c, {{t, &g}});
}

LinearTensor minus_euclidean(const TensorField& g) {
  return LinearTensor({{{-1.0, 0.0}, {0.0, -1.0}}}, {{1.0, &g}});
}

TensorJet half_lie_derivative(const Vec2d& u, const Mat2d& du, const std::array<Mat2d, 2>& ddu,
                              const TensorJet& g) {
  TensorJet r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double v = 0.0;
      for (int k = 0; k < 2; ++k) v += u[k] * g.d[k][i][j] + g.val[k][j] * du[i][k] + g.val[i][k] * du[j][k];
      r.val[i][j] = 0.5 * v;
      for (int m = 0; m < 2; ++m) {
        double dv = 0.0;
        for (int k = 0; k < 2; ++k)
          dv += du[m][k] * g.d[k][i][j] + u[k] * g.dd[m][k][i][j] + g.d[m][k][j] * du[i][k] +
                g.val[k][j] * ddu[k][m][i] + g.d[m][i][k] * du[j][k] + g.val[i][k] * ddu[k][m][j];
        r.d[m][i][j] = 0.5 * dv;
        for (int l = 0; l < 2; ++l) r.dd[m][l][i][j] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  return r;
}

TensorJet ClosedFormDeformation::tensor_jet(int t, const Bary& b) const {
  const auto c = coordinates(mesh_->point(t, b));
  const auto u = u_(c[0], c[1]);
  Vec2d uv;
  Mat2d du;
  std::array<Mat2d, 2> ddu;
  for (int k = 0; k < 2; ++k) {
    uv[k] = u[k].v;
    for (int i = 0; i < 2; ++i) du[i][k] = u[k].g[i];
    ddu[k] = u[k].h;
  }
  return half_lie_derivative(uv, du, ddu, to_tensor_jet(g_(c[0], c[1])));
}

}  // namespace regge
