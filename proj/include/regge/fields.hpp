#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "regge/jet.hpp"
#include "regge/mesh.hpp"

namespace regge {

// Fields are evaluated triangle by triangle, so piecewise data may jump across edges.
class TensorField {
 public:
  virtual ~TensorField() = default;
  virtual TensorJet tensor_jet(int t, const Bary& b) const = 0;
};

class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual ScalarJet scalar_jet(int t, const Bary& b) const = 0;
};

// Also used for vector fields (components u^i, jac[i][j] = d_i u^j).
class OneFormField {
 public:
  virtual ~OneFormField() = default;
  virtual OneFormJet oneform_jet(int t, const Bary& b) const = 0;
};

using ScalarFn = std::function<Jet2(const Jet2& x, const Jet2& y)>;
using VectorFn = std::function<std::array<Jet2, 2>(const Jet2& x, const Jet2& y)>;
using TensorFn = std::function<SymJet2(const Jet2& x, const Jet2& y)>;

class ClosedFormScalar : public ScalarField {
 public:
  ClosedFormScalar(std::shared_ptr<const Mesh> mesh, ScalarFn f) : mesh_(std::move(mesh)), f_(std::move(f)) {}
  ScalarJet scalar_jet(int t, const Bary& b) const override;
  Jet2 at(const Vec2d& x) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  ScalarFn f_;
};

// Closed-form one-form or vector field; second derivatives are dropped.
class ClosedFormOneForm : public OneFormField {
 public:
  ClosedFormOneForm(std::shared_ptr<const Mesh> mesh, VectorFn f) : mesh_(std::move(mesh)), f_(std::move(f)) {}
  OneFormJet oneform_jet(int t, const Bary& b) const override;
  std::array<Jet2, 2> at(const Vec2d& x) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  VectorFn f_;
};

class ClosedFormTensor : public TensorField {
 public:
  ClosedFormTensor(std::shared_ptr<const Mesh> mesh, TensorFn f) : mesh_(std::move(mesh)), f_(std::move(f)) {}
  TensorJet tensor_jet(int t, const Bary& b) const override;
  TensorJet at(const Vec2d& x) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  TensorFn f_;
};

class ConstantTensor : public TensorField {
 public:
  explicit ConstantTensor(const Mat2d& value) : value_(value) {}
  TensorJet tensor_jet(int, const Bary&) const override;

 private:
  Mat2d value_;
};

// One constant symmetric tensor per triangle.
class PiecewiseConstantTensor : public TensorField {
 public:
  explicit PiecewiseConstantTensor(std::vector<Mat2d> values) : values_(std::move(values)) {}
  TensorJet tensor_jet(int t, const Bary&) const override;
  const Mat2d& value(int t) const { return values_[t]; }

 private:
  std::vector<Mat2d> values_;
};

// constant + sum_i c_i field_i; the referenced fields must outlive this object.
class LinearTensor : public TensorField {
 public:
  LinearTensor(Mat2d constant, std::vector<std::pair<double, const TensorField*>> terms)
      : constant_(constant), terms_(std::move(terms)) {}
  TensorJet tensor_jet(int t, const Bary& b) const override;

 private:
  Mat2d constant_;
  std::vector<std::pair<double, const TensorField*>> terms_;
};

// Metric (1 - t) delta + t g on the straight path from the Euclidean metric.
LinearTensor euclidean_path(const TensorField& g, double t);
// g - delta.
LinearTensor minus_euclidean(const TensorField& g);

// Symmetric gradient 1/2 L_u g of a closed-form vector field u under a closed-form metric g.
// Values and first derivatives only; second derivatives are set to NaN.
class ClosedFormDeformation : public TensorField {
 public:
  ClosedFormDeformation(std::shared_ptr<const Mesh> mesh, VectorFn u, TensorFn g)
      : mesh_(std::move(mesh)), u_(std::move(u)), g_(std::move(g)) {}
  TensorJet tensor_jet(int t, const Bary& b) const override;

 private:
  std::shared_ptr<const Mesh> mesh_;
  VectorFn u_;
  TensorFn g_;
};

// 1/2 (L_u g)_ij = 1/2 (u^k d_k g_ij + g_kj d_i u^k + g_ik d_j u^k) with first derivatives.
// du[i][k] = d_i u^k, ddu[k][m][i] = d_m d_i u^k. Second derivatives of the result are NaN.
TensorJet half_lie_derivative(const Vec2d& u, const Mat2d& du, const std::array<Mat2d, 2>& ddu,
                              const TensorJet& g);

// Exterior derivative dv of a scalar field; the referenced field must outlive this object.
class GradientOneForm : public OneFormField {
 public:
  explicit GradientOneForm(const ScalarField& v) : v_(v) {}
  OneFormJet oneform_jet(int t, const Bary& b) const override {
    const ScalarJet j = v_.scalar_jet(t, b);
    return {j.grad, j.hess};
  }

 private:
  const ScalarField& v_;
};

TensorJet add(const TensorJet& a, const TensorJet& b, double scale_b = 1.0);
TensorJet scale(const TensorJet& a, double s);

}  // namespace regge
