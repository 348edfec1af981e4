#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "regge/fields.hpp"
#include "regge/mesh.hpp"
#include "regge/polyquad.hpp"

namespace regge {

// Lagrange: continuous P_p scalars. Edge: first-kind edge elements P^-_k one-forms.
// TwoForm: discontinuous P_r densities f of f dx^dy. LagrangeVector: continuous P_p vector fields.
// Regge: tangential-tangential continuous P_r symmetric tensors, components (xx, xy, yy).
enum class SpaceKind { Lagrange, Edge, TwoForm, LagrangeVector, Regge };

const char* kind_name(SpaceKind kind);

using SparseMatrix = Eigen::SparseMatrix<double>;
// Writes the field components at barycentric point b of triangle t into out[0..ncomp).
using ComponentFn = std::function<void(int t, const Bary& b, double* out)>;

// Local basis tabulation at one point; entry [k * ncomp + c] is component c of basis k.
struct LocalTab {
  int nloc = 0;
  int ncomp = 0;
  std::vector<double> val;
  std::vector<Vec2d> grad;
  std::vector<Mat2d> hess;
};

// Point samples and weights realizing the degree-of-freedom functionals of one triangle:
// functional i = sum_p sum_c weights(i, p * ncomp + c) * f_c(points[p]).
struct FunctionalSampling {
  std::vector<Bary> points;
  Eigen::MatrixXd weights;
};

class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int degree);

  SpaceKind kind() const { return kind_; }
  int degree() const { return degree_; }
  int ncomp() const { return ncomp_; }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const BernsteinBasis& bernstein() const { return bern_; }

  int ndofs() const { return ndofs_; }
  int num_local() const { return nloc_; }
  const int* local_dofs(int t) const { return &l2g_[static_cast<std::size_t>(t) * nloc_]; }

  // Constrained degrees of freedom enforce a vanishing trace on the boundary.
  bool constrained(int dof) const { return free_index_[dof] < 0; }
  int num_free() const { return static_cast<int>(free_dofs_.size()); }
  const std::vector<int>& free_dofs() const { return free_dofs_; }
  int free_index(int dof) const { return free_index_[dof]; }

  // Local basis as Bernstein coefficients, rows c * nb + m. Identity layouts for Lagrange kinds.
  Eigen::MatrixXd local_basis(int t) const;
  void tabulate(int t, const Bary& b, int nderiv, LocalTab& tab) const;
  // Bernstein coefficients (ncomp consecutive blocks) of the field with global coefficients u on t.
  void poly_coefficients(int t, const Eigen::VectorXd& u, double* out) const;

  // Degree-of-freedom functionals; the Regge functionals use the metric gbar when given.
  FunctionalSampling functional_sampling(int t, int quad_degree, const Mat2d* gbar = nullptr) const;
  // Global coefficients of the canonical interpolant of f.
  Eigen::VectorXd interpolate(const ComponentFn& f, int quad_degree,
                              const std::vector<Mat2d>* gbar = nullptr) const;

  // Full-to-free restriction of a vector.
  Eigen::VectorXd restrict_free(const Eigen::VectorXd& full) const;
  Eigen::VectorXd extend_free(const Eigen::VectorXd& free) const;

 private:
  void build_lagrange_dofs();
  void build_edge_dofs();
  void build_local_bases();
  Eigen::MatrixXd primal_basis(int t) const;
  Eigen::MatrixXd sample_matrix(const std::vector<Bary>& points) const;

  std::shared_ptr<const Mesh> mesh_;
  SpaceKind kind_;
  int degree_;
  int ncomp_;
  BernsteinBasis bern_;
  int nloc_ = 0;
  int ndofs_ = 0;
  std::vector<int> l2g_;
  std::vector<int> free_index_;
  std::vector<int> free_dofs_;
  std::vector<Eigen::MatrixXd> basis_;  // Edge and Regge only
};

// Finite element function: space plus global coefficient vector.
class FeField {
 public:
  FeField(std::shared_ptr<const FeSpace> space, Eigen::VectorXd coeffs);
  virtual ~FeField() = default;

  const FeSpace& space() const { return *space_; }
  const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }

  // Component values and optional derivatives at a point.
  void eval(int t, const Bary& b, double* val, Vec2d* grad = nullptr, Mat2d* hess = nullptr) const;

 private:
  std::shared_ptr<const FeSpace> space_;
  Eigen::VectorXd coeffs_;
  std::vector<double> poly_;  // per triangle Bernstein coefficients
};

class FeFunction : public FeField, public ScalarField {
 public:
  using FeField::FeField;
  ScalarJet scalar_jet(int t, const Bary& b) const override;
};

class FeOneForm : public FeField, public OneFormField {
 public:
  using FeField::FeField;
  OneFormJet oneform_jet(int t, const Bary& b) const override;
};

class FeVectorField : public FeOneForm {
 public:
  using FeOneForm::FeOneForm;
};

class FeTwoForm : public FeField {
 public:
  using FeField::FeField;
  double density(int t, const Bary& b) const;
};

// Exterior derivative matrices of the complex V_p -> W_p -> X_{p-1} on full DOF sets.
SparseMatrix d0_matrix(const FeSpace& v, const FeSpace& w);
SparseMatrix d1_matrix(const FeSpace& w, const FeSpace& x);

// Metric-weighted L2 mass matrix on the full DOF set.
SparseMatrix mass_matrix(const FeSpace& space, const TensorField& metric, int quad_degree);
// Rows and columns restricted to the free DOFs of the given spaces.
SparseMatrix restrict_free(const SparseMatrix& a, const FeSpace& rows, const FeSpace& cols);

// Dual-space element as a load vector over a test space; constrained entries are zero.
struct Functional {
  std::shared_ptr<const FeSpace> space;
  Eigen::VectorXd load;
};

// Solves <u_h, v>_{metric} = F(v) for all free discrete v.
Eigen::VectorXd project_functional(const Functional& f, const TensorField& metric, int quad_degree);

// Canonical interpolants of closed-form fields.
Eigen::VectorXd interpolate_scalar(const FeSpace& v, const ScalarField& f, int quad_degree);
Eigen::VectorXd interpolate_oneform(const FeSpace& w, const OneFormField& f, int quad_degree);
Eigen::VectorXd interpolate_vector(const FeSpace& u, const OneFormField& f, int quad_degree);
Eigen::VectorXd interpolate_density(const FeSpace& x, const ScalarField& f, int quad_degree);

// 1/2 L_u g for a finite element vector field u; values and first derivatives.
class DeformationField : public TensorField {
 public:
  DeformationField(const FeVectorField& u, const TensorField& g) : u_(u), g_(g) {}
  TensorJet tensor_jet(int t, const Bary& b) const override;

 private:
  const FeVectorField& u_;
  const TensorField& g_;
};

// Coordinate-format export "i j value" per line, zero-based.
void write_coordinate_format(const SparseMatrix& a, const std::string& path);

}  // namespace regge
