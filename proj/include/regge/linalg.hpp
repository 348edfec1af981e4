#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "regge/fespace.hpp"

namespace regge {

using SparseMatrix = Eigen::SparseMatrix<double>;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveInfo {
  double relative_residual = 0.0;
  int iterations = 0;  // refinement steps or CG iterations
};

inline constexpr double kSolveTolerance = 1e-12;

// Sparse Cholesky factorization with iterative refinement to kSolveTolerance.
class SparseSpd {
 public:
  explicit SparseSpd(SparseMatrix a);
  const SparseMatrix& matrix() const { return a_; }
  int size() const { return static_cast<int>(a_.rows()); }
  Eigen::VectorXd solve(const Eigen::VectorXd& b, SolveInfo* info = nullptr) const;

 private:
  SparseMatrix a_;
  Eigen::SimplicialLLT<SparseMatrix> llt_;
};

Eigen::VectorXd spd_solve(const SparseMatrix& a, const Eigen::VectorXd& b, SolveInfo* info = nullptr);

// Jacobi-preconditioned conjugate gradients.
Eigen::VectorXd pcg_solve(const SparseMatrix& a, const Eigen::VectorXd& b, double tol = kSolveTolerance,
                          int max_iter = 10000, SolveInfo* info = nullptr);

// Largest relative asymmetry max|a_ij - a_ji| / max|a_ij|.
double asymmetry(const SparseMatrix& a);

// Numerical rank from a column-pivoted QR with relative threshold.
int dense_rank(const Eigen::MatrixXd& a, double rel_tol = 1e-10);

// Gram matrix on the free DOFs of the mesh-weighted norm
// |v|_{H1}^2 + sum_T h_T^2 |v|_{H2(T)}^2 (Lagrange) or |a|_{L2}^2 + sum_T h_T^2 |a|_{H1(T)}^2 (edge).
SparseMatrix norm_gram(const FeSpace& space, int quad_degree);

// Discrete dual norm sqrt(F^T K^{-1} F) over the free DOFs of a test space with Gram matrix K.
class DualNormContext {
 public:
  explicit DualNormContext(std::shared_ptr<const FeSpace> space, int quad_degree = -1);
  const FeSpace& space() const { return *space_; }
  const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }
  const SparseMatrix& gram() const { return gram_.matrix(); }
  // F is a full-length load vector over space(); constrained entries are ignored.
  double norm(const Eigen::VectorXd& load) const;

 private:
  std::shared_ptr<const FeSpace> space_;
  SparseSpd gram_;
};

double dual_norm(const Functional& f, const DualNormContext& ctx);

}  // namespace regge
