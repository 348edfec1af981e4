#include "regge/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace regge {

namespace {

double rel_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  return nb == 0.0 ? (a * x).norm() : (b - a * x).norm() / nb;
}

}  // namespace

SparseSpd::SparseSpd(SparseMatrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols()) throw SolverError("matrix is not square");
  if (a_.rows() == 0) return;
  llt_.compute(a_);
  if (llt_.info() != Eigen::Success) throw SolverError("Cholesky factorization failed: matrix not positive definite");
}

Eigen::VectorXd SparseSpd::solve(const Eigen::VectorXd& b, SolveInfo* info) const {
  if (b.size() != a_.rows()) throw SolverError("right-hand side size mismatch");
  if (a_.rows() == 0) return Eigen::VectorXd();
  Eigen::VectorXd x = llt_.solve(b);
  double res = rel_residual(a_, x, b);
  int steps = 0;
  constexpr int kMaxRefine = 8;
  while (res > kSolveTolerance && steps < kMaxRefine) {
    x += llt_.solve(b - a_ * x);
    res = rel_residual(a_, x, b);
    ++steps;
  }
  if (info) *info = {res, steps};
  if (!(res <= kSolveTolerance))
    throw SolverError("Cholesky solve stalled at relative residual " + std::to_string(res) + " after " +
                      std::to_string(steps) + " refinement steps");
  return x;
}

Eigen::VectorXd spd_solve(const SparseMatrix& a, const Eigen::VectorXd& b, SolveInfo* info) {
  return SparseSpd(a).solve(b, info);
}

Eigen::VectorXd pcg_solve(const SparseMatrix& a, const Eigen::VectorXd& b, double tol, int max_iter,
                          SolveInfo* info) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd dinv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    if (!(d > 0.0)) throw SolverError("Jacobi preconditioner needs a positive diagonal");
    dinv[i] = 1.0 / d;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double nb = b.norm();
  if (nb == 0.0) {
    if (info) *info = {0.0, 0};
    return x;
  }
  Eigen::VectorXd r = b, z = dinv.cwiseProduct(r), p = z;
  double rz = r.dot(z);
  int it = 0;
  for (; it < max_iter && r.norm() > tol * nb; ++it) {
    const Eigen::VectorXd ap = a * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) throw SolverError("CG breakdown at iteration " + std::to_string(it));
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    z = dinv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  const double res = rel_residual(a, x, b);
  if (info) *info = {res, it};
  if (res > tol)
    throw SolverError("CG did not converge: relative residual " + std::to_string(res) + " after " +
                      std::to_string(it) + " iterations");
  return x;
}

double asymmetry(const SparseMatrix& a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
  const SparseMatrix d = a - SparseMatrix(a.transpose());
  double worst = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return m == 0.0 ? 0.0 : worst / m;
}

int dense_rank(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(rel_tol);
  return static_cast<int>(qr.rank());
}

SparseMatrix norm_gram(const FeSpace& space, int quad_degree) {
  const bool scalar = space.kind() == SpaceKind::Lagrange;
  if (!scalar && space.kind() != SpaceKind::Edge) throw std::invalid_argument("norm Gram needs a Lagrange or edge space");
  const Mesh& m = space.mesh();
  const TriQuadRule tr = tri_rule(quad_degree);
  const int n = space.num_local();
  std::vector<Eigen::Triplet<double>> trips;
  LocalTab tab;
  Eigen::MatrixXd local(n, n);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double area = m.area(t);
    const double h2 = m.diameter(t) * m.diameter(t);
    local.setZero();
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      space.tabulate(t, tr.points[q], 1, tab);
      const double w = tr.weights[q] * area;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b <= a; ++b) {
          double s = 0.0;
          if (scalar) {
            const Vec2d& ga = tab.grad[a];
            const Vec2d& gb = tab.grad[b];
            const Mat2d& ha = tab.hess[a];
            const Mat2d& hb = tab.hess[b];
            s = ga[0] * gb[0] + ga[1] * gb[1];
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 2; ++j) s += h2 * ha[i][j] * hb[i][j];
          } else {
            for (int c = 0; c < 2; ++c) {
              const Vec2d& ga = tab.grad[a * 2 + c];
              const Vec2d& gb = tab.grad[b * 2 + c];
              s += tab.val[a * 2 + c] * tab.val[b * 2 + c] + h2 * (ga[0] * gb[0] + ga[1] * gb[1]);
            }
          }
          local(a, b) += w * s;
        }
    }
    const int* l = space.local_dofs(t);
    for (int a = 0; a < n; ++a) {
      const int ra = space.free_index(l[a]);
      if (ra < 0) continue;
      for (int b = 0; b < n; ++b) {
        const int rb = space.free_index(l[b]);
        if (rb < 0) continue;
        trips.emplace_back(ra, rb, a >= b ? local(a, b) : local(b, a));
      }
    }
  }
  SparseMatrix k(space.num_free(), space.num_free());
  k.setFromTriplets(trips.begin(), trips.end());
  return k;
}

DualNormContext::DualNormContext(std::shared_ptr<const FeSpace> space, int quad_degree)
    : space_(std::move(space)),
      gram_(norm_gram(*space_, quad_degree > 0 ? quad_degree : 2 * space_->degree())) {}

double DualNormContext::norm(const Eigen::VectorXd& load) const {
  if (load.size() != space_->ndofs()) throw std::invalid_argument("load length does not match the dual-norm space");
  const Eigen::VectorXd f = space_->restrict_free(load);
  const double q = f.dot(gram_.solve(f));
  return std::sqrt(std::max(q, 0.0));
}

double dual_norm(const Functional& f, const DualNormContext& ctx) {
  if (f.space.get() != &ctx.space() &&
      (f.space->kind() != ctx.space().kind() || f.space->degree() != ctx.space().degree() ||
       &f.space->mesh() != &ctx.space().mesh()))
    throw std::invalid_argument("functional is not assembled over the dual-norm space");
  return ctx.norm(f.load);
}

}  // namespace regge
