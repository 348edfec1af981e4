#include "regge/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "regge/geom.hpp"
#include "regge/linalg.hpp"

namespace regge {

namespace {

constexpr int kMaxSpaceDegree = 12;
constexpr int kMaxBasis = 128;

int bern_size(int n) { return n < 0 ? 0 : (n + 1) * (n + 2) / 2; }

int components(SpaceKind k) {
  switch (k) {
    case SpaceKind::Lagrange:
    case SpaceKind::TwoForm:
      return 1;
    case SpaceKind::Edge:
    case SpaceKind::LagrangeVector:
      return 2;
    case SpaceKind::Regge:
      return 3;
  }
  return 0;
}

int min_degree(SpaceKind k) {
  return (k == SpaceKind::TwoForm || k == SpaceKind::Regge) ? 0 : 1;
}

// Global parameter s of the edge mapped to the counterclockwise parameter of local edge i.
Bary edge_sample(int sign, int i, double s) { return Mesh::edge_point(i, sign > 0 ? s : 1.0 - s); }

// Symmetric tensor components (xx, xy, yy) as matrices.
Mat2d unit_tensor(int c) {
  Mat2d e{};
  if (c == 0) e[0][0] = 1.0;
  if (c == 1) e[0][1] = e[1][0] = 1.0;
  if (c == 2) e[1][1] = 1.0;
  return e;
}

// Pointwise pairing matrix Q with <a, b> = sum_cd a_c Q_cd b_d for the kind's components.
Eigen::Matrix3d pairing(SpaceKind kind, const Mat2d& g) {
  Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
  const double sq = std::sqrt(det2(g));
  const Mat2d gi = inverse2(g);
  switch (kind) {
    case SpaceKind::Lagrange:
      q(0, 0) = sq;
      break;
    case SpaceKind::TwoForm:
      q(0, 0) = 1.0 / sq;
      break;
    case SpaceKind::LagrangeVector:
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) q(a, b) = g[a][b] * sq;
      break;
    case SpaceKind::Edge:
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) q(a, b) = gi[a][b] * sq;
      break;
    case SpaceKind::Regge:
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) q(c, d) = pair_g(gi, unit_tensor(c), unit_tensor(d)) * sq;
      break;
  }
  return q;
}

Eigen::MatrixXd solve_dense(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < a.rows()) throw std::logic_error(std::string("singular local system in ") + what);
  return lu.solve(b);
}

}  // namespace

const char* kind_name(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Lagrange:
      return "lagrange";
    case SpaceKind::Edge:
      return "edge";
    case SpaceKind::TwoForm:
      return "twoform";
    case SpaceKind::LagrangeVector:
      return "lagrange-vector";
    case SpaceKind::Regge:
      return "regge";
  }
  return "?";
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int degree)
    : mesh_(std::move(mesh)),
      kind_(kind),
      degree_(degree),
      ncomp_(components(kind)),
      bern_(std::clamp(degree, 0, kMaxSpaceDegree)) {
  if (!mesh_) throw std::invalid_argument("FeSpace needs a mesh");
  if (degree < min_degree(kind) || degree > kMaxSpaceDegree)
    throw std::invalid_argument(std::string("unsupported degree ") + std::to_string(degree) + " for " +
                                kind_name(kind) + " space");
  if (kind == SpaceKind::Lagrange || kind == SpaceKind::LagrangeVector || kind == SpaceKind::TwoForm)
    build_lagrange_dofs();
  else
    build_edge_dofs();
  free_dofs_.clear();
  for (int d = 0; d < ndofs_; ++d)
    if (free_index_[d] >= 0) {
      free_index_[d] = static_cast<int>(free_dofs_.size());
      free_dofs_.push_back(d);
    }
  if (kind == SpaceKind::Edge || kind == SpaceKind::Regge) build_local_bases();
}

void FeSpace::build_lagrange_dofs() {
  const Mesh& m = *mesh_;
  const int p = degree_;
  const int nb = bern_.size();
  nloc_ = ncomp_ * nb;
  l2g_.assign(static_cast<std::size_t>(m.num_triangles()) * nloc_, -1);
  if (kind_ == SpaceKind::TwoForm) {
    ndofs_ = m.num_triangles() * nb;
    for (int t = 0; t < m.num_triangles(); ++t)
      for (int k = 0; k < nb; ++k) l2g_[static_cast<std::size_t>(t) * nloc_ + k] = t * nb + k;
    free_index_.assign(ndofs_, 0);
    return;
  }
  const int ne = p - 1;
  const int ni = bern_size(p - 3);
  const int nscalar = m.num_vertices() + m.num_edges() * ne + m.num_triangles() * ni;
  ndofs_ = ncomp_ * nscalar;
  std::vector<char> bdry(nscalar, 0);
  for (int v = 0; v < m.num_vertices(); ++v) bdry[v] = m.vertex_on_boundary(v);
  for (int e = 0; e < m.num_edges(); ++e)
    for (int k = 0; k < ne; ++k) bdry[m.num_vertices() + e * ne + k] = m.edge_on_boundary(e);
  for (int t = 0; t < m.num_triangles(); ++t) {
    int interior = 0;
    for (int k = 0; k < nb; ++k) {
      const MultiIndex& a = bern_.index(k);
      const int zeros = (a[0] == 0) + (a[1] == 0) + (a[2] == 0);
      int g = -1;
      if (zeros == 2) {
        const int i = a[0] == p ? 0 : (a[1] == p ? 1 : 2);
        g = m.triangle(t)[i];
      } else if (zeros == 1) {
        const int i = a[0] == 0 ? 0 : (a[1] == 0 ? 1 : 2);
        const int sign = m.tri_edge_sign(t, i);
        const int pos = sign > 0 ? a[(i + 2) % 3] : a[(i + 1) % 3];
        g = m.num_vertices() + m.tri_edge(t, i) * ne + (pos - 1);
      } else {
        g = m.num_vertices() + m.num_edges() * ne + t * ni + interior++;
      }
      for (int c = 0; c < ncomp_; ++c) l2g_[static_cast<std::size_t>(t) * nloc_ + c * nb + k] = c * nscalar + g;
    }
  }
  free_index_.assign(ndofs_, 0);
  for (int c = 0; c < ncomp_; ++c)
    for (int d = 0; d < nscalar; ++d)
      if (bdry[d]) free_index_[c * nscalar + d] = -1;
}

void FeSpace::build_edge_dofs() {
  const Mesh& m = *mesh_;
  // Edge: k moments per edge, 2 * dim P_{k-2} interior. Regge: r + 1 per edge, 3 * dim P_{r-1} interior.
  const int per_edge = kind_ == SpaceKind::Edge ? degree_ : degree_ + 1;
  const int per_tri = kind_ == SpaceKind::Edge ? 2 * bern_size(degree_ - 2) : 3 * bern_size(degree_ - 1);
  nloc_ = 3 * per_edge + per_tri;
  ndofs_ = m.num_edges() * per_edge + m.num_triangles() * per_tri;
  l2g_.assign(static_cast<std::size_t>(m.num_triangles()) * nloc_, -1);
  for (int t = 0; t < m.num_triangles(); ++t) {
    int* l = &l2g_[static_cast<std::size_t>(t) * nloc_];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < per_edge; ++j) l[i * per_edge + j] = m.tri_edge(t, i) * per_edge + j;
    for (int j = 0; j < per_tri; ++j) l[3 * per_edge + j] = m.num_edges() * per_edge + t * per_tri + j;
  }
  free_index_.assign(ndofs_, 0);
  if (kind_ == SpaceKind::Edge)
    for (int e = 0; e < m.num_edges(); ++e)
      if (m.edge_on_boundary(e))
        for (int j = 0; j < per_edge; ++j) free_index_[e * per_edge + j] = -1;
}

Eigen::MatrixXd FeSpace::primal_basis(int t) const {
  const int nb = bern_.size();
  if (kind_ == SpaceKind::Regge) return Eigen::MatrixXd::Identity(3 * nb, 3 * nb);
  // Edge elements: P_{k-1} one-forms plus the Koszul image x^perp * homogeneous P_{k-1}.
  const int k = degree_;
  const BernsteinBasis low(k - 1);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2 * nb, nloc_);
  int col = 0;
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < low.size(); ++b, ++col) {
      std::vector<double> unit(low.size(), 0.0);
      unit[b] = 1.0;
      const auto e = bernstein_elevate(k - 1, unit, k);
      for (int mm = 0; mm < nb; ++mm) p(c * nb + mm, col) = e[mm];
    }
  const Mesh& m = *mesh_;
  const Vec2d& p0 = m.vertex(m.triangle(t)[0]);
  const BernsteinBasis one(1);
  std::vector<double> xh(3, 0.0), yh(3, 0.0);
  for (int i = 1; i < 3; ++i) {
    const Vec2d& pi = m.vertex(m.triangle(t)[i]);
    MultiIndex a{0, 0, 0};
    a[i] = 1;
    xh[one.index_of(a)] = pi[0] - p0[0];
    yh[one.index_of(a)] = pi[1] - p0[1];
  }
  for (int a = 0; a <= k - 1; ++a, ++col) {
    const auto mono = bernstein_monomial({0, a, k - 1 - a});
    const auto fx = bernstein_product(1, yh, k - 1, mono);
    const auto fy = bernstein_product(1, xh, k - 1, mono);
    for (int mm = 0; mm < nb; ++mm) {
      p(mm, col) = -fx[mm];
      p(nb + mm, col) = fy[mm];
    }
  }
  return p;
}

Eigen::MatrixXd FeSpace::sample_matrix(const std::vector<Bary>& points) const {
  const int nb = bern_.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points.size()) * ncomp_, ncomp_ * nb);
  std::vector<double> v(nb);
  for (std::size_t q = 0; q < points.size(); ++q) {
    bern_.eval(points[q], v.data());
    for (int c = 0; c < ncomp_; ++c)
      for (int mm = 0; mm < nb; ++mm) a(static_cast<Eigen::Index>(q) * ncomp_ + c, c * nb + mm) = v[mm];
  }
  return a;
}

void FeSpace::build_local_bases() {
  const int exact = 2 * degree_ + 2;
  basis_.resize(mesh_->num_triangles());
  for (int t = 0; t < mesh_->num_triangles(); ++t) {
    const Eigen::MatrixXd p = primal_basis(t);
    const FunctionalSampling s = functional_sampling(t, exact);
    const Eigen::MatrixXd d = s.weights * sample_matrix(s.points) * p;
    basis_[t] = p * solve_dense(d, Eigen::MatrixXd::Identity(nloc_, nloc_), kind_name(kind_));
  }
}

Eigen::MatrixXd FeSpace::local_basis(int t) const {
  if (kind_ == SpaceKind::Edge || kind_ == SpaceKind::Regge) return basis_[t];
  return Eigen::MatrixXd::Identity(nloc_, nloc_);
}

FunctionalSampling FeSpace::functional_sampling(int t, int quad_degree, const Mat2d* gbar) const {
  const Mesh& m = *mesh_;
  const EdgeQuadRule er = edge_rule(quad_degree);
  const TriQuadRule tr = tri_rule(quad_degree);
  const int neq = static_cast<int>(er.points.size());
  const int ntq = static_cast<int>(tr.points.size());
  FunctionalSampling s;
  // layout: 3 edges x neq points, then ntq interior points, then the 3 vertices
  for (int i = 0; i < 3; ++i)
    for (int q = 0; q < neq; ++q) s.points.push_back(edge_sample(m.tri_edge_sign(t, i), i, er.points[q]));
  for (int q = 0; q < ntq; ++q) s.points.push_back(tr.points[q]);
  for (int i = 0; i < 3; ++i) {
    Bary v{0.0, 0.0, 0.0};
    v[i] = 1.0;
    s.points.push_back(v);
  }
  const int nc = ncomp_;
  s.weights = Eigen::MatrixXd::Zero(nloc_, static_cast<Eigen::Index>(s.points.size()) * nc);
  auto col = [&](int point, int c) { return point * nc + c; };
  auto edge_pt = [&](int i, int q) { return i * neq + q; };
  auto tri_pt = [&](int q) { return 3 * neq + q; };
  auto interior_moments = [&](int row, int deg, const Eigen::Vector3d& w3) {
    const BernsteinBasis b(deg);
    std::vector<double> v(b.size());
    for (int q = 0; q < ntq; ++q) {
      b.eval(tr.points[q], v.data());
      for (int beta = 0; beta < b.size(); ++beta)
        for (int cc = 0; cc < nc; ++cc) s.weights(row + beta, col(tri_pt(q), cc)) += tr.weights[q] * v[beta] * w3[cc];
    }
    return row + b.size();
  };
  int row = 0;
  switch (kind_) {
    case SpaceKind::Lagrange:
    case SpaceKind::LagrangeVector: {
      const int p = degree_;
      for (int c = 0; c < nc; ++c) {
        for (int i = 0; i < 3; ++i) s.weights(row++, col(3 * neq + ntq + i, c)) = 1.0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j <= p - 2; ++j, ++row)
            for (int q = 0; q < neq; ++q)
              s.weights(row, col(edge_pt(i, q), c)) = er.weights[q] * shifted_legendre(j, er.points[q]);
        if (p >= 3) {
          Eigen::Vector3d w3 = Eigen::Vector3d::Zero();
          w3[c] = 1.0;
          row = interior_moments(row, p - 3, w3);
        }
      }
      break;
    }
    case SpaceKind::TwoForm:
      row = interior_moments(row, degree_, Eigen::Vector3d(1.0, 0.0, 0.0));
      break;
    case SpaceKind::Edge: {
      const int k = degree_;
      for (int i = 0; i < 3; ++i) {
        const Vec2d ev = m.edge_vector(t, i);
        const int sign = m.tri_edge_sign(t, i);
        for (int j = 0; j < k; ++j, ++row)
          for (int q = 0; q < neq; ++q)
            for (int c = 0; c < 2; ++c)
              s.weights(row, col(edge_pt(i, q), c)) = er.weights[q] * shifted_legendre(j, er.points[q]) * sign * ev[c];
      }
      if (k >= 2)
        for (int c = 0; c < 2; ++c) {
          Eigen::Vector3d w3 = Eigen::Vector3d::Zero();
          w3[c] = 1.0;
          row = interior_moments(row, k - 2, w3);
        }
      break;
    }
    case SpaceKind::Regge: {
      const int r = degree_;
      for (int i = 0; i < 3; ++i) {
        const Vec2d ev = m.edge_vector(t, i);
        // sigma(tau, tau) ds in the metric gbar equals sigma(t, t) / |t|_gbar per unit parameter
        const double scale = gbar ? 1.0 / std::sqrt(bilinear(*gbar, ev, ev)) : 1.0;
        const double w[3] = {ev[0] * ev[0], 2.0 * ev[0] * ev[1], ev[1] * ev[1]};
        for (int j = 0; j <= r; ++j, ++row)
          for (int q = 0; q < neq; ++q)
            for (int c = 0; c < 3; ++c)
              s.weights(row, col(edge_pt(i, q), c)) = er.weights[q] * shifted_legendre(j, er.points[q]) * scale * w[c];
      }
      if (r >= 1)
        for (int c = 0; c < 3; ++c) {
          // <sigma, E_c B> in gbar: gbar^{ik} gbar^{jl} sigma_ij (E_c)_kl sqrt(det gbar)
          Mat2d mm = unit_tensor(c);
          double vol = 1.0;
          if (gbar) {
            const Mat2d gi = inverse2(*gbar);
            Mat2d tmp{};
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b)
                for (int k1 = 0; k1 < 2; ++k1)
                  for (int l1 = 0; l1 < 2; ++l1) tmp[a][b] += gi[a][k1] * mm[k1][l1] * gi[l1][b];
            mm = tmp;
            vol = std::sqrt(det2(*gbar));
          }
          const Eigen::Vector3d w3(mm[0][0] * vol, 2.0 * mm[0][1] * vol, mm[1][1] * vol);
          row = interior_moments(row, r - 1, w3);
        }
      break;
    }
  }
  if (row != nloc_) throw std::logic_error("functional count does not match the local dimension");
  return s;
}

void FeSpace::tabulate(int t, const Bary& b, int nderiv, LocalTab& tab) const {
  const int nb = bern_.size();
  double bv[kMaxBasis];
  Vec2d bg[kMaxBasis];
  Mat2d bh[kMaxBasis];
  if (nderiv > 0)
    bern_.eval(b, mesh_->dlambda(t), bv, bg, bh);
  else
    bern_.eval(b, bv);
  tab.nloc = nloc_;
  tab.ncomp = ncomp_;
  const std::size_t n = static_cast<std::size_t>(nloc_) * ncomp_;
  tab.val.assign(n, 0.0);
  if (nderiv > 0) {
    tab.grad.assign(n, Vec2d{0.0, 0.0});
    tab.hess.assign(n, Mat2d{});
  }
  if (kind_ == SpaceKind::Edge || kind_ == SpaceKind::Regge) {
    const Eigen::MatrixXd& c = basis_[t];
    for (int k = 0; k < nloc_; ++k)
      for (int comp = 0; comp < ncomp_; ++comp) {
        const std::size_t o = static_cast<std::size_t>(k) * ncomp_ + comp;
        double v = 0.0;
        Vec2d g{0.0, 0.0};
        Mat2d h{};
        for (int mm = 0; mm < nb; ++mm) {
          const double w = c(comp * nb + mm, k);
          if (w == 0.0) continue;
          v += w * bv[mm];
          if (nderiv > 0) {
            g[0] += w * bg[mm][0];
            g[1] += w * bg[mm][1];
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 2; ++j) h[i][j] += w * bh[mm][i][j];
          }
        }
        tab.val[o] = v;
        if (nderiv > 0) {
          tab.grad[o] = g;
          tab.hess[o] = h;
        }
      }
    return;
  }
  for (int comp = 0; comp < ncomp_; ++comp)
    for (int mm = 0; mm < nb; ++mm) {
      const int k = comp * nb + mm;
      const std::size_t o = static_cast<std::size_t>(k) * ncomp_ + comp;
      tab.val[o] = bv[mm];
      if (nderiv > 0) {
        tab.grad[o] = bg[mm];
        tab.hess[o] = bh[mm];
      }
    }
}

void FeSpace::poly_coefficients(int t, const Eigen::VectorXd& u, double* out) const {
  const int* l = local_dofs(t);
  if (kind_ == SpaceKind::Edge || kind_ == SpaceKind::Regge) {
    Eigen::VectorXd loc(nloc_);
    for (int k = 0; k < nloc_; ++k) loc[k] = u[l[k]];
    const Eigen::VectorXd p = basis_[t] * loc;
    for (Eigen::Index i = 0; i < p.size(); ++i) out[i] = p[i];
    return;
  }
  for (int k = 0; k < nloc_; ++k) out[k] = u[l[k]];
}

Eigen::VectorXd FeSpace::interpolate(const ComponentFn& f, int quad_degree, const std::vector<Mat2d>* gbar) const {
  const Mesh& m = *mesh_;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ndofs_);
  std::vector<char> assigned(ndofs_, 0);
  std::vector<double> buf(ncomp_);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Mat2d* gt = gbar ? &(*gbar)[t] : nullptr;
    if (gt) require_spd(*gt, "interpolation reference metric");
    const FunctionalSampling s = functional_sampling(t, quad_degree, gt);
    Eigen::VectorXd samples(static_cast<Eigen::Index>(s.points.size()) * ncomp_);
    for (std::size_t q = 0; q < s.points.size(); ++q) {
      f(t, s.points[q], buf.data());
      for (int c = 0; c < ncomp_; ++c) samples[static_cast<Eigen::Index>(q) * ncomp_ + c] = buf[c];
    }
    const Eigen::VectorXd ell = s.weights * samples;
    Eigen::VectorXd c;
    if ((kind_ == SpaceKind::Edge || kind_ == SpaceKind::Regge) && !gt) {
      c = ell;  // the local basis is dual to these functionals
    } else {
      const Eigen::MatrixXd d = s.weights * sample_matrix(s.points) * local_basis(t);
      c = solve_dense(d, ell, "interpolation");
    }
    const int* l = local_dofs(t);
    for (int k = 0; k < nloc_; ++k)
      if (!assigned[l[k]]) {
        out[l[k]] = c[k];
        assigned[l[k]] = 1;
      }
  }
  return out;
}

Eigen::VectorXd FeSpace::restrict_free(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r(num_free());
  for (int i = 0; i < num_free(); ++i) r[i] = full[free_dofs_[i]];
  return r;
}

Eigen::VectorXd FeSpace::extend_free(const Eigen::VectorXd& free) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(ndofs_);
  for (int i = 0; i < num_free(); ++i) r[free_dofs_[i]] = free[i];
  return r;
}

FeField::FeField(std::shared_ptr<const FeSpace> space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space_->ndofs()) throw std::invalid_argument("coefficient length does not match the space");
  const int block = space_->ncomp() * space_->bernstein().size();
  poly_.resize(static_cast<std::size_t>(space_->mesh().num_triangles()) * block);
  for (int t = 0; t < space_->mesh().num_triangles(); ++t)
    space_->poly_coefficients(t, coeffs_, &poly_[static_cast<std::size_t>(t) * block]);
}

void FeField::eval(int t, const Bary& b, double* val, Vec2d* grad, Mat2d* hess) const {
  const BernsteinBasis& bern = space_->bernstein();
  const int nb = bern.size();
  const int nc = space_->ncomp();
  double bv[kMaxBasis];
  Vec2d bg[kMaxBasis];
  Mat2d bh[kMaxBasis];
  const bool deriv = grad || hess;
  if (deriv)
    bern.eval(b, space_->mesh().dlambda(t), bv, bg, bh);
  else
    bern.eval(b, bv);
  const double* p = &poly_[static_cast<std::size_t>(t) * nc * nb];
  for (int c = 0; c < nc; ++c) {
    double v = 0.0;
    Vec2d g{0.0, 0.0};
    Mat2d h{};
    for (int mm = 0; mm < nb; ++mm) {
      const double w = p[c * nb + mm];
      v += w * bv[mm];
      if (deriv) {
        g[0] += w * bg[mm][0];
        g[1] += w * bg[mm][1];
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) h[i][j] += w * bh[mm][i][j];
      }
    }
    val[c] = v;
    if (grad) grad[c] = g;
    if (hess) hess[c] = h;
  }
}

ScalarJet FeFunction::scalar_jet(int t, const Bary& b) const {
  ScalarJet j;
  eval(t, b, &j.val, &j.grad, &j.hess);
  return j;
}

OneFormJet FeOneForm::oneform_jet(int t, const Bary& b) const {
  double v[2];
  Vec2d g[2];
  Mat2d h[2];
  eval(t, b, v, g, h);
  OneFormJet j;
  for (int c = 0; c < 2; ++c) {
    j.val[c] = v[c];
    for (int i = 0; i < 2; ++i) j.jac[i][c] = g[c][i];
  }
  return j;
}

double FeTwoForm::density(int t, const Bary& b) const {
  double v;
  eval(t, b, &v);
  return v;
}

SparseMatrix d0_matrix(const FeSpace& v, const FeSpace& w) {
  if (v.kind() != SpaceKind::Lagrange || w.kind() != SpaceKind::Edge || v.degree() != w.degree() ||
      &v.mesh() != &w.mesh())
    throw std::invalid_argument("d0 needs Lagrange P_p and edge P^-_p spaces on one mesh");
  const Mesh& m = v.mesh();
  const int exact = 2 * w.degree() + 2;
  const int nb = v.bernstein().size();
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> bv(nb);
  std::vector<Vec2d> bg(nb);
  std::vector<Mat2d> bh(nb);
  const int per_edge = w.degree();
  for (int t = 0; t < m.num_triangles(); ++t) {
    const FunctionalSampling s = w.functional_sampling(t, exact);
    const auto dl = m.dlambda(t);
    Eigen::MatrixXd grads(static_cast<Eigen::Index>(s.points.size()) * 2, nb);
    for (std::size_t q = 0; q < s.points.size(); ++q) {
      v.bernstein().eval(s.points[q], dl, bv.data(), bg.data(), bh.data());
      for (int k = 0; k < nb; ++k) {
        grads(static_cast<Eigen::Index>(q) * 2, k) = bg[k][0];
        grads(static_cast<Eigen::Index>(q) * 2 + 1, k) = bg[k][1];
      }
    }
    const Eigen::MatrixXd block = s.weights * grads;
    const double scale = block.cwiseAbs().maxCoeff();
    const int* lw = w.local_dofs(t);
    const int* lv = v.local_dofs(t);
    for (int i = 0; i < w.num_local(); ++i) {
      if (i < 3 * per_edge && m.edge(m.tri_edge(t, i / per_edge)).tri[0] != t) continue;
      for (int k = 0; k < nb; ++k)
        if (std::abs(block(i, k)) > 1e-13 * scale) trip.emplace_back(lw[i], lv[k], block(i, k));
    }
  }
  SparseMatrix d(w.ndofs(), v.ndofs());
  d.setFromTriplets(trip.begin(), trip.end());
  return d;
}

SparseMatrix d1_matrix(const FeSpace& w, const FeSpace& x) {
  if (w.kind() != SpaceKind::Edge || x.kind() != SpaceKind::TwoForm || x.degree() != w.degree() - 1 ||
      &w.mesh() != &x.mesh())
    throw std::invalid_argument("d1 needs edge P^-_k and two-form P_{k-1} spaces on one mesh");
  const Mesh& m = w.mesh();
  const int exact = 2 * w.degree() + 2;
  const int nbx = x.bernstein().size();
  std::vector<Eigen::Triplet<double>> trip;
  LocalTab tab;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const FunctionalSampling s = x.functional_sampling(t, exact);
    Eigen::MatrixXd a(static_cast<Eigen::Index>(s.points.size()), nbx);
    std::vector<double> bv(nbx);
    for (std::size_t q = 0; q < s.points.size(); ++q) {
      x.bernstein().eval(s.points[q], bv.data());
      for (int k = 0; k < nbx; ++k) a(static_cast<Eigen::Index>(q), k) = bv[k];
    }
    const Eigen::MatrixXd gram = s.weights * a;
    Eigen::MatrixXd curls(static_cast<Eigen::Index>(s.points.size()), w.num_local());
    for (std::size_t q = 0; q < s.points.size(); ++q) {
      w.tabulate(t, s.points[q], 1, tab);
      for (int k = 0; k < w.num_local(); ++k)
        curls(static_cast<Eigen::Index>(q), k) = tab.grad[k * 2 + 1][0] - tab.grad[k * 2][1];
    }
    const Eigen::MatrixXd block = gram.fullPivLu().solve(s.weights * curls);
    const double scale = block.cwiseAbs().maxCoeff();
    const int* lw = w.local_dofs(t);
    const int* lx = x.local_dofs(t);
    for (int i = 0; i < nbx; ++i)
      for (int k = 0; k < w.num_local(); ++k)
        if (std::abs(block(i, k)) > 1e-13 * scale) trip.emplace_back(lx[i], lw[k], block(i, k));
  }
  SparseMatrix d(x.ndofs(), w.ndofs());
  d.setFromTriplets(trip.begin(), trip.end());
  return d;
}

SparseMatrix mass_matrix(const FeSpace& space, const TensorField& metric, int quad_degree) {
  const Mesh& m = space.mesh();
  const TriQuadRule rule = tri_rule(quad_degree);
  const int nloc = space.num_local();
  const int nc = space.ncomp();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m.num_triangles()) * nloc * nloc);
  LocalTab tab;
  for (int t = 0; t < m.num_triangles(); ++t) {
    Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(nloc, nloc);
    const double area = m.area(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Mat2d g = metric.tensor_jet(t, rule.points[q]).val;
      require_spd(g, "mass matrix assembly");
      const Eigen::Matrix3d pq = pairing(space.kind(), g);
      space.tabulate(t, rule.points[q], 0, tab);
      Eigen::Map<const Eigen::MatrixXd> vals(tab.val.data(), nc, nloc);
      loc += (rule.weights[q] * area) * (vals.transpose() * pq.topLeftCorner(nc, nc) * vals);
    }
    const int* l = space.local_dofs(t);
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j)
        if (loc(i, j) != 0.0) trip.emplace_back(l[i], l[j], loc(i, j));
  }
  SparseMatrix a(space.ndofs(), space.ndofs());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

SparseMatrix restrict_free(const SparseMatrix& a, const FeSpace& rows, const FeSpace& cols) {
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      const int i = rows.free_index(static_cast<int>(it.row()));
      const int j = cols.free_index(static_cast<int>(it.col()));
      if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
    }
  SparseMatrix r(rows.num_free(), cols.num_free());
  r.setFromTriplets(trip.begin(), trip.end());
  return r;
}

Eigen::VectorXd project_functional(const Functional& f, const TensorField& metric, int quad_degree) {
  const FeSpace& s = *f.space;
  if (f.load.size() != s.ndofs()) throw std::invalid_argument("functional length does not match its space");
  const SparseMatrix m = restrict_free(mass_matrix(s, metric, quad_degree), s, s);
  return s.extend_free(spd_solve(m, s.restrict_free(f.load)));
}

Eigen::VectorXd interpolate_scalar(const FeSpace& v, const ScalarField& f, int quad_degree) {
  return v.interpolate([&](int t, const Bary& b, double* out) { out[0] = f.scalar_jet(t, b).val; }, quad_degree);
}

Eigen::VectorXd interpolate_oneform(const FeSpace& w, const OneFormField& f, int quad_degree) {
  return w.interpolate(
      [&](int t, const Bary& b, double* out) {
        const auto j = f.oneform_jet(t, b);
        out[0] = j.val[0];
        out[1] = j.val[1];
      },
      quad_degree);
}

Eigen::VectorXd interpolate_vector(const FeSpace& u, const OneFormField& f, int quad_degree) {
  return interpolate_oneform(u, f, quad_degree);
}

Eigen::VectorXd interpolate_density(const FeSpace& x, const ScalarField& f, int quad_degree) {
  return interpolate_scalar(x, f, quad_degree);
}

TensorJet DeformationField::tensor_jet(int t, const Bary& b) const {
  double v[2];
  Vec2d g[2];
  Mat2d h[2];
  u_.eval(t, b, v, g, h);
  Vec2d uv{v[0], v[1]};
  Mat2d du;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) du[i][k] = g[k][i];
  const std::array<Mat2d, 2> ddu{h[0], h[1]};
  return half_lie_derivative(uv, du, ddu, g_.tensor_jet(t, b));
}

void write_coordinate_format(const SparseMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace regge
