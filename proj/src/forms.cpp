#include "regge/forms.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "regge/geom.hpp"
#include "regge/polyquad.hpp"
#include "regge/regge.hpp"

namespace regge {

namespace {

// Quadrature point of the direct forms together with the metric data the integrand needs.
struct DirectPoint {
  int t;
  Bary b;
  int entity;
  bool on_edge;
  double weight;  // includes the area or g-length element
  Mat2d g;
  Mat2d gi;
  Christoffel<double> gam;  // triangle points only
  Vec2d tau;                // edge points only
  Vec2d n;
  double sign;  // edge term sign
};

std::vector<DirectPoint> direct_points(const FormContext& ctx) {
  const Mesh& m = ctx.mesh;
  const EntityTags tags(m);
  const TriQuadRule tr = tri_rule(ctx.quad_degree);
  const EdgeQuadRule er = edge_rule(ctx.quad_degree);
  std::vector<DirectPoint> pts;
  pts.reserve(m.num_triangles() * (tr.points.size() + 3 * er.points.size()));
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double area = m.area(t);
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      DirectPoint p{};
      p.t = t;
      p.b = tr.points[q];
      p.entity = tags.triangle(t);
      p.on_edge = false;
      const MetricJet gj = metric_jet(ctx.g, t, p.b);
      p.g = gj.val;
      p.gi = inverse2(gj.val);
      p.gam = christoffel(gj);
      p.weight = tr.weights[q] * area * std::sqrt(det2(gj.val));
      pts.push_back(p);
    }
    for (int i = 0; i < 3; ++i) {
      const Vec2d tv = m.edge_vector(t, i);
      for (std::size_t q = 0; q < er.points.size(); ++q) {
        DirectPoint p{};
        p.t = t;
        p.b = Mesh::edge_point(i, er.points[q]);
        p.entity = tags.edge(m.tri_edge(t, i));
        p.on_edge = true;
        p.g = metric_jet(ctx.g, t, p.b).val;
        p.gi = inverse2(p.g);
        const EdgeFrame f = edge_frame(p.g, tv);
        p.tau = f.tau;
        p.n = f.n;
        p.weight = er.weights[q] * std::sqrt(bilinear(p.g, tv, tv));
        p.sign = ctx.flip_normal_jump ? -1.0 : 1.0;
        pts.push_back(p);
      }
    }
  }
  return pts;
}

Mat2d raised(const Mat2d& gi, const Mat2d& a) {
  Mat2d r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) r[i][j] += gi[i][k] * a[k][l] * gi[l][j];
  return r;
}

Vec2d contract_gamma(const Christoffel<double>& gam, const Mat2d& p) {
  Vec2d c{0.0, 0.0};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) c[k] += p[i][j] * gam[k][i][j];
  return c;
}

// Coefficients of the direct b_h integrand for a symmetric tensor value sigma.
std::array<double, 7> bh_coef(const DirectPoint& p, const Mat2d& sigma) {
  if (p.on_edge) {
    const double s = p.sign * p.weight * bilinear(sigma, p.tau, p.tau);
    return scalar_coef(0.0, {s * p.n[0], s * p.n[1]});
  }
  const Mat2d up = raised(p.gi, s_operator(p.g, sigma));
  const Vec2d c = contract_gamma(p.gam, up);
  Mat2d h;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) h[i][j] = p.weight * up[i][j];
  return scalar_coef(0.0, {-p.weight * c[0], -p.weight * c[1]}, h);
}

std::array<double, 6> ch_coef(const DirectPoint& p, const Mat2d& sigma) {
  if (p.on_edge) {
    const double s = p.sign * p.weight * bilinear(sigma, p.tau, p.tau);
    return oneform_coef({s * p.n[0], s * p.n[1]});
  }
  const Mat2d up = raised(p.gi, s_operator(p.g, sigma));
  const Vec2d c = contract_gamma(p.gam, up);
  Mat2d j;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) j[i][k] = p.weight * up[i][k];
  return oneform_coef({-p.weight * c[0], -p.weight * c[1]}, j);
}

double sigma_n_tau(const Mat2d& g, const Mat2d& sigma, const Vec2d& tangent) {
  const EdgeFrame f = edge_frame(g, tangent);
  return bilinear(sigma, f.n, f.tau);
}

template <class Load, class TriFn, class EdgeFn>
Load ibp_load(const FormContext& ctx, const TensorField& sigma, TriFn tri_term, EdgeFn edge_term) {
  const Mesh& m = ctx.mesh;
  const EntityTags tags(m);
  const TriQuadRule tr = tri_rule(ctx.quad_degree);
  const EdgeQuadRule er = edge_rule(ctx.quad_degree);
  Load load;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double area = m.area(t);
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      const Bary& b = tr.points[q];
      const MetricJet gj = metric_jet(ctx.g, t, b);
      const double w = tr.weights[q] * area * std::sqrt(det2(gj.val));
      load.add(t, b, tags.triangle(t), tri_term(gj, sigma.tensor_jet(t, b), w));
    }
    for (int i = 0; i < 3; ++i) {
      const int e = m.tri_edge(t, i);
      if (!m.edge_has_interior_vertex(e)) continue;
      const Vec2d tv = m.edge_vector(t, i);
      for (std::size_t q = 0; q < er.points.size(); ++q) {
        const Bary b = Mesh::edge_point(i, er.points[q]);
        const MetricJet gj = metric_jet(ctx.g, t, b);
        const double w = er.weights[q] * std::sqrt(bilinear(gj.val, tv, tv));
        load.add(t, b, tags.edge(e), edge_term(gj, sigma.tensor_jet(t, b), tv, w));
      }
    }
  }
  return load;
}

}  // namespace

void check_tt_continuity(const Mesh& mesh, const TensorField& g, int quad_degree, double rel_tol) {
  const EdgeQuadRule er = edge_rule(quad_degree);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edge(e);
    if (ed.tri[1] < 0) continue;
    for (double s : er.points) {
      double len[2];
      for (int side = 0; side < 2; ++side) {
        const int t = ed.tri[side], i = ed.local[side];
        const double ls = mesh.tri_edge_sign(t, i) > 0 ? s : 1.0 - s;
        const Vec2d tv = mesh.edge_vector(t, i);
        len[side] = bilinear(g.tensor_jet(t, Mesh::edge_point(i, ls)).val, tv, tv);
      }
      if (std::abs(len[0] - len[1]) > rel_tol * std::max(std::abs(len[0]), std::abs(len[1]))) {
        std::ostringstream os;
        os << "metric is not tangentially continuous on edge " << e << ": g(t, t) = " << len[0] << " vs "
           << len[1];
        throw std::logic_error(os.str());
      }
    }
  }
}

ScalarLoad bh_direct_load(const FormContext& ctx, const TensorField& sigma) {
  check_tt_continuity(ctx.mesh, ctx.g, ctx.quad_degree);
  ScalarLoad load;
  for (const DirectPoint& p : direct_points(ctx)) load.add(p.t, p.b, p.entity, bh_coef(p, sigma.tensor_jet(p.t, p.b).val));
  return load;
}

OneFormLoad ch_direct_load(const FormContext& ctx, const TensorField& sigma) {
  check_tt_continuity(ctx.mesh, ctx.g, ctx.quad_degree);
  OneFormLoad load;
  for (const DirectPoint& p : direct_points(ctx)) load.add(p.t, p.b, p.entity, ch_coef(p, sigma.tensor_jet(p.t, p.b).val));
  return load;
}

ScalarLoad bh_ibp_load(const FormContext& ctx, const TensorField& sigma) {
  ScalarLoad load = ibp_load<ScalarLoad>(
      ctx, sigma,
      [](const MetricJet& gj, const TensorJet& sj, double w) { return scalar_coef(w * div_div_s_sigma(gj, sj)); },
      [](const MetricJet& gj, const TensorJet& sj, const Vec2d& tv, double w) {
        const EdgeFrame f = edge_frame(gj.val, tv);
        const Vec2d ds = div_s_sigma(gj, sj);
        const double jump = ds[0] * f.n[0] + ds[1] * f.n[1] + dtau_sigma_n_tau(gj, sj, tv);
        return scalar_coef(-w * jump);
      });
  const Mesh& m = ctx.mesh;
  const EntityTags tags(m);
  for (int z = 0; z < m.num_vertices(); ++z) {
    if (m.vertex_on_boundary(z)) continue;
    for (int t : m.star(z)) {
      const int i = m.local_vertex(t, z);
      Bary b{0.0, 0.0, 0.0};
      b[i] = 1.0;
      const Mat2d g = metric_jet(ctx.g, t, b).val;
      const Mat2d s = sigma.tensor_jet(t, b).val;
      // Edge (i+1)%3 ends at z and edge (i+2)%3 starts there in the counterclockwise traversal.
      const double jump = sigma_n_tau(g, s, m.edge_vector(t, (i + 1) % 3)) - sigma_n_tau(g, s, m.edge_vector(t, (i + 2) % 3));
      load.add(t, b, tags.vertex(z), scalar_coef(jump));
    }
  }
  return load;
}

OneFormLoad ch_ibp_load(const FormContext& ctx, const TensorField& sigma) {
  return ibp_load<OneFormLoad>(
      ctx, sigma,
      [](const MetricJet& gj, const TensorJet& sj, double w) {
        const Mat2d gi = inverse2(gj.val);
        const Vec2d ds = div_s_sigma(gj, sj);
        return oneform_coef({-w * (gi[0][0] * ds[0] + gi[0][1] * ds[1]), -w * (gi[1][0] * ds[0] + gi[1][1] * ds[1])});
      },
      [](const MetricJet& gj, const TensorJet& sj, const Vec2d& tv, double w) {
        const EdgeFrame f = edge_frame(gj.val, tv);
        const double snt = w * bilinear(sj.val, f.n, f.tau);
        return oneform_coef({snt * f.tau[0], snt * f.tau[1]});
      });
}

double bh_direct(const FormContext& ctx, const TensorField& sigma, const ScalarField& v) {
  return apply(bh_direct_load(ctx, sigma), v);
}
double bh_ibp(const FormContext& ctx, const TensorField& sigma, const ScalarField& v) {
  return apply(bh_ibp_load(ctx, sigma), v);
}
double ch_direct(const FormContext& ctx, const TensorField& sigma, const OneFormField& alpha) {
  return apply(ch_direct_load(ctx, sigma), alpha);
}
double ch_ibp(const FormContext& ctx, const TensorField& sigma, const OneFormField& alpha) {
  return apply(ch_ibp_load(ctx, sigma), alpha);
}

namespace {

template <class CoefFn, class TermFn>
SparseMatrix form_matrix(const FormContext& ctx, const FeSpace& sigma_space, const FeSpace& test, CoefFn coef,
                         TermFn term) {
  if (&sigma_space.mesh() != &ctx.mesh || &test.mesh() != &ctx.mesh)
    throw std::invalid_argument("form matrix spaces must live on the context mesh");
  if (sigma_space.kind() != SpaceKind::Regge) throw std::invalid_argument("form matrix columns must be a Regge space");
  check_tt_continuity(ctx.mesh, ctx.g, ctx.quad_degree);
  const int ns = sigma_space.num_local();
  const int nv = test.num_local();
  std::vector<Eigen::Triplet<double>> trips;
  LocalTab st, vt;
  Eigen::MatrixXd local;
  int current = -1;
  auto flush = [&](int t) {
    const int* ls = sigma_space.local_dofs(t);
    const int* lv = test.local_dofs(t);
    for (int k = 0; k < nv; ++k) {
      const int row = test.free_index(lv[k]);
      if (row < 0) continue;
      for (int a = 0; a < ns; ++a)
        if (local(k, a) != 0.0) trips.emplace_back(row, ls[a], local(k, a));
    }
  };
  for (const DirectPoint& p : direct_points(ctx)) {
    if (p.t != current) {
      if (current >= 0) flush(current);
      current = p.t;
      local.setZero(nv, ns);
    }
    sigma_space.tabulate(p.t, p.b, 0, st);
    test.tabulate(p.t, p.b, 1, vt);
    for (int a = 0; a < ns; ++a) {
      const double* sv = &st.val[a * 3];
      const Mat2d s{{{sv[0], sv[1]}, {sv[1], sv[2]}}};
      const auto c = coef(p, s);
      for (int k = 0; k < nv; ++k) local(k, a) += term(c.data(), vt, k);
    }
  }
  if (current >= 0) flush(current);
  SparseMatrix a(test.num_free(), sigma_space.ndofs());
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

}  // namespace

SparseMatrix bh_matrix(const FormContext& ctx, const FeSpace& sigma_space, const FeSpace& v) {
  if (v.kind() != SpaceKind::Lagrange) throw std::invalid_argument("bh_matrix rows must be a Lagrange space");
  return form_matrix(ctx, sigma_space, v, bh_coef, [](const double* c, const LocalTab& tab, int k) {
    const Vec2d& g = tab.grad[k];
    const Mat2d& h = tab.hess[k];
    return c[0] * tab.val[k] + c[1] * g[0] + c[2] * g[1] + c[3] * h[0][0] + c[4] * h[0][1] + c[5] * h[1][0] +
           c[6] * h[1][1];
  });
}

SparseMatrix ch_matrix(const FormContext& ctx, const FeSpace& sigma_space, const FeSpace& w) {
  if (w.kind() != SpaceKind::Edge) throw std::invalid_argument("ch_matrix rows must be an edge space");
  return form_matrix(ctx, sigma_space, w, ch_coef, [](const double* c, const LocalTab& tab, int k) {
    const double a0 = tab.val[k * 2], a1 = tab.val[k * 2 + 1];
    const Vec2d& g0 = tab.grad[k * 2];
    const Vec2d& g1 = tab.grad[k * 2 + 1];
    return c[0] * a0 + c[1] * a1 + c[2] * g0[0] + c[3] * g1[0] + c[4] * g0[1] + c[5] * g1[1];
  });
}

}  // namespace regge
