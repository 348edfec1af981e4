#include "regge/geom.hpp"

#include <algorithm>
#include <string>

namespace regge {

TensorJet to_tensor_jet(const SymJet2& s) {
  TensorJet j;
  const Jet2* c[2][2] = {{&s.xx, &s.xy}, {&s.xy, &s.yy}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      j.val[a][b] = c[a][b]->v;
      for (int k = 0; k < 2; ++k) {
        j.d[k][a][b] = c[a][b]->g[k];
        for (int l = 0; l < 2; ++l) j.dd[k][l][a][b] = c[a][b]->h[k][l];
      }
    }
  return j;
}

ScalarJet to_scalar_jet(const Jet2& s) { return {s.v, s.g, s.h}; }

bool is_spd(const Mat2d& g) {
  return g[0][0] > 0.0 && g[1][1] > 0.0 && det2(g) > 0.0;
}

void require_spd(const Mat2d& g, const char* where) {
  if (!is_spd(g))
    throw NonSpdMetric(std::string("metric is not positive definite in ") + where);
}

Mat2<Dual<2>> lift_value(const TensorJet& j) {
  Mat2<Dual<2>> r;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      r[a][b] = Dual<2>(j.val[a][b]);
      for (int m = 0; m < 2; ++m) r[a][b].d[m] = j.d[m][a][b];
    }
  return r;
}

std::array<Mat2<Dual<2>>, 2> lift_first(const TensorJet& j) {
  std::array<Mat2<Dual<2>>, 2> r;
  for (int k = 0; k < 2; ++k)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        r[k][a][b] = Dual<2>(j.d[k][a][b]);
        for (int m = 0; m < 2; ++m) r[k][a][b].d[m] = j.dd[k][m][a][b];
      }
  return r;
}

Christoffel<double> christoffel(const MetricJet& jet) {
  require_spd(jet.val, "christoffel");
  return christoffel_t(jet.val, jet.d);
}

std::array<Christoffel<double>, 2> christoffel_derivative(const MetricJet& jet) {
  require_spd(jet.val, "christoffel_derivative");
  const auto gam = christoffel_t(lift_value(jet), lift_first(jet));
  std::array<Christoffel<double>, 2> r;
  for (int m = 0; m < 2; ++m)
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[m][k][i][j] = gam[k][i][j].d[m];
  return r;
}

double gauss_curvature(const MetricJet& jet) {
  require_spd(jet.val, "gauss_curvature");
  const auto gam = christoffel_t(jet.val, jet.d);
  const auto dgam = christoffel_derivative(jet);
  // R^a_{101} = d_0 G^a_11 - d_1 G^a_01 + G^a_0e G^e_11 - G^a_1e G^e_01
  double r[2];
  for (int a = 0; a < 2; ++a) {
    r[a] = dgam[0][a][1][1] - dgam[1][a][0][1];
    for (int e = 0; e < 2; ++e) r[a] += gam[a][0][e] * gam[e][1][1] - gam[a][1][e] * gam[e][0][1];
  }
  const double r0101 = jet.val[0][0] * r[0] + jet.val[0][1] * r[1];
  return r0101 / det2(jet.val);
}

Mat2d s_operator(const Mat2d& g, const Mat2d& sigma) {
  require_spd(g, "s_operator");
  return s_operator_t(g, sigma);
}

Mat2d hessian(const MetricJet& jet, const ScalarJet& v) {
  const auto gam = christoffel(jet);
  Mat2d h;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      h[i][j] = v.hess[i][j] - gam[0][i][j] * v.grad[0] - gam[1][i][j] * v.grad[1];
  return h;
}

Vec2d div_s_sigma(const MetricJet& jet, const SymTensorJet& sigma) {
  require_spd(jet.val, "div_s_sigma");
  return div_s_sigma_t(jet.val, jet.d, sigma.val, sigma.d);
}

double div_div_s_sigma(const MetricJet& jet, const SymTensorJet& sigma) {
  require_spd(jet.val, "div_div_s_sigma");
  const auto w = div_s_sigma_t(lift_value(jet), lift_first(jet), lift_value(sigma), lift_first(sigma));
  const auto gam = christoffel_t(jet.val, jet.d);
  const Mat2d gi = inverse2(jet.val);
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      s += gi[i][j] * (w[j].d[i] - gam[0][i][j] * w[0].v - gam[1][i][j] * w[1].v);
  return s;
}

Mat2d covariant_derivative(const MetricJet& jet, const OneFormJet& alpha) {
  const auto gam = christoffel(jet);
  Mat2d r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r[i][j] = alpha.jac[i][j] - gam[0][i][j] * alpha.val[0] - gam[1][i][j] * alpha.val[1];
  return r;
}

std::array<Mat2d, 2> covariant_derivative(const MetricJet& jet, const SymTensorJet& s) {
  const auto gam = christoffel(jet);
  std::array<Mat2d, 2> r;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double v = s.d[k][i][j];
        for (int m = 0; m < 2; ++m) v -= gam[m][k][i] * s.val[m][j] + gam[m][k][j] * s.val[i][m];
        r[k][i][j] = v;
      }
  return r;
}

namespace {

template <class T>
struct FrameT {
  Vec2<T> tau;
  Vec2<T> n;
};

// Outward covector nu (Euclidean), g-unit normal n = g^{-1} nu / |nu|, tau = +-t/|t|_g with the
// sign chosen so that (n, tau) is positively oriented.
template <class T>
FrameT<T> frame_t(const Mat2<T>& g, const Vec2d& t, OutwardSide side) {
  using std::sqrt;
  const double s = side == OutwardSide::Right ? 1.0 : -1.0;
  const Vec2d nu{s * t[1], -s * t[0]};
  const Mat2<T> gi = inverse2(g);
  T tt = 0.0;
  T nn = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      tt = tt + g[i][j] * t[i] * t[j];
      nn = nn + gi[i][j] * nu[i] * nu[j];
    }
  const T tl = sqrt(tt);
  const T nl = sqrt(nn);
  FrameT<T> f;
  for (int i = 0; i < 2; ++i) {
    f.tau[i] = s * t[i] / tl;
    f.n[i] = (gi[i][0] * nu[0] + gi[i][1] * nu[1]) / nl;
  }
  return f;
}

}  // namespace

EdgeFrame edge_frame(const Mat2d& g, const Vec2d& tangent, OutwardSide side) {
  require_spd(g, "edge_frame");
  if (tangent[0] == 0.0 && tangent[1] == 0.0) throw std::invalid_argument("edge_frame: zero tangent");
  const auto f = frame_t<double>(g, tangent, side);
  return {f.tau, f.n};
}

double geodesic_curvature(const MetricJet& jet, const Vec2d& tangent, OutwardSide side) {
  const auto gam = christoffel(jet);
  const auto f = frame_t<double>(jet.val, tangent, side);
  // The d(tau)/ds term is parallel to the edge and drops out of g(n, .).
  Vec2d acc{0.0, 0.0};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) acc[k] += gam[k][i][j] * f.tau[i] * f.tau[j];
  return -bilinear(jet.val, f.n, acc);
}

double interior_angle(const Mat2d& g, const Vec2d& t1, const Vec2d& t2) {
  require_spd(g, "interior_angle");
  const double cross = t1[0] * t2[1] - t1[1] * t2[0];
  const double l1 = std::hypot(t1[0], t1[1]);
  const double l2 = std::hypot(t2[0], t2[1]);
  if (std::abs(cross) <= 1e-14 * l1 * l2) throw std::invalid_argument("interior_angle: parallel directions");
  double c = bilinear(g, t1, t2) / std::sqrt(bilinear(g, t1, t1) * bilinear(g, t2, t2));
  if (c > 1.0 + 1e-12 || c < -1.0 - 1e-12) throw std::domain_error("interior_angle: cosine out of range");
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

double dtau_sigma_n_tau(const MetricJet& g, const SymTensorJet& sigma, const Vec2d& tangent,
                        OutwardSide side) {
  require_spd(g.val, "dtau_sigma_n_tau");
  const double s = side == OutwardSide::Right ? 1.0 : -1.0;
  // Directional derivative along the oriented tangent s*t.
  Mat2<Dual<1>> gd;
  Mat2<Dual<1>> sd;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      gd[a][b] = Dual<1>(g.val[a][b]);
      sd[a][b] = Dual<1>(sigma.val[a][b]);
      gd[a][b].d[0] = s * (tangent[0] * g.d[0][a][b] + tangent[1] * g.d[1][a][b]);
      sd[a][b].d[0] = s * (tangent[0] * sigma.d[0][a][b] + tangent[1] * sigma.d[1][a][b]);
    }
  const auto f = frame_t<Dual<1>>(gd, tangent, side);
  Dual<1> val = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) val = val + sd[i][j] * f.n[i] * f.tau[j];
  return val.d[0] / std::sqrt(bilinear(g.val, tangent, tangent));
}

Vec2d hodge_star(const Mat2d& g, const Vec2d& beta) {
  require_spd(g, "hodge_star");
  const Mat2d gi = inverse2(g);
  const double sq = std::sqrt(det2(g));
  return {-sq * (gi[1][0] * beta[0] + gi[1][1] * beta[1]), sq * (gi[0][0] * beta[0] + gi[0][1] * beta[1])};
}

}  // namespace regge
