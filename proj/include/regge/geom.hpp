#pragma once

#include <stdexcept>

#include "regge/jet.hpp"

namespace regge {

class NonSpdMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Christoffel symbols of the second kind, gamma[k][i][j] = Gamma^k_ij.
template <class T>
using Christoffel = std::array<Mat2<T>, 2>;

template <class T>
T det2(const Mat2<T>& a) {
  return a[0][0] * a[1][1] - a[0][1] * a[1][0];
}

template <class T>
Mat2<T> inverse2(const Mat2<T>& a) {
  const T id = 1.0 / det2(a);
  Mat2<T> r;
  r[0][0] = a[1][1] * id;
  r[1][1] = a[0][0] * id;
  r[0][1] = -a[0][1] * id;
  r[1][0] = -a[1][0] * id;
  return r;
}

bool is_spd(const Mat2d& g);
void require_spd(const Mat2d& g, const char* where);

template <class T>
Christoffel<T> christoffel_t(const Mat2<T>& g, const std::array<Mat2<T>, 2>& dg) {
  const Mat2<T> gi = inverse2(g);
  Christoffel<T> gam;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::array<T, 2> low;  // Gamma_{ij,l}
      for (int l = 0; l < 2; ++l) low[l] = 0.5 * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
      for (int k = 0; k < 2; ++k) gam[k][i][j] = gi[k][0] * low[0] + gi[k][1] * low[1];
    }
  return gam;
}

// Euclidean-index tensor pairing g^{ik} g^{jl} a_ij b_kl.
template <class T>
T pair_g(const Mat2<T>& gi, const Mat2<T>& a, const Mat2<T>& b) {
  T s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) s += gi[i][k] * gi[j][l] * a[i][j] * b[k][l];
    }
  return s;
}

template <class T>
T trace_g(const Mat2<T>& gi, const Mat2<T>& s) {
  return gi[0][0] * s[0][0] + gi[0][1] * s[1][0] + gi[1][0] * s[0][1] + gi[1][1] * s[1][1];
}

template <class T>
Mat2<T> s_operator_t(const Mat2<T>& g, const Mat2<T>& sigma) {
  const T tr = trace_g(inverse2(g), sigma);
  Mat2<T> r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = sigma[i][j] - g[i][j] * tr;
  return r;
}

// (div S sigma)_j from metric values/derivatives and sigma values/derivatives.
template <class T>
Vec2<T> div_s_sigma_t(const Mat2<T>& g, const std::array<Mat2<T>, 2>& dg, const Mat2<T>& s,
                      const std::array<Mat2<T>, 2>& ds) {
  const Mat2<T> gi = inverse2(g);
  const Christoffel<T> gam = christoffel_t(g, dg);
  Vec2<T> w;
  for (int j = 0; j < 2; ++j) {
    T divs = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) {
        T cov = ds[i][k][j];
        for (int m = 0; m < 2; ++m) cov = cov - gam[m][i][k] * s[m][j] - gam[m][i][j] * s[k][m];
        divs = divs + gi[i][k] * cov;
      }
    // d_j (g^{ab} s_ab) = g^{ab} d_j s_ab - g^{ac} d_j g_cd g^{db} s_ab
    T dtr = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        T dgi = 0.0;
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) dgi = dgi - gi[a][c] * dg[j][c][d] * gi[d][b];
        dtr = dtr + gi[a][b] * ds[j][a][b] + dgi * s[a][b];
      }
    w[j] = divs - dtr;
  }
  return w;
}

// Lift of a tensor jet into Dual<2> values carrying first partials.
Mat2<Dual<2>> lift_value(const TensorJet& j);
std::array<Mat2<Dual<2>>, 2> lift_first(const TensorJet& j);

Christoffel<double> christoffel(const MetricJet& jet);
// d_m Gamma^k_ij, indexed [m][k][i][j].
std::array<Christoffel<double>, 2> christoffel_derivative(const MetricJet& jet);
double gauss_curvature(const MetricJet& jet);
Mat2d s_operator(const Mat2d& g, const Mat2d& sigma);
Mat2d hessian(const MetricJet& jet, const ScalarJet& v);
Vec2d div_s_sigma(const MetricJet& jet, const SymTensorJet& sigma);
double div_div_s_sigma(const MetricJet& jet, const SymTensorJet& sigma);
// (nabla alpha)_ij = d_i alpha_j - Gamma^k_ij alpha_k
Mat2d covariant_derivative(const MetricJet& jet, const OneFormJet& alpha);
// (nabla s)[k][i][j] = (nabla_k s)_ij
std::array<Mat2d, 2> covariant_derivative(const MetricJet& jet, const SymTensorJet& s);

struct EdgeFrame {
  Vec2d tau;
  Vec2d n;
};

// Which side of the Euclidean tangent the outward normal points to.
enum class OutwardSide { Right, Left };

EdgeFrame edge_frame(const Mat2d& g, const Vec2d& tangent, OutwardSide side = OutwardSide::Right);
double geodesic_curvature(const MetricJet& jet, const Vec2d& tangent,
                          OutwardSide side = OutwardSide::Right);
double interior_angle(const Mat2d& g, const Vec2d& t1, const Vec2d& t2);

// d/ds of sigma(n, tau) along tau, with (tau, n) = edge_frame(g, tangent, side).
double dtau_sigma_n_tau(const MetricJet& g, const SymTensorJet& sigma, const Vec2d& tangent,
                        OutwardSide side = OutwardSide::Right);

// Coordinate Hodge star of a one-form: (*b)_i = sqrt(det g) eps_{ji} g^{jk} b_k.
Vec2d hodge_star(const Mat2d& g, const Vec2d& beta);

inline double bilinear(const Mat2d& a, const Vec2d& x, const Vec2d& y) {
  return x[0] * (a[0][0] * y[0] + a[0][1] * y[1]) + x[1] * (a[1][0] * y[0] + a[1][1] * y[1]);
}

}  // namespace regge
