#pragma once

#include <array>
#include <cmath>

namespace regge {

template <class T>
using Vec2 = std::array<T, 2>;
template <class T>
using Mat2 = std::array<std::array<T, 2>, 2>;

using Vec2d = Vec2<double>;
using Mat2d = Mat2<double>;

// Forward-mode dual number with N directional partials.
template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants

  static Dual variable(double value, int k) {
    Dual r(value);
    r.d[k] = 1.0;
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
    v *= inv;
    return *this;
  }
};

template <int N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N>
Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <int N>
Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <int N>
Dual<N> operator+(Dual<N> a, double b) { a.v += b; return a; }
template <int N>
Dual<N> operator+(double b, Dual<N> a) { a.v += b; return a; }
template <int N>
Dual<N> operator-(Dual<N> a, double b) { a.v -= b; return a; }
template <int N>
Dual<N> operator-(double b, const Dual<N>& a) { return Dual<N>(b) - a; }
template <int N>
Dual<N> operator*(Dual<N> a, double b) {
  a.v *= b;
  for (auto& x : a.d) x *= b;
  return a;
}
template <int N>
Dual<N> operator*(double b, Dual<N> a) { return a * b; }
template <int N>
Dual<N> operator/(Dual<N> a, double b) { return a * (1.0 / b); }
template <int N>
Dual<N> operator/(double b, const Dual<N>& a) { return Dual<N>(b) / a; }
template <int N>
Dual<N> operator-(Dual<N> a) { return a * -1.0; }

template <int N, class F, class DF>
Dual<N> apply_unary(const Dual<N>& a, F f, DF df) {
  Dual<N> r(f(a.v));
  const double s = df(a.v);
  for (int i = 0; i < N; ++i) r.d[i] = s * a.d[i];
  return r;
}

template <int N>
Dual<N> sqrt(const Dual<N>& a) {
  const double s = std::sqrt(a.v);
  return apply_unary(a, [s](double) { return s; }, [s](double) { return 0.5 / s; });
}
template <int N>
Dual<N> exp(const Dual<N>& a) {
  const double e = std::exp(a.v);
  return apply_unary(a, [e](double) { return e; }, [e](double) { return e; });
}
template <int N>
Dual<N> log(const Dual<N>& a) {
  return apply_unary(a, [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; });
}
template <int N>
Dual<N> sin(const Dual<N>& a) {
  return apply_unary(a, [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); });
}
template <int N>
Dual<N> cos(const Dual<N>& a) {
  return apply_unary(a, [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); });
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x) { return x.v; }

// Second-order jet in the two physical coordinates: value, gradient, Hessian.
struct Jet2 {
  double v = 0.0;
  Vec2d g{};
  Mat2d h{};

  Jet2() = default;
  Jet2(double value) : v(value) {}  // NOLINT: implicit lift of constants

  static Jet2 coordinate(double value, int k) {
    Jet2 r(value);
    r.g[k] = 1.0;
    return r;
  }

  Jet2& operator+=(const Jet2& o) {
    v += o.v;
    for (int i = 0; i < 2; ++i) {
      g[i] += o.g[i];
      for (int j = 0; j < 2; ++j) h[i][j] += o.h[i][j];
    }
    return *this;
  }
  Jet2& operator-=(const Jet2& o) { return *this += o * -1.0; }
  Jet2& operator*=(const Jet2& o) {
    Jet2 r;
    r.v = v * o.v;
    for (int i = 0; i < 2; ++i) {
      r.g[i] = g[i] * o.v + v * o.g[i];
      for (int j = 0; j < 2; ++j)
        r.h[i][j] = h[i][j] * o.v + g[i] * o.g[j] + g[j] * o.g[i] + v * o.h[i][j];
    }
    return *this = r;
  }
  Jet2 operator*(double s) const {
    Jet2 r = *this;
    r.v *= s;
    for (int i = 0; i < 2; ++i) {
      r.g[i] *= s;
      for (int j = 0; j < 2; ++j) r.h[i][j] *= s;
    }
    return r;
  }
};

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator*(Jet2 a, const Jet2& b) { return a *= b; }
inline Jet2 operator*(double s, const Jet2& a) { return a * s; }
inline Jet2 operator-(const Jet2& a) { return a * -1.0; }
inline Jet2 operator+(Jet2 a, double b) { a.v += b; return a; }
inline Jet2 operator+(double b, Jet2 a) { a.v += b; return a; }
inline Jet2 operator-(Jet2 a, double b) { a.v -= b; return a; }
inline Jet2 operator-(double b, const Jet2& a) { return Jet2(b) - a; }

// Chain rule for f(a) given f, f', f'' at a.v.
inline Jet2 compose(const Jet2& a, double f0, double f1, double f2) {
  Jet2 r(f0);
  for (int i = 0; i < 2; ++i) {
    r.g[i] = f1 * a.g[i];
    for (int j = 0; j < 2; ++j) r.h[i][j] = f1 * a.h[i][j] + f2 * a.g[i] * a.g[j];
  }
  return r;
}

inline Jet2 sin(const Jet2& a) { return compose(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet2 cos(const Jet2& a) { return compose(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return compose(a, e, e, e);
}
inline Jet2 log(const Jet2& a) { return compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.v);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet2 inv(const Jet2& a) {
  const double i = 1.0 / a.v;
  return compose(a, i, -i * i, 2.0 * i * i * i);
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inv(b); }
inline Jet2 operator/(const Jet2& a, double b) { return a * (1.0 / b); }
inline Jet2 operator/(double a, const Jet2& b) { return inv(b) * a; }
inline Jet2 pow(const Jet2& a, double p) {
  const double f0 = std::pow(a.v, p);
  return compose(a, f0, p * std::pow(a.v, p - 1.0), p * (p - 1.0) * std::pow(a.v, p - 2.0));
}

// Pointwise 2-jets of scalars, one-forms and symmetric (0,2)-tensors.
struct ScalarJet {
  double val = 0.0;
  Vec2d grad{};
  Mat2d hess{};
};

struct OneFormJet {
  Vec2d val{};
  Mat2d jac{};  // jac[i][j] = d_i alpha_j
};

struct TensorJet {
  Mat2d val{};
  std::array<Mat2d, 2> d{};                    // d[k][i][j] = d_k s_ij
  std::array<std::array<Mat2d, 2>, 2> dd{};    // dd[k][l][i][j] = d_k d_l s_ij
};

using MetricJet = TensorJet;
using SymTensorJet = TensorJet;

// Closed-form symmetric tensor value built from Jet2 components.
struct SymJet2 {
  Jet2 xx, xy, yy;
};

TensorJet to_tensor_jet(const SymJet2& s);
ScalarJet to_scalar_jet(const Jet2& s);

inline Mat2d identity2() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

}  // namespace regge
