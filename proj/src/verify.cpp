#include "regge/verify.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "regge/curvature.hpp"
#include "regge/forms.hpp"
#include "regge/geom.hpp"
#include "regge/linalg.hpp"
#include "regge/load.hpp"

namespace regge {

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double rel_vec(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double s = std::max(max_abs(a), max_abs(b));
  return s > 0.0 ? max_abs(a - b) / s : 0.0;
}

std::shared_ptr<const Mesh> unit_square(int n) { return std::make_shared<const Mesh>(Mesh::build_structured({}, n)); }

std::shared_ptr<const FeSpace> space(std::shared_ptr<const Mesh> m, SpaceKind kind, int degree) {
  return std::make_shared<const FeSpace>(std::move(m), kind, degree);
}

SymJet2 conformal_metric(const Jet2& x, const Jet2& y) {
  const Jet2 c = exp(0.4 * sin(kPi * x) * sin(kPi * y));
  return SymJet2{c, Jet2(0.0), c};
}

std::vector<double> euclidean_lengths(const Mesh& m) {
  std::vector<double> l(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    const Vec2d& a = m.vertex(m.edge(e).v[0]);
    const Vec2d& b = m.vertex(m.edge(e).v[1]);
    l[e] = std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  return l;
}

std::vector<Mat2d> perturbed_flat_metric(const Mesh& m, unsigned seed, double amount) {
  std::vector<double> l = euclidean_lengths(m);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-amount, amount);
  for (double& x : l) x *= 1.0 + u(rng);
  return metric_from_edge_lengths(m, l);
}

void add_fd(CheckResult& c, const FdResult& f) {
  c.add("exact", f.exact);
  c.add("fd_finest", f.derivatives.back());
  c.add("richardson", f.richardson.back());
  c.add("richardson_rel_error", f.richardson_error);
  c.add("min_order", f.orders.empty() ? 0.0 : *std::min_element(f.orders.begin(), f.orders.end()));
  c.add("order_gated", f.order_gated ? 1.0 : 0.0);
  c.add("richardson_order", f.richardson_order);
  c.add("richardson_order_gated", f.richardson_order_gated ? 1.0 : 0.0);
  c.pass = f.pass;
}

std::shared_ptr<const Mesh> one_triangle() {
  return std::make_shared<const Mesh>(std::vector<Vec2d>{{0.1, 0.2}, {0.9, 0.1}, {0.4, 0.8}},
                                      std::vector<std::array<int, 3>>{{0, 1, 2}});
}

// Metric g(t) of a path as a closed-form field on a mesh.
ClosedFormTensor at_time(std::shared_ptr<const Mesh> m, const TensorPathFn& f, double t) {
  return ClosedFormTensor(std::move(m), [f, t](const Jet2& x, const Jet2& y) { return f(x, y, t); });
}

double sym_frobenius(const Mat2d& a) {
  return std::sqrt(a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1]);
}

double min_eigenvalue(const Mat2d& a) {
  const double m = 0.5 * (a[0][0] + a[1][1]);
  const double d = std::hypot(0.5 * (a[0][0] - a[1][1]), 0.5 * (a[0][1] + a[1][0]));
  return m - d;
}

Eigen::MatrixXd dense(const SparseMatrix& a) { return Eigen::MatrixXd(a); }

}  // namespace

void FdSchedule::validate() const {
  if (steps.size() < 3) throw std::invalid_argument("finite-difference schedule needs at least three steps");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!(steps[k] > 0.0)) throw std::invalid_argument("finite-difference steps must be positive");
    if (k > 0 && !(steps[k] < steps[k - 1])) throw std::invalid_argument("finite-difference steps must decrease");
  }
}

FdResult fd_compare(const std::function<double(double)>& f, double exact, const FdSchedule& s) {
  s.validate();
  FdResult r;
  r.exact = exact;
  std::vector<double> noise;
  double fmag = 0.0;
  for (double e : s.steps) {
    const double fp = f(e), fm = f(-e);
    fmag = std::max({fmag, std::abs(fp), std::abs(fm)});
    r.derivatives.push_back((fp - fm) / (2.0 * e));
    r.errors.push_back(std::abs(r.derivatives.back() - exact));
  }
  // Round-off level of a central difference of values of size fmag.
  for (double e : s.steps) noise.push_back(100.0 * DBL_EPSILON * std::max(fmag, std::abs(exact)) / e);
  const std::size_t n = s.steps.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double rho = s.steps[k] / s.steps[k + 1];
    r.orders.push_back(std::log(r.errors[k] / r.errors[k + 1]) / std::log(rho));
    r.richardson.push_back((rho * rho * r.derivatives[k + 1] - r.derivatives[k]) / (rho * rho - 1.0));
  }
  const double rerr = std::abs(r.richardson.back() - exact);
  r.richardson_error = exact != 0.0 ? rerr / std::abs(exact) : rerr;
  r.order_gated = r.errors.back() > 10.0 * noise.back() && r.errors.back() > s.abs_tolerance;
  const std::size_t m = r.richardson.size();
  const double re0 = std::abs(r.richardson[m - 2] - exact);
  const double re1 = std::abs(r.richardson[m - 1] - exact);
  r.richardson_order = std::log(re0 / re1) / std::log(s.steps[n - 2] / s.steps[n - 1]);
  r.richardson_order_gated = re1 > 10.0 * noise.back() && re1 > s.abs_tolerance;
  bool ok = rerr <= s.tolerance * std::abs(exact) + s.abs_tolerance;
  if (r.order_gated)
    for (double o : r.orders) ok = ok && o >= s.min_order;
  if (r.richardson_order_gated) ok = ok && r.richardson_order >= s.min_richardson_order;
  r.pass = ok;
  return r;
}

bool VerifyReport::pass() const { return failures() == 0; }

int VerifyReport::failures() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.pass; }));
}

void VerifyReport::append(const VerifyReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json j;
  j["pass"] = pass();
  j["failures"] = failures();
  j["checks"] = nlohmann::ordered_json::array();
  for (const CheckResult& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    nlohmann::ordered_json v = nlohmann::ordered_json::object();
    for (const auto& [k, x] : c.values) v[k] = std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json();
    e["values"] = v;
    if (!c.detail.empty()) e["detail"] = c.detail;
    j["checks"].push_back(e);
  }
  return j.dump(2);
}

Eigen::VectorXd random_vector(int n, unsigned seed, double scale) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

Eigen::VectorXd random_free(const FeSpace& s, unsigned seed) {
  Eigen::VectorXd v = random_vector(s.ndofs(), seed);
  for (int d = 0; d < s.ndofs(); ++d)
    if (s.constrained(d)) v[d] = 0.0;
  return v;
}

ReggeField random_metric(std::shared_ptr<const FeSpace> s, unsigned seed, double scale) {
  const ReggeField delta = interp_regge(s, ConstantTensor(identity2()));
  const ReggeField p(s, random_vector(s->ndofs(), seed));
  const TriQuadRule tr = tri_rule(8);
  double mx = 0.0;
  for (int t = 0; t < s->mesh().num_triangles(); ++t)
    for (const Bary& b : tr.points) mx = std::max(mx, sym_frobenius(p.tensor_jet(t, b).val));
  return ReggeField(s, delta.coeffs() + (scale / mx) * p.coeffs());
}

double spd_direction_scale(const Mesh& mesh, const TensorField& g, const TensorField& sigma, double max_step) {
  const TriQuadRule tr = tri_rule(8);
  std::vector<Bary> pts = tr.points;
  pts.push_back({1.0, 0.0, 0.0});
  pts.push_back({0.0, 1.0, 0.0});
  pts.push_back({0.0, 0.0, 1.0});
  double worst = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const Bary& b : pts) {
      const double lam = min_eigenvalue(g.tensor_jet(t, b).val);
      if (!(lam > 0.0)) throw std::invalid_argument("spd_direction_scale: base tensor is not positive definite");
      worst = std::max(worst, sym_frobenius(sigma.tensor_jet(t, b).val) / lam);
    }
  if (worst == 0.0) return 1.0;
  // Unit size relative to g, unless that leaves less than half of the eigenvalue margin.
  return std::min(1.0, 0.5 / max_step) / worst;
}

std::vector<TensorPath> path_catalog() {
  std::vector<TensorPath> p;
  p.push_back({"constant_euclidean", [](const Jet2&, const Jet2&, double) { return SymJet2{1.0, 0.0, 1.0}; },
               [](const Jet2&, const Jet2&, double) { return SymJet2{0.0, 0.0, 0.0}; }, 0.0});
  p.push_back({"uniform_scaling", [](const Jet2&, const Jet2&, double t) { return SymJet2{1.0 + t, 0.0, 1.0 + t}; },
               [](const Jet2&, const Jet2&, double) { return SymJet2{1.0, 0.0, 1.0}; }, 0.3});
  p.push_back({"conformal_xy",
               [](const Jet2& x, const Jet2& y, double t) {
                 const Jet2 c = exp(2.0 * t * x * y);
                 return SymJet2{c, 0.0, c};
               },
               [](const Jet2& x, const Jet2& y, double t) {
                 const Jet2 c = 2.0 * x * y * exp(2.0 * t * x * y);
                 return SymJet2{c, 0.0, c};
               },
               0.5});
  p.push_back({"conformal_nonharmonic",
               [](const Jet2& x, const Jet2& y, double t) {
                 const Jet2 c = exp(2.0 * t * (x * x * y + 0.5 * sin(y)));
                 return SymJet2{c, 0.0, c};
               },
               [](const Jet2& x, const Jet2& y, double t) {
                 const Jet2 phi = x * x * y + 0.5 * sin(y);
                 const Jet2 c = 2.0 * phi * exp(2.0 * t * phi);
                 return SymJet2{c, 0.0, c};
               },
               0.5});
  auto a = [](const Jet2& x, const Jet2& y) { return SymJet2{0.3 * x * x, 0.2 * x * y, 0.3 * sin(y) + 0.1 * x}; };
  p.push_back({"linear_nonconstant",
               [a](const Jet2& x, const Jet2& y, double t) {
                 const SymJet2 s = a(x, y);
                 return SymJet2{1.0 + t * s.xx, t * s.xy, 1.0 + t * s.yy};
               },
               [a](const Jet2& x, const Jet2& y, double) { return a(x, y); }, 0.4});
  return p;
}

CheckResult check_kappavoldot(const TensorPath& path, const ScalarFn& v, const FdSchedule& s) {
  auto mesh = one_triangle();
  const TriQuadRule tr = tri_rule(16);
  const ClosedFormScalar vf(mesh, v);
  auto total = [&](double t) {
    const ClosedFormTensor g = at_time(mesh, path.g, t);
    double sum = 0.0;
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      const MetricJet gj = g.tensor_jet(0, tr.points[q]);
      sum += tr.weights[q] * mesh->area(0) * vf.scalar_jet(0, tr.points[q]).val * gauss_curvature(gj) *
             std::sqrt(det2(gj.val));
    }
    return sum;
  };
  const ClosedFormTensor g0 = at_time(mesh, path.g, path.t0);
  const ClosedFormTensor sig = at_time(mesh, path.gdot, path.t0);
  double exact = 0.0;
  for (std::size_t q = 0; q < tr.points.size(); ++q) {
    const MetricJet gj = g0.tensor_jet(0, tr.points[q]);
    exact += 0.5 * tr.weights[q] * mesh->area(0) * vf.scalar_jet(0, tr.points[q]).val *
             div_div_s_sigma(gj, sig.tensor_jet(0, tr.points[q])) * std::sqrt(det2(gj.val));
  }
  CheckResult c;
  c.name = "kappavoldot/" + path.name;
  add_fd(c, fd_compare([&](double e) { return total(path.t0 + e); }, exact, s));
  return c;
}

CheckResult check_klengthdot(const TensorPath& path, const ScalarFn& v, const FdSchedule& s) {
  auto mesh = one_triangle();
  const EdgeQuadRule er = edge_rule(16);
  const ClosedFormScalar vf(mesh, v);
  const int i = 0;
  const Vec2d tv = mesh->edge_vector(0, i);
  auto total = [&](double t) {
    const ClosedFormTensor g = at_time(mesh, path.g, t);
    double sum = 0.0;
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      const Bary b = Mesh::edge_point(i, er.points[q]);
      const MetricJet gj = g.tensor_jet(0, b);
      sum += er.weights[q] * vf.scalar_jet(0, b).val * geodesic_curvature(gj, tv) * std::sqrt(bilinear(gj.val, tv, tv));
    }
    return sum;
  };
  const ClosedFormTensor g0 = at_time(mesh, path.g, path.t0);
  const ClosedFormTensor sig = at_time(mesh, path.gdot, path.t0);
  double exact = 0.0;
  for (std::size_t q = 0; q < er.points.size(); ++q) {
    const Bary b = Mesh::edge_point(i, er.points[q]);
    const MetricJet gj = g0.tensor_jet(0, b);
    const TensorJet sj = sig.tensor_jet(0, b);
    const EdgeFrame f = edge_frame(gj.val, tv);
    const Vec2d ds = div_s_sigma(gj, sj);
    const double rate = -0.5 * (ds[0] * f.n[0] + ds[1] * f.n[1] + dtau_sigma_n_tau(gj, sj, tv));
    exact += er.weights[q] * vf.scalar_jet(0, b).val * rate * std::sqrt(bilinear(gj.val, tv, tv));
  }
  CheckResult c;
  c.name = "klengthdot/" + path.name;
  add_fd(c, fd_compare([&](double e) { return total(path.t0 + e); }, exact, s));
  return c;
}

CheckResult check_klengthdot_jump(int r, unsigned seed, const FdSchedule& s) {
  auto mesh = unit_square(2);
  auto rs = regge_space(mesh, r);
  const ReggeField g0 = random_metric(rs, seed, 0.2);
  const ReggeField raw(rs, random_vector(rs->ndofs(), seed + 1));
  const ReggeField sigma(rs, spd_direction_scale(*mesh, g0, raw, s.steps.front()) * raw.coeffs());
  const ClosedFormScalar v(mesh, [](const Jet2& x, const Jet2& y) { return 1.0 + x * y + sin(2.0 * x); });
  const EdgeQuadRule er = edge_rule(4 * r + 12);
  // Sum over interior edges of the integral of v times the jump, and the claimed rate.
  auto integrate = [&](const TensorField& g, const TensorField* dir) {
    double sum = 0.0;
    for (int e = 0; e < mesh->num_edges(); ++e) {
      if (mesh->edge_on_boundary(e)) continue;
      const Edge& ed = mesh->edge(e);
      for (std::size_t q = 0; q < er.points.size(); ++q) {
        const double sp = er.points[q];
        double jump = 0.0, len = 0.0, vv = 0.0;
        for (int side = 0; side < 2; ++side) {
          const int t = ed.tri[side], i = ed.local[side];
          const Bary b = Mesh::edge_point(i, mesh->tri_edge_sign(t, i) > 0 ? sp : 1.0 - sp);
          const Vec2d tv = mesh->edge_vector(t, i);
          const MetricJet gj = metric_jet(g, t, b);
          if (side == 0) {
            len = std::sqrt(bilinear(gj.val, tv, tv));
            vv = v.scalar_jet(t, b).val;
          }
          if (dir) {
            const TensorJet sj = dir->tensor_jet(t, b);
            const EdgeFrame f = edge_frame(gj.val, tv);
            const Vec2d ds = div_s_sigma(gj, sj);
            jump += -0.5 * (ds[0] * f.n[0] + ds[1] * f.n[1] + dtau_sigma_n_tau(gj, sj, tv));
          } else {
            jump += geodesic_curvature(gj, tv);
          }
        }
        sum += er.weights[q] * vv * jump * len;
      }
    }
    return sum;
  };
  const double exact = integrate(g0, &sigma);
  CheckResult c;
  c.name = "klengthdot/jump_r" + std::to_string(r);
  add_fd(c,
         fd_compare(
             [&](double e) {
               const LinearTensor g(Mat2d{}, {{1.0, &g0}, {e, &sigma}});
               return integrate(g, nullptr);
             },
             exact, s));
  return c;
}

std::vector<AnglePath> angle_catalog() {
  std::vector<AnglePath> p;
  const Mat2d a{{{2.0, 0.3}, {0.3, 1.0}}};
  p.push_back({"conformal_direction", [a](double t) { return Mat2d{{{(1 + t) * a[0][0], (1 + t) * a[0][1]}, {(1 + t) * a[1][0], (1 + t) * a[1][1]}}}; },
               [a](double) { return a; }, {1.0, 0.0}, {0.2, 1.0}, 0});
  p.push_back({"stretch_x_axes", [](double t) { return Mat2d{{{1.0 + t, 0.0}, {0.0, 1.0}}}; },
               [](double) { return Mat2d{{{1.0, 0.0}, {0.0, 0.0}}}; }, {1.0, 0.0}, {0.0, 1.0}, 0});
  // Stretching x tilts (1, 1) towards the x axis, so the angle from (1, 0) closes.
  p.push_back({"stretch_x_closes", [](double t) { return Mat2d{{{1.0 + t, 0.0}, {0.0, 1.0}}}; },
               [](double) { return Mat2d{{{1.0, 0.0}, {0.0, 0.0}}}; }, {1.0, 0.0}, {1.0, 1.0}, -1});
  // The wedge from (1, 1) to (-1, 1) contains the y axis and opens when x is stretched.
  p.push_back({"stretch_x_opens", [](double t) { return Mat2d{{{1.0 + t, 0.0}, {0.0, 1.0}}}; },
               [](double) { return Mat2d{{{1.0, 0.0}, {0.0, 0.0}}}; }, {1.0, 1.0}, {-1.0, 1.0}, 1});
  p.push_back({"general", [](double t) { return Mat2d{{{1.0 + t, 0.3 * t}, {0.3 * t, 1.0 - 0.2 * t}}}; },
               [](double) { return Mat2d{{{1.0, 0.3}, {0.3, -0.2}}}; }, {1.0, 0.2}, {-0.3, 1.0}, 0});
  return p;
}

CheckResult check_angledot(const AnglePath& path, const FdSchedule& s) {
  const double t0 = 0.2;
  const Mat2d g = path.g(t0);
  const Mat2d sig = path.gdot(t0);
  const EdgeFrame f2 = edge_frame(g, path.da);
  const EdgeFrame f1 = edge_frame(g, {-path.db[0], -path.db[1]});
  const double exact = 0.5 * (bilinear(sig, f2.n, f2.tau) - bilinear(sig, f1.n, f1.tau));
  CheckResult c;
  c.name = "angledot/" + path.name;
  const FdResult fd = fd_compare([&](double e) { return interior_angle(path.g(t0 + e), path.da, path.db); }, exact, s);
  add_fd(c, fd);
  if (path.expected_sign != 0) {
    const bool sign_ok = exact * path.expected_sign > 0.0;
    c.add("sign_matches", sign_ok ? 1.0 : 0.0);
    c.pass = c.pass && sign_ok;
  }
  return c;
}

std::vector<LinearizationCase> linearization_cases(unsigned seed, int count) {
  std::vector<LinearizationCase> cases;
  const double max_step = FdSchedule{}.steps.front();
  for (int k = 0; k < count; ++k) {
    const int kind = k % 5;
    const int n = 2 + (k / 5) % 2;
    auto mesh = unit_square(n);
    const unsigned sd = seed + 101u * static_cast<unsigned>(k);
    LinearizationCase c;
    c.mesh = mesh;
    int r = 0;
    std::shared_ptr<const TensorField> g;
    switch (kind) {
      case 0:
        r = 0;
        c.name = "piecewise_constant";
        g = std::make_shared<const ReggeField>(random_metric(regge_space(mesh, 0), sd));
        break;
      case 1:
      case 2:
        r = kind;
        c.name = "regge_r" + std::to_string(r);
        g = std::make_shared<const ReggeField>(random_metric(regge_space(mesh, r), sd));
        break;
      case 3:
        r = (k / 5) % 3;
        c.name = "euclidean_r" + std::to_string(r);
        g = std::make_shared<const ConstantTensor>(identity2());
        break;
      default:
        r = 2;
        c.name = "conformal_r2";
        g = std::make_shared<const ReggeField>(
            interp_regge(regge_space(mesh, 2), ClosedFormTensor(mesh, conformal_metric)));
        break;
    }
    auto rs = regge_space(mesh, r);
    const ReggeField raw(rs, random_vector(rs->ndofs(), sd + 1));
    c.sigma = std::make_shared<const ReggeField>(rs, spd_direction_scale(*mesh, *g, raw, max_step) * raw.coeffs());
    auto vs = space(mesh, SpaceKind::Lagrange, r + 1);
    c.v = std::make_shared<const FeFunction>(vs, random_free(*vs, sd + 2));
    c.g = g;
    c.quad_degree = default_form_quad(r);
    c.name += "/n" + std::to_string(n) + "/case" + std::to_string(k);
    cases.push_back(std::move(c));
  }
  return cases;
}

CheckResult check_linearization(const LinearizationCase& lc, const FdSchedule& s, bool flip_normal_jump) {
  const double emax = s.steps.front();
  for (double e : {emax, -emax}) {
    const LinearTensor g(Mat2d{}, {{1.0, lc.g.get()}, {e, lc.sigma.get()}});
    const MetricCheck mc = is_metric(g, *lc.mesh);
    if (!mc.ok) throw std::invalid_argument("check_linearization: g + e sigma is not a metric at " + mc.location());
  }
  const FormContext ctx{*lc.mesh, *lc.g, lc.quad_degree, flip_normal_jump};
  const double exact = 0.5 * bh_direct(ctx, *lc.sigma, *lc.v);
  CheckResult c;
  c.name = std::string(flip_normal_jump ? "linearization_flipped/" : "linearization/") + lc.name;
  add_fd(c,
         fd_compare(
             [&](double e) {
               const LinearTensor g(Mat2d{}, {{1.0, lc.g.get()}, {e, lc.sigma.get()}});
               return apply(distributional_curvature_load(*lc.mesh, g, lc.quad_degree), *lc.v);
             },
             exact, s));
  return c;
}

CheckResult check_guise(int n, int r, unsigned seed, double tol) {
  auto mesh = unit_square(n);
  auto rs = regge_space(mesh, r);
  const ReggeField g = random_metric(rs, seed);
  const ReggeField sigma(rs, random_vector(rs->ndofs(), seed + 1));
  auto vs = space(mesh, SpaceKind::Lagrange, r + 1);
  auto ws = space(mesh, SpaceKind::Edge, r + 1);
  const FeFunction v(vs, random_free(*vs, seed + 2));
  const FeOneForm a(ws, random_free(*ws, seed + 3));
  const FormContext ctx{*mesh, g, default_form_quad(r)};
  const double bd = bh_direct(ctx, sigma, v), bi = bh_ibp(ctx, sigma, v);
  const double cd = ch_direct(ctx, sigma, a), ci = ch_ibp(ctx, sigma, a);
  CheckResult c;
  c.name = "guise/n" + std::to_string(n) + "/r" + std::to_string(r) + "/seed" + std::to_string(seed);
  c.add("bh_direct", bd);
  c.add("bh_ibp", bi);
  c.add("bh_rel", rel(bd, bi));
  c.add("ch_direct", cd);
  c.add("ch_ibp", ci);
  c.add("ch_rel", rel(cd, ci));
  c.add("tolerance", tol);
  c.pass = rel(bd, bi) <= tol && rel(cd, ci) <= tol;
  return c;
}

CheckResult check_commuting_divergence(int n, int r, unsigned seed, double tol) {
  auto mesh = unit_square(n);
  const ReggeField g = random_metric(regge_space(mesh, r), seed);
  auto vs = space(mesh, SpaceKind::Lagrange, r + 1);
  auto ws = space(mesh, SpaceKind::Edge, r + 1);
  const int qd = default_form_quad(r);
  const SparseSpd mv(restrict_free(mass_matrix(*vs, g, qd), *vs, *vs));
  const SparseSpd mw(restrict_free(mass_matrix(*ws, g, qd), *ws, *ws));
  const SparseMatrix d0 = restrict_free(d0_matrix(*vs, *ws), *ws, *vs);
  double worst = 0.0;
  for (unsigned k = 0; k < 5; ++k) {
    const Eigen::VectorXd f = random_vector(ws->num_free(), seed + 10 + k);
    // div_h of the g-projection of F against the projection of the distributional divergence of F
    const Eigen::VectorXd proj = mw.solve(f);
    const Eigen::VectorXd lhs = mv.solve(-(d0.transpose() * (mw.matrix() * proj)));
    const Eigen::VectorXd rhs = mv.solve(-(d0.transpose() * f));
    worst = std::max(worst, rel_vec(lhs, rhs));
  }
  CheckResult c;
  c.name = "commuting/divergence/n" + std::to_string(n) + "/r" + std::to_string(r);
  c.add("max_rel_error", worst);
  c.add("tolerance", tol);
  c.pass = worst <= tol;
  return c;
}

CheckResult check_commuting_divdiv(int n, int r, unsigned seed, double tol) {
  auto mesh = unit_square(n);
  const std::vector<Mat2d> gbar = perturbed_flat_metric(*mesh, seed, 0.05);
  const PiecewiseConstantTensor g(gbar);
  const ClosedFormTensor sigma(mesh, [](const Jet2& x, const Jet2& y) {
    return SymJet2{2.0 + sin(x + 2.0 * y), x * cos(y), exp(0.5 * x) - y * y};
  });
  auto rs = regge_space(mesh, r);
  auto vs = space(mesh, SpaceKind::Lagrange, r + 1);
  const int qd = 2 * r + 20;
  const ReggeField pis = interp_regge(rs, sigma, &gbar, qd);
  const FormContext ctx{*mesh, g, qd};
  const SparseSpd mv(restrict_free(mass_matrix(*vs, g, qd), *vs, *vs));
  const Eigen::VectorXd lhs = mv.solve(bh_matrix(ctx, *rs, *vs) * pis.coeffs());
  const Eigen::VectorXd rhs = mv.solve(vs->restrict_free(assemble(bh_direct_load(ctx, sigma), *vs)));
  CheckResult c;
  c.name = "commuting/divdiv/n" + std::to_string(n) + "/r" + std::to_string(r);
  c.add("rel_error", rel_vec(lhs, rhs));
  c.add("size", max_abs(rhs));
  c.add("tolerance", tol);
  c.pass = rel_vec(lhs, rhs) <= tol;
  return c;
}

CheckResult check_commuting_deformation(int n, int r, double tol) {
  auto mesh = unit_square(n);
  const VectorFn u = [](const Jet2& x, const Jet2& y) { return std::array<Jet2, 2>{sin(x), sin(y)}; };
  const TensorFn delta = [](const Jet2&, const Jet2&) { return SymJet2{1.0, 0.0, 1.0}; };
  auto rs = regge_space(mesh, r);
  auto us = space(mesh, SpaceKind::LagrangeVector, r + 1);
  const int qd = 2 * r + 14;
  const ConstantTensor d(identity2());
  const ReggeField a = interp_regge(rs, ClosedFormDeformation(mesh, u, delta), nullptr, qd);
  const FeVectorField uh(us, interpolate_vector(*us, ClosedFormOneForm(mesh, u), qd));
  const ReggeField b = interp_regge(rs, DeformationField(uh, d), nullptr, qd);
  CheckResult c;
  c.name = "commuting/deformation/n" + std::to_string(n) + "/r" + std::to_string(r);
  c.add("rel_error", rel_vec(a.coeffs(), b.coeffs()));
  c.add("tolerance", tol);
  c.pass = rel_vec(a.coeffs(), b.coeffs()) <= tol;
  return c;
}

CheckResult check_euclidean_kernel(int n, int r, unsigned seed, double tol) {
  auto mesh = unit_square(n);
  const ConstantTensor delta(identity2());
  auto us = space(mesh, SpaceKind::LagrangeVector, r + 1);
  auto vs = space(mesh, SpaceKind::Lagrange, r + 1);
  const FeVectorField u(us, random_vector(us->ndofs(), seed));
  const DeformationField eps(u, delta);
  const FeFunction v(vs, random_free(*vs, seed + 1));
  const ScalarLoad load = bh_direct_load(FormContext{*mesh, delta, default_form_quad(r)}, eps);
  const double b = apply(load, v);
  CheckResult c;
  c.name = "euclidean_kernel/n" + std::to_string(n) + "/r" + std::to_string(r);
  c.add("bh", b);
  c.add("term_magnitude", apply_magnitude(load, v));
  c.add("tolerance", tol);
  c.pass = std::abs(b) <= tol;
  return c;
}

CheckResult check_kappa_u(int n, int r, unsigned seed, double tol) {
  auto mesh = unit_square(n);
  const ClosedFormTensor g(mesh, conformal_metric);
  const VectorFn u = [](const Jet2& x, const Jet2& y) { return std::array<Jet2, 2>{y, -x}; };
  const ClosedFormDeformation eps(mesh, u, conformal_metric);
  auto vs = space(mesh, SpaceKind::Lagrange, r + 1);
  const FeFunction v(vs, random_free(*vs, seed));
  const int qd = 2 * r + 20;
  const double lhs = bh_direct(FormContext{*mesh, g, qd}, eps, v);
  const TriQuadRule tr = tri_rule(qd);
  double rhs = 0.0, mag = 0.0;
  for (int t = 0; t < mesh->num_triangles(); ++t)
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      const MetricJet gj = g.tensor_jet(t, tr.points[q]);
      const Vec2d x = mesh->point(t, tr.points[q]);
      const Vec2d dv = v.scalar_jet(t, tr.points[q]).grad;
      const double term = tr.weights[q] * mesh->area(t) * std::sqrt(det2(gj.val)) * gauss_curvature(gj) *
                          (dv[0] * x[1] - dv[1] * x[0]);
      rhs -= term;
      mag += std::abs(term);
    }
  CheckResult c;
  c.name = "kappa_u/n" + std::to_string(n) + "/r" + std::to_string(r);
  c.add("bh", lhs);
  c.add("minus_kappa_dv_u", rhs);
  c.add("rel_error", rel(lhs, rhs));
  c.add("term_magnitude", mag);
  c.add("tolerance", tol);
  // Both sides can cancel to round-off by symmetry; then the relative error carries no information.
  const bool roundoff = std::max(std::abs(lhs), std::abs(rhs)) <= 1e-13 * mag;
  c.add("roundoff_level", roundoff ? 1.0 : 0.0);
  c.pass = rel(lhs, rhs) <= tol || (roundoff && std::abs(lhs - rhs) <= 1e-13 * mag);
  return c;
}

CheckResult check_complex_exactness(int n, int r, unsigned seed, double tol) {
  auto mesh = unit_square(n);
  auto vs = space(mesh, SpaceKind::Lagrange, r + 1);
  auto ws = space(mesh, SpaceKind::Edge, r + 1);
  auto xs = space(mesh, SpaceKind::TwoForm, r);
  const Eigen::MatrixXd d0 = dense(restrict_free(d0_matrix(*vs, *ws), *ws, *vs));
  const SparseMatrix d1full = d1_matrix(*ws, *xs);
  Eigen::MatrixXd d1(xs->ndofs(), ws->num_free());
  const Eigen::MatrixXd d1d = dense(d1full);
  for (int j = 0; j < ws->num_free(); ++j) d1.col(j) = d1d.col(ws->free_dofs()[j]);
  const double prod = (d1 * d0).cwiseAbs().maxCoeff();
  const double scale = d1.cwiseAbs().maxCoeff() * d0.cwiseAbs().maxCoeff();
  const int rank0 = dense_rank(d0), rank1 = dense_rank(d1);
  const int dim_v = vs->num_free(), dim_w = ws->num_free(), dim_x = xs->ndofs();
  // Discretely co-closed loads on W (annihilating d V) against the range of the transpose of d1.
  const Eigen::VectorXd f = random_vector(dim_w, seed);
  const Eigen::VectorXd closed = f - d0 * d0.colPivHouseholderQr().solve(f);
  const Eigen::VectorXd y = d1.transpose().colPivHouseholderQr().solve(closed);
  const double coexact_residual = (d1.transpose() * y - closed).norm() / std::max(closed.norm(), 1e-300);
  CheckResult c;
  c.name = "complex/n" + std::to_string(n) + "/r" + std::to_string(r);
  c.add("d1d0_max", prod);
  c.add("d1d0_rel", prod / scale);
  c.add("dim_v", dim_v);
  c.add("dim_w", dim_w);
  c.add("dim_x", dim_x);
  c.add("rank_d0", rank0);
  c.add("rank_d1", rank1);
  c.add("nullity_d0", dim_v - rank0);
  c.add("nullity_d1", dim_w - rank1);
  c.add("coexact_residual", coexact_residual);
  std::ostringstream os;
  const bool d1d0 = prod <= tol * scale;
  const bool inj = dim_v - rank0 == 0;
  const bool onto = rank1 == dim_x;
  const bool middle = dim_w - rank1 == rank0;
  const bool coexact = coexact_residual <= 1e-10;
  if (!d1d0) os << "d1 d0 is not zero; ";
  if (!inj) os << "d0 has a kernel; ";
  if (!onto) os << "rank d1 = " << rank1 << " but dim X = " << dim_x << "; ";
  if (!middle) os << "dim ker d1 differs from rank d0; ";
  if (!coexact) os << "a co-closed load is not co-exact; ";
  c.detail = os.str();
  if (c.detail.size() >= 2) c.detail.resize(c.detail.size() - 2);
  c.pass = d1d0 && inj && onto && middle && coexact;
  return c;
}

CheckResult check_discrete_curvature(int n, int r, double tol) {
  auto mesh = unit_square(n);
  const ReggeField gh = interp_regge(regge_space(mesh, r), ClosedFormTensor(mesh, conformal_metric));
  auto vs = space(mesh, SpaceKind::Lagrange, r + 1);
  const int qd = default_form_quad(r);
  const FeFunction k1 = discrete_curvature(gh, vs, qd);
  const Eigen::VectorXd k2 =
      project_functional(Functional{vs, assemble(curvature_path_load(*mesh, gh, qd), *vs)}, gh, qd);
  CheckResult c;
  c.name = "discrete_curvature/n" + std::to_string(n) + "/r" + std::to_string(r);
  c.add("rel_error", rel_vec(k1.coeffs(), k2));
  c.add("size", max_abs(k2));
  c.add("tolerance", tol);
  c.pass = rel_vec(k1.coeffs(), k2) <= tol;
  return c;
}

CheckResult check_connection_compatibility(int n, int r, unsigned seed, double tol, double gauge_tol) {
  auto mesh = unit_square(n);
  const ReggeField gh = interp_regge(regge_space(mesh, r), ClosedFormTensor(mesh, conformal_metric));
  auto vs = space(mesh, SpaceKind::Lagrange, r + 1);
  auto ws = space(mesh, SpaceKind::Edge, r + 1);
  auto xs = space(mesh, SpaceKind::TwoForm, r);
  const int qd = default_form_quad(r);
  const FeFunction kh = discrete_curvature(gh, vs, qd);
  const ConnectionOneForm gam = canonical_connection(gh, ws, ConnectionTarget::Discrete, qd);
  const SparseMatrix mv = mass_matrix(*vs, gh, qd);
  const SparseMatrix mw = mass_matrix(*ws, gh, qd);
  const SparseMatrix d0 = d0_matrix(*vs, *ws);
  double worst = 0.0;
  for (unsigned k = 0; k < 20; ++k) {
    const Eigen::VectorXd v = random_free(*vs, seed + k);
    const double a = gam.discrete->coeffs().dot(mw * (d0 * v));
    const double b = kh.coeffs().dot(mv * v);
    worst = std::max(worst, std::abs(a + b) / std::max(std::abs(b), 1e-300));
  }
  // A co-exact load d^T M_X f shifts the connection without changing its pairing with exact forms.
  const SparseMatrix d1 = d1_matrix(*ws, *xs);
  const SparseMatrix mx = mass_matrix(*xs, gh, qd);
  const Eigen::VectorXd f = random_vector(xs->ndofs(), seed + 100);
  const Eigen::VectorXd gauge = -(d1.transpose() * (mx * f));
  const Eigen::VectorXd shift = project_functional(Functional{ws, ws->extend_free(ws->restrict_free(gauge))}, gh, qd);
  double gauge_worst = 0.0;
  for (unsigned k = 0; k < 5; ++k) {
    const Eigen::VectorXd dv = d0 * random_free(*vs, seed + 200 + k);
    const double a = gam.discrete->coeffs().dot(mw * dv);
    const double b = (gam.discrete->coeffs() + shift).dot(mw * dv);
    gauge_worst = std::max(gauge_worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  CheckResult c;
  c.name = "connection_compatibility/n" + std::to_string(n) + "/r" + std::to_string(r);
  c.add("max_rel_compatibility", worst);
  c.add("max_gauge_change", gauge_worst);
  c.add("gauge_shift_norm", shift.norm());
  c.add("tolerance", tol);
  c.add("gauge_tolerance", gauge_tol);
  c.pass = worst <= tol && gauge_worst <= gauge_tol && shift.norm() > 0.0;
  return c;
}

CheckResult check_cone_decomposition() {
  std::vector<Vec2d> pts{{0.0, 0.0}};
  for (int k = 0; k < 5; ++k) pts.push_back({std::cos(2 * kPi * k / 5), std::sin(2 * kPi * k / 5)});
  std::vector<std::array<int, 3>> tris;
  for (int k = 0; k < 5; ++k) tris.push_back({0, 1 + k, 1 + (k + 1) % 5});
  auto fan = std::make_shared<const Mesh>(std::move(pts), std::move(tris));
  const PiecewiseConstantTensor cone(metric_from_edge_lengths(*fan, std::vector<double>(fan->num_edges(), 1.0)));
  auto v1 = space(fan, SpaceKind::Lagrange, 1);
  Eigen::VectorXd hat = Eigen::VectorXd::Zero(v1->ndofs());
  hat[0] = 1.0;
  const FeFunction apex(v1, hat);
  const CurvatureReport r = distributional_curvature(*fan, cone, apex, 6);
  double others = 0.0;
  for (double x : r.triangle) others = std::max(others, std::abs(x));
  for (double x : r.edge) others = std::max(others, std::abs(x));
  CheckResult c;
  c.name = "decomposition/cone";
  c.add("apex_defect", r.angle_defect[0]);
  c.add("apex_defect_error", std::abs(r.angle_defect[0] - kPi / 3));
  c.add("total_error", std::abs(r.total - kPi / 3));
  c.add("max_triangle_edge", others);
  c.pass = std::abs(r.angle_defect[0] - kPi / 3) <= 1e-13 && std::abs(r.total - kPi / 3) <= 1e-13 && others <= 1e-13;
  return c;
}

CheckResult check_flat_reports(unsigned seed) {
  auto mesh = unit_square(3);
  auto vs = space(mesh, SpaceKind::Lagrange, 3);
  const FeFunction v(vs, random_free(*vs, seed));
  const ConstantTensor delta(identity2());
  const ConstantTensor skew({{{2.0, 0.5}, {0.5, 1.0}}});
  const ReggeField interp = interp_regge(regge_space(mesh, 1), skew);
  double worst = 0.0;
  for (const TensorField* g : {static_cast<const TensorField*>(&delta), static_cast<const TensorField*>(&skew),
                               static_cast<const TensorField*>(&interp)}) {
    const CurvatureReport r = distributional_curvature(*mesh, *g, v, 8);
    for (const auto* part : {&r.triangle, &r.edge, &r.vertex})
      for (double x : *part) worst = std::max(worst, std::abs(x));
  }
  CheckResult c;
  c.name = "decomposition/flat";
  c.add("max_entry", worst);
  c.pass = worst <= 1e-13;
  return c;
}

}  // namespace regge
