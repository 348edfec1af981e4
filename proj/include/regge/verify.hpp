#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "regge/fespace.hpp"
#include "regge/fields.hpp"
#include "regge/mesh.hpp"
#include "regge/regge.hpp"

namespace regge {

// Central-difference schedule. Consecutive steps give observed orders; pairs give Richardson values.
struct FdSchedule {
  std::vector<double> steps{1e-2, 5e-3, 2.5e-3};
  double min_order = 1.9;
  double min_richardson_order = 3.8;
  double tolerance = 1e-6;       // relative agreement of the extrapolated derivative
  double abs_tolerance = 1e-12;  // absolute slack for identically vanishing derivatives
  void validate() const;
};

struct FdResult {
  std::vector<double> derivatives;  // central differences, one per step
  std::vector<double> errors;       // |difference - exact|
  std::vector<double> orders;       // observed orders from consecutive steps
  std::vector<double> richardson;   // extrapolated derivatives from consecutive steps
  double exact = 0.0;
  double richardson_error = 0.0;    // relative error of the last extrapolated value
  double richardson_order = 0.0;    // observed order of the extrapolated values
  bool order_gated = false;         // false when the errors sit at the round-off floor
  bool richardson_order_gated = false;
  bool pass = false;
};

// Compares the central differences of f at 0 with the exact derivative.
FdResult fd_compare(const std::function<double(double)>& f, double exact, const FdSchedule& s);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::vector<std::pair<std::string, double>> values;
  std::string detail;
  void add(const std::string& key, double value) { values.emplace_back(key, value); }
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool pass() const;
  int failures() const;
  void append(const VerifyReport& other);
  void append(CheckResult c) { checks.push_back(std::move(c)); }
  std::string to_json() const;
};

// Deterministic random data.
Eigen::VectorXd random_vector(int n, unsigned seed, double scale = 1.0);
// Random member of a space with constrained coefficients set to zero.
Eigen::VectorXd random_free(const FeSpace& s, unsigned seed);
// delta plus a random Regge perturbation whose sampled pointwise Frobenius size is scale.
ReggeField random_metric(std::shared_ptr<const FeSpace> s, unsigned seed, double scale = 0.15);
// Factor c giving c sigma unit size relative to the smallest eigenvalue of g, reduced if needed so that
// g + e c sigma keeps half of that eigenvalue for |e| <= max_step.
double spd_direction_scale(const Mesh& mesh, const TensorField& g, const TensorField& sigma, double max_step);

// Smooth metric family g(t) given with its exact time derivative.
using TensorPathFn = std::function<SymJet2(const Jet2& x, const Jet2& y, double t)>;
struct TensorPath {
  std::string name;
  TensorPathFn g;
  TensorPathFn gdot;
  double t0 = 0.0;
};
// delta, (1 + t) delta, exp(2 t phi) delta for a harmonic and a non-harmonic phi, delta + t A.
std::vector<TensorPath> path_catalog();

// d/dt of the integral of v kappa omega over one triangle against 1/2 the integral of v (div div S sigma) omega.
CheckResult check_kappavoldot(const TensorPath& path, const ScalarFn& v, const FdSchedule& s = {});
// d/dt of the integral of v k ds along one straight boundary edge of a triangle.
CheckResult check_klengthdot(const TensorPath& path, const ScalarFn& v, const FdSchedule& s = {});
// Same for the geodesic-curvature jump across an interior edge along g + t sigma with Regge data.
CheckResult check_klengthdot_jump(int r, unsigned seed, const FdSchedule& s = {});

using MatrixPathFn = std::function<Mat2d(double t)>;
struct AnglePath {
  std::string name;
  MatrixPathFn g;
  MatrixPathFn gdot;
  Vec2d da, db;     // rays from the vertex; the angle is swept counterclockwise from da to db
  int expected_sign = 0;  // sign of the rate when known by hand, 0 otherwise
};
std::vector<AnglePath> angle_catalog();
CheckResult check_angledot(const AnglePath& path, const FdSchedule& s = {});

struct LinearizationCase {
  std::string name;
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const TensorField> g;
  std::shared_ptr<const TensorField> sigma;
  std::shared_ptr<const ScalarField> v;
  int quad_degree = 0;
};
// Seeded cases over piecewise-constant, degree 1 and degree 2 Regge metrics, plus the
// Euclidean metric and an interpolated conformal metric.
std::vector<LinearizationCase> linearization_cases(unsigned seed, int count);
// Central differences of the distributional curvature against 1/2 b_h(g; sigma, v).
CheckResult check_linearization(const LinearizationCase& c, const FdSchedule& s = {},
                                bool flip_normal_jump = false);

// Direct and integrated forms of b_h and c_h on random data.
CheckResult check_guise(int n, int r, unsigned seed, double tol = 1e-9);

// The three commuting diagrams.
CheckResult check_commuting_divergence(int n, int r, unsigned seed, double tol = 1e-10);
CheckResult check_commuting_divdiv(int n, int r, unsigned seed, double tol = 1e-10);
CheckResult check_commuting_deformation(int n, int r, double tol = 1e-8);

// b_h(delta; eps u, v) = 0 for a random continuous piecewise-polynomial u.
CheckResult check_euclidean_kernel(int n, int r, unsigned seed, double tol = 1e-11);
// b_h(g; eps u, v) = -integral of kappa dv(u) omega for a conformal g and u = (y, -x).
CheckResult check_kappa_u(int n, int r, unsigned seed, double tol = 1e-8);

// Ranks of the complex V -> W -> X with vanishing boundary traces on V and W.
CheckResult check_complex_exactness(int n, int r, unsigned seed, double tol = 1e-12);

// Discrete curvature through the projected functional against the path formula, and connection
// compatibility with invariance under co-exact gauge loads.
CheckResult check_discrete_curvature(int n, int r, double tol = 1e-8);
CheckResult check_connection_compatibility(int n, int r, unsigned seed, double tol = 1e-8,
                                           double gauge_tol = 1e-12);

// Cone from five equilateral triangles, and flat metrics.
CheckResult check_cone_decomposition();
CheckResult check_flat_reports(unsigned seed);

}  // namespace regge
