#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regge/fespace.hpp"
#include "regge/fields.hpp"
#include "regge/forms.hpp"
#include "regge/load.hpp"

namespace regge {

class TimeQuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimeQuadOptions {
  double rel_tol = 1e-10;
  int max_panels = 1024;
};

struct TimeQuadInfo {
  int panels = 0;
  int evaluations = 0;
  double estimated_error = 0.0;  // relative change of the last panel doubling
  std::vector<double> nodes;     // nodes of the accepted rule
};

// Integral over [0, 1] of a vector-valued function by composite 5-point Gauss-Legendre panels,
// doubling the panel count until the relative change is at most rel_tol.
std::vector<double> integrate_in_time(const std::function<std::vector<double>(double)>& f,
                                      const TimeQuadOptions& opt = {}, TimeQuadInfo* info = nullptr);

// Same for loads whose point layout does not depend on t.
template <int K>
PointLoad<K> integrate_load_in_time(const std::function<PointLoad<K>(double)>& f, const TimeQuadOptions& opt = {},
                                    TimeQuadInfo* info = nullptr) {
  PointLoad<K> shape;
  bool have = false;
  std::vector<double> c = integrate_in_time(
      [&](double t) {
        PointLoad<K> l = f(t);
        if (!have) {
          shape = l;
          have = true;
        } else if (!shape.same_layout(l)) {
          throw std::logic_error("time-dependent load changed its point layout");
        }
        return l.coefficients();
      },
      opt, info);
  shape.coefficients() = std::move(c);
  return shape;
}

// Angle defect 2 pi minus the sum of the interior angles at interior vertex z, each measured by the
// metric of its own triangle.
double angle_defect(const Mesh& mesh, const TensorField& g, int z);
// Sum of the two one-sided geodesic curvatures of interior edge e at global parameter s in [0, 1].
double jump_geodesic(const Mesh& mesh, const TensorField& g, int e, double s);

// Load of the distributional curvature: Gauss curvature on triangles, geodesic-curvature jumps on
// edges with an interior endpoint, and angle defects at interior vertices.
ScalarLoad distributional_curvature_load(const Mesh& mesh, const TensorField& g, int quad_degree);
// Triangle terms only, for a smooth metric: v -> integral of kappa v omega.
ScalarLoad smooth_curvature_load(const Mesh& mesh, const TensorField& g, int quad_degree);

struct CurvatureReport {
  std::vector<double> triangle;      // integral of kappa v omega per triangle
  std::vector<double> edge;          // integral of the geodesic-curvature jump times v per edge
  std::vector<double> angle_defect;  // per vertex; zero on the boundary
  std::vector<double> vertex;        // angle defect times v(z)
  double triangle_sum = 0.0;
  double edge_sum = 0.0;
  double vertex_sum = 0.0;
  double total = 0.0;
  std::string to_json() const;
};

CurvatureReport distributional_curvature(const Mesh& mesh, const TensorField& g, const ScalarField& v,
                                         int quad_degree);

// Path form of the curvature load: 1/2 integral of b_h((1 - t) delta + t g; g - delta, .) over t.
ScalarLoad curvature_path_load(const Mesh& mesh, const TensorField& g, int quad_degree,
                               const TimeQuadOptions& opt = {}, TimeQuadInfo* info = nullptr);

// Discrete Gaussian curvature: the member of v whose g-weighted L2 pairing reproduces the
// distributional curvature on all free test functions.
FeFunction discrete_curvature(const TensorField& g, std::shared_ptr<const FeSpace> v, int quad_degree);

enum class ConnectionTarget { Distributional, Discrete };

struct ConnectionOneForm {
  Functional functional;               // action on the edge space
  std::optional<FeOneForm> discrete;   // present for the discrete target
  OneFormLoad load;                    // pointwise form of the functional
  TimeQuadInfo time;
};

// Connection load -1/2 integral of c_h((1 - t) delta + t g; g - delta, .) over t.
OneFormLoad connection_path_load(const Mesh& mesh, const TensorField& g, int quad_degree,
                                 const TimeQuadOptions& opt = {}, TimeQuadInfo* info = nullptr);
ConnectionOneForm canonical_connection(const TensorField& g, std::shared_ptr<const FeSpace> w,
                                       ConnectionTarget target, int quad_degree, const TimeQuadOptions& opt = {});

// Integrand -1/2 *div S(g - delta) at time t, operators under (1 - t) delta + t g. Uses first derivatives.
Vec2d reference_connection_integrand(const TensorJet& g, double t);
// Smooth connection one-form A(g), the integral of the above over t, at one point.
Vec2d reference_connection_form(const TensorJet& g, const TimeQuadOptions& opt = {});
// Load of alpha -> integral of <*A(g), alpha>_g omega(g).
OneFormLoad reference_connection_load(const Mesh& mesh, const TensorField& g, int quad_degree,
                                      const TimeQuadOptions& opt = {});

}  // namespace regge
