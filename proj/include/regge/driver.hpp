#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "regge/fields.hpp"
#include "regge/verify.hpp"

namespace regge {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MetricSpec {
  std::string id = "conformal";  // conformal | graph
  double amplitude = 0.2;        // a in a sin(pi x) sin(pi y)
};

// Verification groups run by run_verify.
inline const std::vector<std::string>& verify_groups() {
  static const std::vector<std::string> g{"evolution", "linearization", "guise",    "commuting",    "kernel",
                                          "complex",   "discrete",      "decomposition", "mutation"};
  return g;
}

struct ExperimentConfig {
  MetricSpec metric;
  std::vector<int> degrees{1, 2};
  std::vector<int> levels{4, 8, 16, 32};
  int quad_degree_boost = 0;
  int enrich_degree = 3;  // dual-norm test spaces have degree r + enrich_degree
  unsigned seed = 1;
  std::string out;
  std::vector<std::string> checks = verify_groups();
  void validate() const;
};

// Throws ConfigError on malformed JSON, unknown keys, or invalid values.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Smooth metric on the unit square with closed-form Gauss curvature.
struct ManufacturedMetric {
  MetricSpec spec;
  TensorFn metric;
  std::function<double(const Vec2d&)> kappa;
  // Largest deviation of kappa from the curvature of the metric jets on a sample grid.
  double kappa_deviation(int samples_per_axis = 7) const;
  // Throws std::logic_error when the deviation exceeds tol.
  void validate(double tol = 1e-10) const;
};

// phi = a sin(pi x) sin(pi y). conformal: exp(2 phi) delta. graph: delta + d phi d phi.
ManufacturedMetric make_metric(const MetricSpec& spec);

struct ConvergenceRow {
  int r = 0;
  int n = 0;
  double h = 0.0;
  double e_kappa_dual = 0.0;
  double rate_kappa = 0.0;  // NaN on the first level of a degree
  double e_conn_dual = 0.0;
  double rate_conn = 0.0;
  double e_kappa_l2 = 0.0;
  int time_panels = 0;
  bool skipped = false;
  std::string note;
};

// One row per (degree, level). Levels where the interpolant is not a metric are marked skipped.
std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg, std::ostream* log = nullptr);
void write_csv(const std::vector<ConvergenceRow>& rows, std::ostream& os);
// Gnuplot script plotting both dual-norm errors against h from the CSV at csv_path.
void write_plot_script(const std::string& csv_path, std::ostream& os);

VerifyReport run_verify(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace regge
