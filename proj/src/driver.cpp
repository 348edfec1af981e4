#include "regge/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "regge/curvature.hpp"
#include "regge/forms.hpp"
#include "regge/geom.hpp"
#include "regge/linalg.hpp"
#include "regge/load.hpp"
#include "regge/polyquad.hpp"
#include "regge/regge.hpp"

namespace regge {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (metric.id != "conformal" && metric.id != "graph")
    throw ConfigError("metric.id must be 'conformal' or 'graph', got '" + metric.id + "'");
  if (!std::isfinite(metric.amplitude) || std::abs(metric.amplitude) > 1.0)
    throw ConfigError("metric.params.amplitude must be finite with magnitude at most 1");
  if (degrees.empty()) throw ConfigError("degrees must not be empty");
  for (int r : degrees)
    if (r < 0 || r > 3) throw ConfigError("degrees must lie in {0, 1, 2, 3}");
  if (levels.size() < 2) throw ConfigError("at least two mesh levels are needed for rates");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) throw ConfigError("mesh levels must be positive");
    if (i > 0 && levels[i] <= levels[i - 1]) throw ConfigError("mesh levels must increase");
  }
  if (quad_degree_boost < 0 || quad_degree_boost > 20) throw ConfigError("quad_degree_boost must lie in [0, 20]");
  if (enrich_degree < 1 || enrich_degree > 6) throw ConfigError("enrich_degree must lie in [1, 6]");
  for (const std::string& c : checks)
    if (std::find(verify_groups().begin(), verify_groups().end(), c) == verify_groups().end())
      throw ConfigError("unknown verification group '" + c + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"metric", "degrees", "levels", "quad_degree_boost",
                                           "enrich_degree", "seed", "out", "checks"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  ExperimentConfig c;
  if (j.contains("metric")) {
    const auto& m = j["metric"];
    if (!m.is_object()) throw ConfigError("config key 'metric' must be an object");
    for (const auto& [k, v] : m.items())
      if (k != "id" && k != "params") throw ConfigError("unknown metric key '" + k + "'");
    if (m.contains("id")) c.metric.id = get_as<std::string>(m["id"], "metric.id");
    if (m.contains("params")) {
      const auto& p = m["params"];
      if (!p.is_object()) throw ConfigError("config key 'metric.params' must be an object");
      for (const auto& [k, v] : p.items())
        if (k != "amplitude") throw ConfigError("unknown metric parameter '" + k + "'");
      if (p.contains("amplitude")) c.metric.amplitude = get_as<double>(p["amplitude"], "metric.params.amplitude");
    }
  }
  if (j.contains("degrees")) c.degrees = get_as<std::vector<int>>(j["degrees"], "degrees");
  if (j.contains("levels")) c.levels = get_as<std::vector<int>>(j["levels"], "levels");
  if (j.contains("quad_degree_boost")) c.quad_degree_boost = get_as<int>(j["quad_degree_boost"], "quad_degree_boost");
  if (j.contains("enrich_degree")) c.enrich_degree = get_as<int>(j["enrich_degree"], "enrich_degree");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("config key 'seed' must be a non-negative integer");
    c.seed = j["seed"].get<unsigned>();
  }
  if (j.contains("out")) c.out = get_as<std::string>(j["out"], "out");
  if (j.contains("checks")) c.checks = get_as<std::vector<std::string>>(j["checks"], "checks");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

double ManufacturedMetric::kappa_deviation(int samples) const {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i)
    for (int k = 0; k < samples; ++k) {
      const Vec2d x{(i + 0.5) / samples, (k + 0.37) / samples};
      const TensorJet gj = to_tensor_jet(metric(Jet2::coordinate(x[0], 0), Jet2::coordinate(x[1], 1)));
      worst = std::max(worst, std::abs(gauss_curvature(gj) - kappa(x)));
    }
  return worst;
}

void ManufacturedMetric::validate(double tol) const {
  const double d = kappa_deviation();
  if (!(d <= tol)) {
    std::ostringstream os;
    os << "closed-form curvature of the '" << spec.id << "' metric deviates from the metric jets by " << d;
    throw std::logic_error(os.str());
  }
}

ManufacturedMetric make_metric(const MetricSpec& spec) {
  const double a = spec.amplitude;
  ManufacturedMetric m;
  m.spec = spec;
  auto phi = [a](const Jet2& x, const Jet2& y) { return a * sin(kPi * x) * sin(kPi * y); };
  if (spec.id == "conformal") {
    m.metric = [phi](const Jet2& x, const Jet2& y) {
      const Jet2 c = exp(2.0 * phi(x, y));
      return SymJet2{c, Jet2(0.0), c};
    };
    // kappa = -exp(-2 phi) Laplacian(phi), Laplacian(phi) = -2 pi^2 phi
    m.kappa = [a](const Vec2d& x) {
      const double p = a * std::sin(kPi * x[0]) * std::sin(kPi * x[1]);
      return 2.0 * kPi * kPi * p * std::exp(-2.0 * p);
    };
  } else if (spec.id == "graph") {
    // Jets of the partial derivatives of f are built directly so that g carries its own 2-jet.
    m.metric = [a](const Jet2& x, const Jet2& y) {
      const Jet2 fx = a * kPi * cos(kPi * x) * sin(kPi * y);
      const Jet2 fy = a * kPi * sin(kPi * x) * cos(kPi * y);
      return SymJet2{1.0 + fx * fx, fx * fy, 1.0 + fy * fy};
    };
    // kappa = det Hess f / (1 + |grad f|^2)^2
    m.kappa = [a](const Vec2d& x) {
      const double sx = std::sin(kPi * x[0]), cx = std::cos(kPi * x[0]);
      const double sy = std::sin(kPi * x[1]), cy = std::cos(kPi * x[1]);
      const double k2 = a * kPi * kPi;
      const double fxx = -k2 * sx * sy, fyy = -k2 * sx * sy, fxy = k2 * cx * cy;
      const double fx = a * kPi * cx * sy, fy = a * kPi * sx * cy;
      const double q = 1.0 + fx * fx + fy * fy;
      return (fxx * fyy - fxy * fxy) / (q * q);
    };
  } else {
    throw ConfigError("unknown metric id '" + spec.id + "'");
  }
  return m;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const ManufacturedMetric mm = make_metric(cfg.metric);
  mm.validate();
  std::vector<ConvergenceRow> rows;
  for (int r : cfg.degrees) {
    double prev_k = std::numeric_limits<double>::quiet_NaN();
    double prev_c = prev_k, prev_h = prev_k;
    for (int n : cfg.levels) {
      ConvergenceRow row;
      row.r = r;
      row.n = n;
      auto mesh = std::make_shared<const Mesh>(Mesh::build_structured({}, n));
      row.h = mesh->h();
      const ClosedFormTensor g(mesh, mm.metric);
      const ReggeField gh = interp_regge(regge_space(mesh, r), g);
      const MetricCheck mc = is_metric(gh, *mesh);
      if (!mc.ok) {
        row.skipped = true;
        row.note = "interpolant is not positive definite at " + mc.location();
        row.e_kappa_dual = row.e_conn_dual = row.e_kappa_l2 = row.rate_kappa = row.rate_conn =
            std::numeric_limits<double>::quiet_NaN();
        if (log) *log << "r=" << r << " n=" << n << " skipped: " << row.note << "\n";
        rows.push_back(row);
        continue;
      }
      const int qd = default_form_quad(r) + cfg.quad_degree_boost;
      const int qref = qd + 2;
      auto ve = std::make_shared<const FeSpace>(mesh, SpaceKind::Lagrange, r + cfg.enrich_degree);
      auto we = std::make_shared<const FeSpace>(mesh, SpaceKind::Edge, r + cfg.enrich_degree);
      const DualNormContext dv(ve), dw(we);
      const Eigen::VectorXd fk = assemble(distributional_curvature_load(*mesh, gh, qd), *ve) -
                                 assemble(smooth_curvature_load(*mesh, g, qref), *ve);
      TimeQuadInfo info;
      const Eigen::VectorXd fc = assemble(connection_path_load(*mesh, gh, qd, {}, &info), *we) -
                                 assemble(reference_connection_load(*mesh, g, qref), *we);
      row.e_kappa_dual = dv.norm(fk);
      row.e_conn_dual = dw.norm(fc);
      row.time_panels = info.panels;
      // L2 error of the discrete curvature in the exact metric
      auto vs = std::make_shared<const FeSpace>(mesh, SpaceKind::Lagrange, r + 1);
      const FeFunction kh = discrete_curvature(gh, vs, qd);
      const TriQuadRule tr = tri_rule(qref);
      double l2 = 0.0;
      for (int t = 0; t < mesh->num_triangles(); ++t)
        for (std::size_t q = 0; q < tr.points.size(); ++q) {
          const double d = kh.scalar_jet(t, tr.points[q]).val - mm.kappa(mesh->point(t, tr.points[q]));
          l2 += tr.weights[q] * mesh->area(t) * std::sqrt(det2(g.tensor_jet(t, tr.points[q]).val)) * d * d;
        }
      row.e_kappa_l2 = std::sqrt(l2);
      row.rate_kappa = std::log(prev_k / row.e_kappa_dual) / std::log(prev_h / row.h);
      row.rate_conn = std::log(prev_c / row.e_conn_dual) / std::log(prev_h / row.h);
      prev_k = row.e_kappa_dual;
      prev_c = row.e_conn_dual;
      prev_h = row.h;
      if (log) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "r=%d n=%3d h=%.4e E_kappa=%.4e rate=%6.3f E_conn=%.4e rate=%6.3f E_L2=%.4e\n", r,
                      n, row.h, row.e_kappa_dual, row.rate_kappa, row.e_conn_dual, row.rate_conn, row.e_kappa_l2);
        *log << buf << std::flush;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_csv(const std::vector<ConvergenceRow>& rows, std::ostream& os) {
  os << "r,n,h,E_kappa_dual,rate_kappa,E_conn_dual,rate_conn,E_kappa_L2\n";
  for (const ConvergenceRow& w : rows)
    os << w.r << ',' << w.n << ',' << fmt(w.h) << ',' << fmt(w.e_kappa_dual) << ',' << fmt(w.rate_kappa) << ','
       << fmt(w.e_conn_dual) << ',' << fmt(w.rate_conn) << ',' << fmt(w.e_kappa_l2) << '\n';
}

void write_plot_script(const std::string& csv_path, std::ostream& os) {
  os << "# gnuplot -persist this_file\n"
     << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set xlabel 'h'\n"
     << "set ylabel 'dual-norm error'\n"
     << "set key left top\n"
     << "csv = '" << csv_path << "'\n"
     << "plot for [r=0:3] csv using (column(1) == r ? column(3) : 1/0):4 skip 1 with linespoints title sprintf('curvature r=%d', r), \\\n"
     << "     for [r=0:3] csv using (column(1) == r ? column(3) : 1/0):6 skip 1 with linespoints dashtype 2 title sprintf('connection r=%d', r)\n";
}

VerifyReport run_verify(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const unsigned seed = cfg.seed;
  auto wants = [&](const char* g) { return std::find(cfg.checks.begin(), cfg.checks.end(), g) != cfg.checks.end(); };
  VerifyReport rep;
  auto add = [&](CheckResult c) {
    if (log) *log << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
    rep.append(std::move(c));
  };
  if (wants("evolution")) {
    const ScalarFn v = [](const Jet2& x, const Jet2& y) { return 1.0 + 0.5 * x - y * y + x * y; };
    for (const TensorPath& p : path_catalog()) {
      add(check_kappavoldot(p, v));
      add(check_klengthdot(p, v));
    }
    for (int r = 0; r <= 2; ++r) add(check_klengthdot_jump(r, seed + r));
    for (const AnglePath& a : angle_catalog()) add(check_angledot(a));
  }
  if (wants("linearization"))
    for (const LinearizationCase& c : linearization_cases(seed, 20)) add(check_linearization(c));
  if (wants("mutation")) {
    // The linearization check must reject b_h with reversed normal-derivative terms.
    const auto cases = linearization_cases(seed, 3);
    CheckResult m = check_linearization(cases[1], {}, true);
    m.name = "mutation/" + m.name;
    m.detail = m.pass ? "flipped normal-derivative terms were not detected" : "";
    m.pass = !m.pass;
    add(m);
  }
  if (wants("guise"))
    for (int n : {2, 4})
      for (int r = 1; r <= 2; ++r)
        for (unsigned k = 0; k < 3; ++k) add(check_guise(n, r, seed + 17 * k + 5 * n + r));
  if (wants("commuting"))
    for (int n : {2, 4})
      for (int r = 0; r <= 2; ++r) {
        add(check_commuting_divergence(n, r, seed));
        add(check_commuting_divdiv(n, r, seed));
        add(check_commuting_deformation(n, r));
      }
  if (wants("kernel"))
    for (int n : {2, 4})
      for (int r = 0; r <= 2; ++r) {
        add(check_euclidean_kernel(n, r, seed));
        add(check_kappa_u(n, r, seed));
      }
  if (wants("complex"))
    for (int n : {2, 4})
      for (int r = 0; r <= 2; ++r) add(check_complex_exactness(n, r, seed));
  if (wants("discrete"))
    for (int r = 1; r <= 2; ++r) {
      add(check_discrete_curvature(8, r));
      add(check_connection_compatibility(4, r, seed));
    }
  if (wants("decomposition")) {
    add(check_cone_decomposition());
    add(check_flat_reports(seed));
  }
  return rep;
}

}  // namespace regge
