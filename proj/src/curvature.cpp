#include "regge/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "regge/geom.hpp"
#include "regge/polyquad.hpp"
#include "regge/regge.hpp"

namespace regge {

std::vector<double> integrate_in_time(const std::function<std::vector<double>(double)>& f,
                                      const TimeQuadOptions& opt, TimeQuadInfo* info) {
  const EdgeQuadRule gl = gauss_legendre(5);
  int evaluations = 0;
  auto composite = [&](int panels, std::vector<double>* nodes) {
    std::vector<double> sum;
    const double h = 1.0 / panels;
    for (int p = 0; p < panels; ++p)
      for (std::size_t q = 0; q < gl.points.size(); ++q) {
        const double t = (p + gl.points[q]) * h;
        const std::vector<double> v = f(t);
        ++evaluations;
        if (nodes) nodes->push_back(t);
        if (sum.empty()) sum.assign(v.size(), 0.0);
        if (v.size() != sum.size()) throw std::logic_error("time integrand changed its length");
        const double w = gl.weights[q] * h;
        for (std::size_t i = 0; i < v.size(); ++i) sum[i] += w * v[i];
      }
    return sum;
  };
  auto max_abs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  std::vector<double> nodes;
  std::vector<double> prev = composite(1, nullptr);
  for (int panels = 2; panels <= opt.max_panels; panels *= 2) {
    nodes.clear();
    std::vector<double> cur = composite(panels, &nodes);
    double diff = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) diff = std::max(diff, std::abs(cur[i] - prev[i]));
    const double scale = max_abs(cur);
    const double rel = scale > 0.0 ? diff / scale : 0.0;
    if (rel <= opt.rel_tol) {
      if (info) {
        info->panels = panels;
        info->evaluations = evaluations;
        info->estimated_error = rel;
        info->nodes = nodes;
      }
      return cur;
    }
    prev = std::move(cur);
  }
  std::ostringstream os;
  os << "time quadrature did not reach relative tolerance " << opt.rel_tol << " with " << opt.max_panels
     << " panels";
  throw TimeQuadratureError(os.str());
}

double angle_defect(const Mesh& mesh, const TensorField& g, int z) {
  if (mesh.vertex_on_boundary(z)) throw std::invalid_argument("angle defect requested at a boundary vertex");
  double sum = 0.0;
  for (int t : mesh.star(z)) {
    const int i = mesh.local_vertex(t, z);
    const auto& tri = mesh.triangle(t);
    Bary b{0.0, 0.0, 0.0};
    b[i] = 1.0;
    const Vec2d& p = mesh.vertex(z);
    const Vec2d& a = mesh.vertex(tri[(i + 1) % 3]);
    const Vec2d& c = mesh.vertex(tri[(i + 2) % 3]);
    sum += interior_angle(metric_jet(g, t, b).val, {a[0] - p[0], a[1] - p[1]}, {c[0] - p[0], c[1] - p[1]});
  }
  return 2.0 * std::numbers::pi - sum;
}

double jump_geodesic(const Mesh& mesh, const TensorField& g, int e, double s) {
  const Edge& ed = mesh.edge(e);
  if (ed.tri[1] < 0) throw std::invalid_argument("geodesic-curvature jump requested on a boundary edge");
  double k = 0.0;
  for (int side = 0; side < 2; ++side) {
    const int t = ed.tri[side], i = ed.local[side];
    const double ls = mesh.tri_edge_sign(t, i) > 0 ? s : 1.0 - s;
    k += geodesic_curvature(metric_jet(g, t, Mesh::edge_point(i, ls)), mesh.edge_vector(t, i));
  }
  return k;
}

namespace {

void add_triangle_terms(const Mesh& mesh, const TensorField& g, int quad_degree, ScalarLoad& load) {
  const EntityTags tags(mesh);
  const TriQuadRule tr = tri_rule(quad_degree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.area(t);
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      const MetricJet gj = metric_jet(g, t, tr.points[q]);
      const double w = tr.weights[q] * area * std::sqrt(det2(gj.val));
      load.add(t, tr.points[q], tags.triangle(t), scalar_coef(w * gauss_curvature(gj)));
    }
  }
}

}  // namespace

ScalarLoad smooth_curvature_load(const Mesh& mesh, const TensorField& g, int quad_degree) {
  ScalarLoad load;
  add_triangle_terms(mesh, g, quad_degree, load);
  return load;
}

ScalarLoad distributional_curvature_load(const Mesh& mesh, const TensorField& g, int quad_degree) {
  const EntityTags tags(mesh);
  ScalarLoad load;
  add_triangle_terms(mesh, g, quad_degree, load);
  const EdgeQuadRule er = edge_rule(quad_degree);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int i = 0; i < 3; ++i) {
      const int e = mesh.tri_edge(t, i);
      if (!mesh.edge_has_interior_vertex(e)) continue;
      const Vec2d tv = mesh.edge_vector(t, i);
      for (std::size_t q = 0; q < er.points.size(); ++q) {
        const Bary b = Mesh::edge_point(i, er.points[q]);
        const MetricJet gj = metric_jet(g, t, b);
        const double w = er.weights[q] * std::sqrt(bilinear(gj.val, tv, tv));
        load.add(t, b, tags.edge(e), scalar_coef(w * geodesic_curvature(gj, tv)));
      }
    }
  for (int z = 0; z < mesh.num_vertices(); ++z) {
    if (mesh.vertex_on_boundary(z)) continue;
    const int t = mesh.star(z).front();
    Bary b{0.0, 0.0, 0.0};
    b[mesh.local_vertex(t, z)] = 1.0;
    load.add(t, b, tags.vertex(z), scalar_coef(angle_defect(mesh, g, z)));
  }
  return load;
}

std::string CurvatureReport::to_json() const {
  nlohmann::json j;
  j["triangle"] = triangle;
  j["edge"] = edge;
  j["angle_defect"] = angle_defect;
  j["vertex"] = vertex;
  j["triangle_sum"] = triangle_sum;
  j["edge_sum"] = edge_sum;
  j["vertex_sum"] = vertex_sum;
  j["total"] = total;
  return j.dump(2);
}

CurvatureReport distributional_curvature(const Mesh& mesh, const TensorField& g, const ScalarField& v,
                                         int quad_degree) {
  const EntityTags tags(mesh);
  const std::vector<double> parts =
      apply_by_entity(distributional_curvature_load(mesh, g, quad_degree), v, tags.count());
  CurvatureReport r;
  r.triangle.assign(parts.begin(), parts.begin() + tags.num_triangles);
  r.edge.assign(parts.begin() + tags.edge(0), parts.begin() + tags.vertex(0));
  r.vertex.assign(parts.begin() + tags.vertex(0), parts.end());
  r.angle_defect.assign(mesh.num_vertices(), 0.0);
  for (int z = 0; z < mesh.num_vertices(); ++z)
    if (!mesh.vertex_on_boundary(z)) r.angle_defect[z] = angle_defect(mesh, g, z);
  for (double x : r.triangle) r.triangle_sum += x;
  for (double x : r.edge) r.edge_sum += x;
  for (double x : r.vertex) r.vertex_sum += x;
  r.total = r.triangle_sum + r.edge_sum + r.vertex_sum;
  return r;
}

ScalarLoad curvature_path_load(const Mesh& mesh, const TensorField& g, int quad_degree, const TimeQuadOptions& opt,
                               TimeQuadInfo* info) {
  const LinearTensor sigma = minus_euclidean(g);
  return integrate_load_in_time<7>(
      [&](double t) {
        const LinearTensor path = euclidean_path(g, t);
        ScalarLoad l = bh_direct_load(FormContext{mesh, path, quad_degree}, sigma);
        l.scale(0.5);
        return l;
      },
      opt, info);
}

FeFunction discrete_curvature(const TensorField& g, std::shared_ptr<const FeSpace> v, int quad_degree) {
  if (v->kind() != SpaceKind::Lagrange) throw std::invalid_argument("discrete curvature needs a Lagrange space");
  const Functional f{v, assemble(distributional_curvature_load(v->mesh(), g, quad_degree), *v)};
  return FeFunction(v, project_functional(f, g, quad_degree));
}

OneFormLoad connection_path_load(const Mesh& mesh, const TensorField& g, int quad_degree, const TimeQuadOptions& opt,
                                 TimeQuadInfo* info) {
  const LinearTensor sigma = minus_euclidean(g);
  return integrate_load_in_time<6>(
      [&](double t) {
        const LinearTensor path = euclidean_path(g, t);
        OneFormLoad l = ch_direct_load(FormContext{mesh, path, quad_degree}, sigma);
        l.scale(-0.5);
        return l;
      },
      opt, info);
}

ConnectionOneForm canonical_connection(const TensorField& g, std::shared_ptr<const FeSpace> w,
                                       ConnectionTarget target, int quad_degree, const TimeQuadOptions& opt) {
  if (w->kind() != SpaceKind::Edge) throw std::invalid_argument("connection one-forms live in an edge space");
  ConnectionOneForm c;
  c.load = connection_path_load(w->mesh(), g, quad_degree, opt, &c.time);
  c.functional = Functional{w, assemble(c.load, *w)};
  if (target == ConnectionTarget::Discrete) c.discrete.emplace(w, project_functional(c.functional, g, quad_degree));
  return c;
}

Vec2d reference_connection_integrand(const TensorJet& g, double t) {
  const TensorJet sigma = add(g, TensorJet{identity2()}, -1.0);
  const TensorJet path = add(scale(g, t), TensorJet{identity2()}, 1.0 - t);
  const Vec2d s = hodge_star(path.val, div_s_sigma(path, sigma));
  return {-0.5 * s[0], -0.5 * s[1]};
}

Vec2d reference_connection_form(const TensorJet& g, const TimeQuadOptions& opt) {
  const std::vector<double> a = integrate_in_time(
      [&](double t) {
        const Vec2d v = reference_connection_integrand(g, t);
        return std::vector<double>{v[0], v[1]};
      },
      opt);
  return {a[0], a[1]};
}

OneFormLoad reference_connection_load(const Mesh& mesh, const TensorField& g, int quad_degree,
                                      const TimeQuadOptions& opt) {
  const EntityTags tags(mesh);
  const TriQuadRule tr = tri_rule(quad_degree);
  OneFormLoad load;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.area(t);
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      const MetricJet gj = metric_jet(g, t, tr.points[q]);
      const Mat2d gi = inverse2(gj.val);
      const Vec2d sa = hodge_star(gj.val, reference_connection_form(gj, opt));
      const double w = tr.weights[q] * area * std::sqrt(det2(gj.val));
      load.add(t, tr.points[q], tags.triangle(t),
               oneform_coef({w * (gi[0][0] * sa[0] + gi[0][1] * sa[1]), w * (gi[1][0] * sa[0] + gi[1][1] * sa[1])}));
    }
  }
  return load;
}

}  // namespace regge
