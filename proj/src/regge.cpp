#include "regge/regge.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "regge/geom.hpp"

namespace regge {

ReggeField::ReggeField(std::shared_ptr<const FeSpace> space, Eigen::VectorXd coeffs)
    : FeField(std::move(space), std::move(coeffs)) {
  if (this->space().kind() != SpaceKind::Regge) throw std::invalid_argument("ReggeField needs a Regge space");
}

TensorJet ReggeField::tensor_jet(int t, const Bary& b) const {
  double v[3];
  Vec2d g[3];
  Mat2d h[3];
  eval(t, b, v, g, h);
  TensorJet j;
  const int comp[2][2] = {{0, 1}, {1, 2}};
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c) {
      const int k = comp[a][c];
      j.val[a][c] = v[k];
      for (int i = 0; i < 2; ++i) {
        j.d[i][a][c] = g[k][i];
        for (int l = 0; l < 2; ++l) j.dd[i][l][a][c] = h[k][i][l];
      }
    }
  return j;
}

std::shared_ptr<const FeSpace> regge_space(std::shared_ptr<const Mesh> mesh, int r) {
  return std::make_shared<const FeSpace>(std::move(mesh), SpaceKind::Regge, r);
}

ReggeField interp_regge(std::shared_ptr<const FeSpace> space, const TensorField& sigma, const std::vector<Mat2d>* gbar,
                        int quad_degree) {
  if (space->kind() != SpaceKind::Regge) throw std::invalid_argument("interp_regge needs a Regge space");
  if (gbar && static_cast<int>(gbar->size()) != space->mesh().num_triangles())
    throw std::invalid_argument("reference metric needs one value per triangle");
  const int qd = quad_degree > 0 ? quad_degree : default_interp_quad(space->degree());
  Eigen::VectorXd c = space->interpolate(
      [&](int t, const Bary& b, double* out) {
        const Mat2d s = sigma.tensor_jet(t, b).val;
        out[0] = s[0][0];
        out[1] = 0.5 * (s[0][1] + s[1][0]);
        out[2] = s[1][1];
      },
      qd, gbar);
  return ReggeField(std::move(space), std::move(c));
}

std::vector<Mat2d> metric_from_edge_lengths(const Mesh& mesh, const std::vector<double>& lengths) {
  if (static_cast<int>(lengths.size()) != mesh.num_edges()) throw std::invalid_argument("need one length per edge");
  std::vector<Mat2d> g(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Eigen::Matrix3d a;
    Eigen::Vector3d b;
    double l[3];
    for (int i = 0; i < 3; ++i) {
      const Vec2d e = mesh.edge_vector(t, i);
      a.row(i) << e[0] * e[0], 2.0 * e[0] * e[1], e[1] * e[1];
      l[i] = lengths[mesh.tri_edge(t, i)];
      b[i] = l[i] * l[i];
    }
    for (int i = 0; i < 3; ++i)
      if (l[i] >= l[(i + 1) % 3] + l[(i + 2) % 3])
        throw std::invalid_argument("edge lengths violate the triangle inequality in triangle " + std::to_string(t));
    const Eigen::Vector3d x = a.partialPivLu().solve(b);
    g[t] = {{{x[0], x[1]}, {x[1], x[2]}}};
  }
  return g;
}

MetricJet metric_jet(const TensorField& g, int t, const Bary& b) {
  MetricJet j = g.tensor_jet(t, b);
  require_spd(j.val, "metric evaluation");
  return j;
}

std::string MetricCheck::location() const {
  std::ostringstream os;
  if (ok) return "positive definite at all samples";
  os << "triangle " << triangle << " at barycentric (" << point[0] << ", " << point[1] << ", " << point[2]
     << "), value [[" << value[0][0] << ", " << value[0][1] << "], [" << value[1][0] << ", " << value[1][1] << "]]";
  return os.str();
}

MetricCheck is_metric(const TensorField& g, const Mesh& mesh, int sample_degree) {
  const TriQuadRule tr = tri_rule(sample_degree);
  const EdgeQuadRule er = edge_rule(sample_degree);
  std::vector<Bary> pts = tr.points;
  for (int i = 0; i < 3; ++i) {
    Bary v{0.0, 0.0, 0.0};
    v[i] = 1.0;
    pts.push_back(v);
    for (double s : er.points) pts.push_back(Mesh::edge_point(i, s));
  }
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const Bary& b : pts) {
      const Mat2d v = g.tensor_jet(t, b).val;
      if (!is_spd(v)) return {false, t, b, v};
    }
  return {};
}

std::string regge_to_json(const ReggeField& f) {
  const FeSpace& s = f.space();
  const Mesh& m = s.mesh();
  const int per_edge = s.degree() + 1;
  const int per_tri = (s.ndofs() - m.num_edges() * per_edge) / std::max(1, m.num_triangles());
  nlohmann::json j;
  j["degree"] = s.degree();
  j["edge_moments"] = nlohmann::json::array();
  for (int e = 0; e < m.num_edges(); ++e) {
    std::vector<double> v(per_edge);
    for (int k = 0; k < per_edge; ++k) v[k] = f.coeffs()[e * per_edge + k];
    j["edge_moments"].push_back(v);
  }
  j["interior"] = nlohmann::json::array();
  for (int t = 0; t < m.num_triangles(); ++t) {
    std::vector<double> v(per_tri);
    for (int k = 0; k < per_tri; ++k) v[k] = f.coeffs()[m.num_edges() * per_edge + t * per_tri + k];
    j["interior"].push_back(v);
  }
  return j.dump();
}

ReggeField regge_from_json(const std::string& text, std::shared_ptr<const Mesh> mesh) {
  const auto j = nlohmann::json::parse(text);
  auto space = regge_space(mesh, j.at("degree").get<int>());
  const int per_edge = space->degree() + 1;
  const auto& em = j.at("edge_moments");
  const auto& in = j.at("interior");
  if (static_cast<int>(em.size()) != mesh->num_edges() || static_cast<int>(in.size()) != mesh->num_triangles())
    throw std::invalid_argument("Regge field JSON does not match the mesh");
  Eigen::VectorXd c(space->ndofs());
  int k = 0;
  for (const auto& row : em) {
    if (static_cast<int>(row.size()) != per_edge) throw std::invalid_argument("bad edge moment block");
    for (double v : row) c[k++] = v;
  }
  for (const auto& row : in)
    for (double v : row) {
      if (k >= c.size()) throw std::invalid_argument("bad interior block");
      c[k++] = v;
    }
  if (k != c.size()) throw std::invalid_argument("Regge field JSON has too few coefficients");
  return ReggeField(std::move(space), std::move(c));
}

}  // namespace regge
