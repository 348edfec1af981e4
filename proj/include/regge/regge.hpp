#pragma once

#include <memory>
#include <string>
#include <vector>

#include "regge/fespace.hpp"

namespace regge {

// Piecewise-polynomial symmetric (0,2)-tensor with single-valued tangential-tangential edge traces.
class ReggeField : public FeField, public TensorField {
 public:
  ReggeField(std::shared_ptr<const FeSpace> space, Eigen::VectorXd coeffs);
  int degree() const { return space().degree(); }
  TensorJet tensor_jet(int t, const Bary& b) const override;
};

std::shared_ptr<const FeSpace> regge_space(std::shared_ptr<const Mesh> mesh, int r);

// Default quadrature degree used to interpolate smooth data onto degree r elements.
inline int default_interp_quad(int r) { return 2 * r + 10; }

// Canonical interpolant matching edge tt-moments against P_r(e) and interior moments against
// P_{r-1} symmetric tensors, both measured in the piecewise-constant metric gbar (Euclidean if null).
ReggeField interp_regge(std::shared_ptr<const FeSpace> space, const TensorField& sigma,
                        const std::vector<Mat2d>* gbar = nullptr, int quad_degree = -1);

// Constant metric per triangle whose edge vectors have the given lengths (indexed by edge).
// Throws std::invalid_argument when a triangle violates the strict triangle inequality.
std::vector<Mat2d> metric_from_edge_lengths(const Mesh& mesh, const std::vector<double>& lengths);

// Metric 2-jet of a Regge field; throws NonSpdMetric where the value is not positive definite.
MetricJet metric_jet(const TensorField& g, int t, const Bary& b);

struct MetricCheck {
  bool ok = true;
  int triangle = -1;
  Bary point{};
  Mat2d value{};
  std::string location() const;
};

// Positive-definiteness probe at interior and edge quadrature points and vertices of every triangle.
MetricCheck is_metric(const TensorField& g, const Mesh& mesh, int sample_degree = 6);

std::string regge_to_json(const ReggeField& f);
ReggeField regge_from_json(const std::string& text, std::shared_ptr<const Mesh> mesh);

}  // namespace regge
