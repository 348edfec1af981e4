#include "regge/load.hpp"

#include <cmath>

namespace regge {

namespace {

double scalar_term(const double* c, const ScalarJet& j) {
  return c[0] * j.val + c[1] * j.grad[0] + c[2] * j.grad[1] + c[3] * j.hess[0][0] + c[4] * j.hess[0][1] +
         c[5] * j.hess[1][0] + c[6] * j.hess[1][1];
}

double oneform_term(const double* c, const OneFormJet& j) {
  return c[0] * j.val[0] + c[1] * j.val[1] + c[2] * j.jac[0][0] + c[3] * j.jac[0][1] + c[4] * j.jac[1][0] +
         c[5] * j.jac[1][1];
}

}  // namespace

double apply(const ScalarLoad& load, const ScalarField& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < load.size(); ++i) s += scalar_term(load.coef(i), v.scalar_jet(load.triangle(i), load.point(i)));
  return s;
}

double apply(const OneFormLoad& load, const OneFormField& alpha) {
  double s = 0.0;
  for (std::size_t i = 0; i < load.size(); ++i)
    s += oneform_term(load.coef(i), alpha.oneform_jet(load.triangle(i), load.point(i)));
  return s;
}

double apply_magnitude(const ScalarLoad& load, const ScalarField& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < load.size(); ++i) {
    const ScalarJet j = v.scalar_jet(load.triangle(i), load.point(i));
    const double* c = load.coef(i);
    s += std::abs(c[0] * j.val) + std::abs(c[1] * j.grad[0]) + std::abs(c[2] * j.grad[1]) +
         std::abs(c[3] * j.hess[0][0]) + std::abs(c[4] * j.hess[0][1]) + std::abs(c[5] * j.hess[1][0]) +
         std::abs(c[6] * j.hess[1][1]);
  }
  return s;
}

std::vector<double> apply_by_entity(const ScalarLoad& load, const ScalarField& v, int num_entities) {
  std::vector<double> out(num_entities, 0.0);
  for (std::size_t i = 0; i < load.size(); ++i)
    out.at(load.entity(i)) += scalar_term(load.coef(i), v.scalar_jet(load.triangle(i), load.point(i)));
  return out;
}

Eigen::VectorXd assemble(const ScalarLoad& load, const FeSpace& v) {
  if (v.kind() != SpaceKind::Lagrange) throw std::invalid_argument("scalar loads assemble over Lagrange spaces");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(v.ndofs());
  LocalTab tab;
  for (std::size_t i = 0; i < load.size(); ++i) {
    const int t = load.triangle(i);
    const double* c = load.coef(i);
    v.tabulate(t, load.point(i), 1, tab);
    const int* l = v.local_dofs(t);
    for (int k = 0; k < tab.nloc; ++k) {
      const ScalarJet j{tab.val[k], tab.grad[k], tab.hess[k]};
      f[l[k]] += scalar_term(c, j);
    }
  }
  for (int d = 0; d < v.ndofs(); ++d)
    if (v.constrained(d)) f[d] = 0.0;
  return f;
}

Eigen::VectorXd assemble(const OneFormLoad& load, const FeSpace& w) {
  if (w.kind() != SpaceKind::Edge) throw std::invalid_argument("one-form loads assemble over edge spaces");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(w.ndofs());
  LocalTab tab;
  for (std::size_t i = 0; i < load.size(); ++i) {
    const int t = load.triangle(i);
    const double* c = load.coef(i);
    w.tabulate(t, load.point(i), 1, tab);
    const int* l = w.local_dofs(t);
    for (int k = 0; k < tab.nloc; ++k) {
      OneFormJet j;
      for (int comp = 0; comp < 2; ++comp) {
        j.val[comp] = tab.val[k * 2 + comp];
        for (int d = 0; d < 2; ++d) j.jac[d][comp] = tab.grad[k * 2 + comp][d];
      }
      f[l[k]] += oneform_term(c, j);
    }
  }
  for (int d = 0; d < w.ndofs(); ++d)
    if (w.constrained(d)) f[d] = 0.0;
  return f;
}

}  // namespace regge
