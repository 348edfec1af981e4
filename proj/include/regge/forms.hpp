#pragma once

#include "regge/fespace.hpp"
#include "regge/fields.hpp"
#include "regge/load.hpp"
#include "regge/mesh.hpp"

namespace regge {

// Metric and quadrature shared by the bilinear forms b_h(g; sigma, v) and c_h(g; sigma, alpha).
struct FormContext {
  const Mesh& mesh;
  const TensorField& g;
  int quad_degree;
  // Reverses the sign of the edge normal-derivative terms of the direct forms (mutation testing only).
  bool flip_normal_jump = false;
};

// Quadrature degree for forms over a degree r Regge metric.
inline int default_form_quad(int r) { return 4 * r + 10; }

// Entity tags used by loads: triangles first, then edges, then vertices.
struct EntityTags {
  int num_triangles;
  int num_edges;
  int num_vertices;
  explicit EntityTags(const Mesh& m)
      : num_triangles(m.num_triangles()), num_edges(m.num_edges()), num_vertices(m.num_vertices()) {}
  int triangle(int t) const { return t; }
  int edge(int e) const { return num_triangles + e; }
  int vertex(int v) const { return num_triangles + num_edges + v; }
  int count() const { return num_triangles + num_edges + num_vertices; }
};

// Throws std::logic_error when the g-length of an interior edge differs between its two sides.
void check_tt_continuity(const Mesh& mesh, const TensorField& g, int quad_degree, double rel_tol = 1e-8);

// b_h as a load on scalar test functions: triangle terms <S sigma, Hess v>_g plus
// edge terms sigma(tau, tau) grad_n v on every edge, each side with its own outward g-normal.
ScalarLoad bh_direct_load(const FormContext& ctx, const TensorField& sigma);
// Element-wise integrated form: div div S sigma on triangles, edge jumps of
// (div S sigma)(n) + d_tau sigma(n, tau) on edges with an interior endpoint,
// and jumps of sigma(n, tau) at interior vertices.
ScalarLoad bh_ibp_load(const FormContext& ctx, const TensorField& sigma);
// c_h as a load on one-forms: <S sigma, nabla alpha>_g plus edge terms sigma(tau, tau) alpha(n).
OneFormLoad ch_direct_load(const FormContext& ctx, const TensorField& sigma);
// -<div S sigma, alpha>_g plus sigma(n, tau) alpha(tau) from both sides of edges with an interior endpoint.
OneFormLoad ch_ibp_load(const FormContext& ctx, const TensorField& sigma);

double bh_direct(const FormContext& ctx, const TensorField& sigma, const ScalarField& v);
double bh_ibp(const FormContext& ctx, const TensorField& sigma, const ScalarField& v);
double ch_direct(const FormContext& ctx, const TensorField& sigma, const OneFormField& alpha);
double ch_ibp(const FormContext& ctx, const TensorField& sigma, const OneFormField& alpha);

// Matrices of the direct forms with rows on the free test DOFs and columns on all Regge DOFs.
SparseMatrix bh_matrix(const FormContext& ctx, const FeSpace& sigma_space, const FeSpace& v);
SparseMatrix ch_matrix(const FormContext& ctx, const FeSpace& sigma_space, const FeSpace& w);

}  // namespace regge
