#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "eikinetic/grid.hpp"

namespace eikinetic {

/// Gradient of a node-sampled scalar. Central differences where both
/// neighbours are valid, otherwise one-sided second-order stencils; a node is
/// valid in the output only if every axis found a usable stencil.
VectorField gradient(const ScalarField& psi);

/// Derivative of one component along one axis at a node using only the
/// central stencil. Empty when a neighbour is missing or invalid.
std::optional<double> central_partial(std::span<const double> values, const Mask& mask,
                                      const GridSpec& grid, std::size_t node, int axis);

struct CurlResidual {
  double max_abs = 0.0;
  /// One field per index pair (i, j), i < j, holding d_i u_j - d_j u_i.
  std::vector<std::pair<int, int>> pairs;
  std::vector<ScalarField> fields;
  std::size_t evaluated_nodes = 0;
};

CurlResidual curl_residual(const VectorField& u);

/// Multilinear interpolation; the enclosing cell must be fully valid.
Vec interpolate(const VectorField& u, const Vec& p);
double interpolate(const ScalarField& f, const Vec& p);
/// Non-throwing variant used by samplers.
std::optional<Vec> try_interpolate(const VectorField& u, const Vec& p);
std::optional<double> try_interpolate(const ScalarField& f, const Vec& p);

/// Normalised bump kernel convolution. The output mask drops every node whose
/// kernel footprint leaves the grid or touches an invalid node.
ScalarField mollify(const ScalarField& f, double eps);
VectorField mollify(const VectorField& u, double eps);

/// u / |u| on nodes with |u| >= floor; other nodes become invalid.
VectorField normalize(const VectorField& u, double floor = 1e-12);

/// The bump x -> exp(-1 / (1 - |x - c|^2 / r^2)) on the open ball of radius r.
class TestFunction {
 public:
  TestFunction(Vec center, double radius);

  const Vec& center() const { return center_; }
  double radius() const { return radius_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;

  /// Support ball strictly inside the bounding box of `grid`.
  bool fits_inside(const GridSpec& grid) const;

 private:
  Vec center_;
  double radius_;
};

/// Nodes inside the support of a test function with the bump value and its
/// analytic gradient cached, scaled by the cell volume.
class BumpStencil {
 public:
  /// Throws SupportViolation when the support leaves the box or touches an
  /// invalid node of `mask` (an empty mask means all nodes are valid).
  BumpStencil(const GridSpec& grid, const TestFunction& phi, const Mask& mask = {});

  const TestFunction& phi() const { return phi_; }
  std::span<const std::size_t> nodes() const { return nodes_; }
  /// phi(x_i) * cell volume.
  std::span<const double> weights() const { return weights_; }
  /// d_k phi(x_i) * cell volume, stored node-major (node * dim + k).
  std::span<const double> gradients() const { return gradients_; }
  int dim() const { return dim_; }

 private:
  TestFunction phi_;
  int dim_;
  std::vector<std::size_t> nodes_;
  std::vector<double> weights_;
  std::vector<double> gradients_;
};

/// Integral of f * phi over the grid.
double integrate_value(const ScalarField& f, const TestFunction& phi);
/// Integral of f * (v . grad phi); linear in f and in v.
double integrate_gradient_dot(const ScalarField& f, const TestFunction& phi, const Vec& v);

/// sum_i f(x_i) grad phi(x_i) * cell volume for an indicator-like callback;
/// shared by the kinetic residuals so every pairing goes through one path.
template <typename NodeWeight>
Vec weighted_gradient_sum(const BumpStencil& stencil, NodeWeight&& f) {
  const int dim = stencil.dim();
  Vec acc = Vec::Zero(dim);
  const auto nodes = stencil.nodes();
  const auto grads = stencil.gradients();
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double w = f(nodes[j]);
    if (w == 0.0) continue;
    for (int k = 0; k < dim; ++k) acc[k] += w * grads[j * dim + k];
  }
  return acc;
}

/// Bump test functions with Halton-sequence centres, keeping only those whose
/// support fits the box and avoids invalid nodes. `skip` offsets the sequence.
std::vector<TestFunction> halton_test_functions(const GridSpec& grid, const Mask& mask,
                                                std::size_t count, double radius,
                                                std::size_t skip = 0);

/// Radical-inverse Halton coordinate of index `i` in prime base `base`.
double halton(std::size_t i, int base);

}  // namespace eikinetic
