#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "eikinetic/grid.hpp"

namespace eikinetic {

/// Radius of the ball (or tube) masked around a known singularity: 3 max(h).
double exclusion_radius(const GridSpec& grid);

/// u(x) = sign (x - c) / |x - c|, masked inside the exclusion ball.
VectorField gen_vortex(const GridSpec& grid, const Vec& center, int sign = 1);

VectorField gen_constant(const GridSpec& grid, const Vec& w);

/// (x - c)^perp / |x - c| in 2D: unit norm, divergence free, not curl free.
VectorField gen_rotational_2d(const GridSpec& grid, const Vec& center);

/// (x_1 - c_1, -(x_2 - c_2)) / |x - c| in 2D, a degree -1 singularity.
VectorField gen_reflected_vortex_2d(const GridSpec& grid, const Vec& center);

struct VortexLineOptions {
  /// Also mask every node with x_2 <= 1.
  bool restrict_x2_gt_1 = false;
};

/// u(x', x_N) = ((x' - P') / |x' - P'|, 0) around the line {x' = P'}.
/// `axis_point` holds P' (N-1 coordinates) or a full N-point whose last
/// coordinate is ignored.
VectorField gen_vortex_line(const GridSpec& grid, const Vec& axis_point,
                            VortexLineOptions options = {});

struct FastMarchingOptions {
  /// Nodes within this distance of the seed geometry are initialised with
  /// their exact distance; <= 0 selects half the cell diagonal.
  double seed_band = 0.0;
  /// Optional propagation domain (empty: whole grid).
  Mask domain;
  /// Permutes seed insertion and neighbour visiting order; results must not
  /// depend on it.
  std::uint64_t shuffle_seed = 0;
};

/// First-order upwind fast marching for |grad psi| = 1 from explicit initial
/// node values (kept fixed). Unreached nodes are +inf and masked out.
ScalarField fast_marching_from_nodes(const GridSpec& grid,
                                     std::vector<std::pair<std::size_t, double>> initial,
                                     const FastMarchingOptions& options = {});

/// Distance to a finite point set.
ScalarField fast_marching(const GridSpec& grid, std::span<const Vec> seeds,
                          const FastMarchingOptions& options = {});

/// Distance to the zero set of `level`: exact zeros are seeded with 0 and
/// nodes adjacent to a sign change with |f| / |grad f| from the edge.
ScalarField fast_marching(const ScalarField& level, const FastMarchingOptions& options = {});

/// Unsigned distance to a 2D polyline through fast marching.
ScalarField gen_distance_field_2d(const GridSpec& grid, std::span<const Vec> polyline,
                                  const FastMarchingOptions& options = {});

/// Discrete Godunov residual max | sum_k (max(psi - a_k, 0) / h_k)^2 - 1 |
/// over valid nodes that are not in `fixed`.
double godunov_residual(const ScalarField& psi, const Mask& fixed);

/// Exact |x - p| sampled on the grid.
ScalarField gen_point_distance(const GridSpec& grid, const Vec& p);

/// Signed distance to the axis-aligned ellipsoid sum (x_i - c_i)^2 / a_i^2 = 1
/// (negative inside).
double ellipsoid_signed_distance(const Vec& x, const Vec& center, const Vec& semi_axes);
ScalarField gen_ellipsoid_distance(const GridSpec& grid, const Vec& center, const Vec& semi_axes);

/// Distance from a point to a polyline.
double polyline_distance(const Vec& x, std::span<const Vec> polyline);

/// Closed polygon approximating a circle, and the graph of y = a x^2 + c over
/// [x0, x1] as a polyline.
std::vector<Vec> circle_polyline(const Vec& center, double radius, std::size_t segments);
std::vector<Vec> parabola_polyline(double a, double c, double x0, double x1, std::size_t segments);

}  // namespace eikinetic
