#pragma once

#include "eikinetic/grid.hpp"

namespace eikinetic {

struct CgOptions {
  double relative_tolerance = 1e-10;
  /// Iteration cap as a multiple of the unknown count.
  std::size_t max_iteration_factor = 10;
};

struct PoissonSolve {
  /// Solution on all nodes, zero on the boundary.
  std::vector<double> phi;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Five-point -Delta phi = omega on the interior nodes with phi = 0 on the
/// boundary, by conjugate gradients. Invalid nodes of omega count as zero.
PoissonSolve solve_dirichlet_poisson(const ScalarField& omega, const CgOptions& options = {});

/// ||omega||^2 in H^{-1}: sum phi omega h^2 with phi from the solve above.
double hminus1_norm_sq(const ScalarField& omega, const CgOptions& options = {});

struct EnergyBreakdown {
  double eps = 0.0;
  double dirichlet = 0.0;
  double penalty = 0.0;
  double curl_term = 0.0;
  double total = 0.0;
  std::size_t cg_iterations = 0;
};

/// eps int |grad u|^2 + (1/eps) int (1 - |u|^2)^2 + (1/eps) ||curl u||^2_{H^{-1}}
/// over the nodes where u and its gradient are valid.
EnergyBreakdown gl_energy(const VectorField& u, double eps);

/// u*(x - c) min(|x - c| / eps, 1): the vortex with a linear core of radius eps.
VectorField regularized_vortex_2d(const GridSpec& grid, const Vec& center, double eps);

}  // namespace eikinetic
