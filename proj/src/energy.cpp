#include "eikinetic/energy.hpp"

#include <cmath>

#include "eikinetic/field_ops.hpp"

namespace eikinetic {

namespace {

void require_2d(const GridSpec& grid) {
  if (grid.dim() != 2) throw Error(ErrorKind::Unsupported, "energy functionals are 2D only");
}

}  // namespace

PoissonSolve solve_dirichlet_poisson(const ScalarField& omega, const CgOptions& options) {
  const GridSpec& grid = omega.grid();
  require_2d(grid);
  const std::int64_t nx = grid.shape(0), ny = grid.shape(1);
  const double cx = 1.0 / (grid.spacing(0) * grid.spacing(0));
  const double cy = 1.0 / (grid.spacing(1) * grid.spacing(1));
  const std::size_t n = grid.size();
  auto interior = [&](std::int64_t i, std::int64_t j) { return i > 0 && j > 0 && i < nx - 1 && j < ny - 1; };

  // Boundary entries of every vector stay zero, which encodes phi = 0 there.
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::int64_t i = 1; i < nx - 1; ++i) {
      for (std::int64_t j = 1; j < ny - 1; ++j) {
        const std::size_t k = static_cast<std::size_t>(i * ny + j);
        y[k] = cx * (2.0 * x[k] - x[k - ny] - x[k + ny]) + cy * (2.0 * x[k] - x[k - 1] - x[k + 1]);
      }
    }
  };
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
  };

  std::vector<double> b(n, 0.0);
  std::size_t unknowns = 0;
  for (std::int64_t i = 0; i < nx; ++i) {
    for (std::int64_t j = 0; j < ny; ++j) {
      if (!interior(i, j)) continue;
      ++unknowns;
      const std::size_t k = static_cast<std::size_t>(i * ny + j);
      if (omega.valid(k)) b[k] = omega[k];
    }
  }
  PoissonSolve out;
  out.phi.assign(n, 0.0);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return out;

  std::vector<double> r = b, p = b, ap(n, 0.0);
  double rr = dot(r, r);
  const std::size_t cap = options.max_iteration_factor * unknowns;
  const double target = options.relative_tolerance * bnorm;
  while (std::sqrt(rr) > target) {
    if (out.iterations >= cap) {
      throw Error(ErrorKind::Solver, "conjugate gradients did not converge in " + std::to_string(cap) +
                                         " iterations (relative residual " + std::to_string(std::sqrt(rr) / bnorm) + ")");
    }
    apply(p, ap);
    const double alpha = rr / dot(p, ap);
    for (std::size_t k = 0; k < n; ++k) {
      out.phi[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
    ++out.iterations;
  }
  out.relative_residual = std::sqrt(rr) / bnorm;
  return out;
}

double hminus1_norm_sq(const ScalarField& omega, const CgOptions& options) {
  const PoissonSolve s = solve_dirichlet_poisson(omega, options);
  double acc = 0.0;
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    if (omega.valid(k)) acc += s.phi[k] * omega[k];
  }
  return acc * omega.grid().cell_volume();
}

EnergyBreakdown gl_energy(const VectorField& u, double eps) {
  const GridSpec& grid = u.grid();
  require_2d(grid);
  if (!(eps > 0.0)) throw Error(ErrorKind::Precondition, "eps must be positive");
  const auto c0 = u.component(0), c1 = u.component(1);
  const VectorField g0 = gradient(ScalarField(grid, {c0.begin(), c0.end()}, u.mask()));
  const VectorField g1 = gradient(ScalarField(grid, {c1.begin(), c1.end()}, u.mask()));
  const double vol = grid.cell_volume();

  std::vector<double> omega(grid.size(), 0.0);
  Mask mask(grid.size(), 0);
  double grad2 = 0.0, pen = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!u.valid(i) || !g0.valid(i) || !g1.valid(i)) continue;
    mask[i] = 1;
    const double a = g0.component(0)[i], b = g0.component(1)[i];
    const double c = g1.component(0)[i], d = g1.component(1)[i];
    grad2 += a * a + b * b + c * c + d * d;
    const double defect = 1.0 - (c0[i] * c0[i] + c1[i] * c1[i]);
    pen += defect * defect;
    omega[i] = c - b;
  }
  const ScalarField curl(grid, std::move(omega), std::move(mask));
  const PoissonSolve s = solve_dirichlet_poisson(curl);
  double h1 = 0.0;
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    if (curl.valid(k)) h1 += s.phi[k] * curl[k];
  }
  EnergyBreakdown e;
  e.eps = eps;
  e.dirichlet = eps * grad2 * vol;
  e.penalty = pen * vol / eps;
  e.curl_term = std::max(h1 * vol, 0.0) / eps;
  e.total = e.dirichlet + e.penalty + e.curl_term;
  e.cg_iterations = s.iterations;
  return e;
}

VectorField regularized_vortex_2d(const GridSpec& grid, const Vec& center, double eps) {
  require_2d(grid);
  if (!(eps > 0.0)) throw Error(ErrorKind::Precondition, "eps must be positive");
  std::vector<std::vector<double>> comps(2, std::vector<double>(grid.size(), 0.0));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec d = grid.node(i) - center;
    const double r = d.norm();
    if (r == 0.0) continue;
    const double s = std::min(r / eps, 1.0) / r;
    comps[0][i] = d[0] * s;
    comps[1][i] = d[1] * s;
  }
  return VectorField(grid, std::move(comps));
}

}  // namespace eikinetic
