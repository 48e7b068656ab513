#include "eikinetic/generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

#include "eikinetic/sphere_quad.hpp"

namespace eikinetic {

namespace {

template <typename Fn>
VectorField sample_vector(const GridSpec& grid, Fn&& fn) {
  const int dim = grid.dim();
  std::vector<std::vector<double>> comps(dim, std::vector<double>(grid.size(), 0.0));
  Mask mask(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.node(i);
    Vec u(dim);
    if (!fn(x, u)) continue;
    for (int k = 0; k < dim; ++k) comps[k][i] = u[k];
    mask[i] = 1;
  }
  return VectorField(grid, std::move(comps), std::move(mask));
}

void require_dim(const Vec& v, int dim, const char* what) {
  if (v.size() != dim) throw Error(ErrorKind::Precondition, std::string(what) + " has wrong dimension");
}

}  // namespace

double exclusion_radius(const GridSpec& grid) { return 3.0 * grid.max_spacing(); }

VectorField gen_vortex(const GridSpec& grid, const Vec& center, int sign) {
  require_dim(center, grid.dim(), "vortex center");
  if (sign != 1 && sign != -1) throw Error(ErrorKind::Precondition, "vortex sign must be +1 or -1");
  const double r0 = exclusion_radius(grid);
  return sample_vector(grid, [&](const Vec& x, Vec& u) {
    const Vec d = x - center;
    const double r = d.norm();
    if (r < r0) return false;
    u = d / r;
    if (sign < 0) u = -u;
    return true;
  });
}

VectorField gen_constant(const GridSpec& grid, const Vec& w) {
  require_dim(w, grid.dim(), "constant direction");
  if (std::abs(w.norm() - 1.0) > 1e-12) throw Error(ErrorKind::Precondition, "constant direction must be unit");
  return sample_vector(grid, [&](const Vec&, Vec& u) {
    u = w;
    return true;
  });
}

VectorField gen_rotational_2d(const GridSpec& grid, const Vec& center) {
  if (grid.dim() != 2) throw Error(ErrorKind::Unsupported, "rotational field is 2D only");
  require_dim(center, 2, "rotation center");
  const double r0 = exclusion_radius(grid);
  return sample_vector(grid, [&](const Vec& x, Vec& u) {
    const Vec d = x - center;
    const double r = d.norm();
    if (r < r0) return false;
    u = make_vec({-d[1] / r, d[0] / r});
    return true;
  });
}

VectorField gen_reflected_vortex_2d(const GridSpec& grid, const Vec& center) {
  if (grid.dim() != 2) throw Error(ErrorKind::Unsupported, "reflected vortex is 2D only");
  require_dim(center, 2, "vortex center");
  const double r0 = exclusion_radius(grid);
  return sample_vector(grid, [&](const Vec& x, Vec& u) {
    const Vec d = x - center;
    const double r = d.norm();
    if (r < r0) return false;
    u = make_vec({d[0] / r, -d[1] / r});
    return true;
  });
}

VectorField gen_vortex_line(const GridSpec& grid, const Vec& axis_point, VortexLineOptions options) {
  const int dim = grid.dim();
  if (dim < 3) throw Error(ErrorKind::Unsupported, "vortex-line fields need dim >= 3");
  if (axis_point.size() != dim && axis_point.size() != dim - 1) {
    throw Error(ErrorKind::Precondition, "axis point has wrong dimension");
  }
  const double r0 = exclusion_radius(grid);
  return sample_vector(grid, [&](const Vec& x, Vec& u) {
    if (options.restrict_x2_gt_1 && !(x[1] > 1.0)) return false;
    Vec d = Vec::Zero(dim);
    for (int k = 0; k < dim - 1; ++k) d[k] = x[k] - axis_point[k];
    const double r = d.norm();
    if (r < r0) return false;
    u = d / r;
    return true;
  });
}

ScalarField fast_marching_from_nodes(const GridSpec& grid,
                                     std::vector<std::pair<std::size_t, double>> initial,
                                     const FastMarchingOptions& options) {
  if (initial.empty()) throw Error(ErrorKind::Precondition, "fast marching needs at least one seed");
  const int dim = grid.dim();
  const std::size_t n = grid.size();
  const Mask& domain = options.domain;
  if (!domain.empty() && domain.size() != n) {
    throw Error(ErrorKind::Precondition, "domain mask length must equal node count");
  }
  auto in_domain = [&](std::size_t i) { return domain.empty() || domain[i] != 0; };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> psi(n, kInf);
  enum : std::uint8_t { kFar = 0, kTrial = 1, kAccepted = 2 };
  std::vector<std::uint8_t> state(n, kFar);
  std::vector<std::uint8_t> fixed(n, 0);

  // Ties break on the node index through the pair ordering.
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  std::vector<int> directions(2 * dim);
  std::iota(directions.begin(), directions.end(), 0);
  if (options.shuffle_seed != 0) {
    SeededRng rng(options.shuffle_seed);
    for (std::size_t i = initial.size(); i > 1; --i) std::swap(initial[i - 1], initial[rng.below(i)]);
    for (std::size_t i = directions.size(); i > 1; --i) std::swap(directions[i - 1], directions[rng.below(i)]);
  }

  for (const auto& [node, value] : initial) {
    if (node >= n) throw Error(ErrorKind::Precondition, "seed node out of range");
    if (!in_domain(node)) continue;
    if (fixed[node] && psi[node] <= value) continue;
    psi[node] = value;
    fixed[node] = 1;
    state[node] = kTrial;
    heap.emplace(value, node);
  }
  if (heap.empty()) throw Error(ErrorKind::Precondition, "no seed lies inside the domain");

  std::array<std::pair<double, double>, kMaxDim> terms{};
  auto solve = [&](std::size_t node, const MultiIndex& idx) {
    int m = 0;
    for (int a = 0; a < dim; ++a) {
      double best = kInf;
      const std::size_t s = grid.stride(a);
      if (idx[a] > 0 && state[node - s] == kAccepted) best = std::min(best, psi[node - s]);
      if (idx[a] + 1 < grid.shape(a) && state[node + s] == kAccepted) best = std::min(best, psi[node + s]);
      if (best < kInf) terms[m++] = {best, grid.spacing(a)};
    }
    if (m == 0) return kInf;
    std::sort(terms.begin(), terms.begin() + m);
    // Solved in offsets from the smallest neighbour to avoid cancellation.
    const double base = terms[0].first;
    double value = terms[0].second;
    double A = 0.0, B = 0.0, C = -1.0;
    for (int k = 0; k < m; ++k) {
      const double a = terms[k].first - base;
      const double w = 1.0 / (terms[k].second * terms[k].second);
      A += w;
      B += a * w;
      C += a * a * w;
      const double disc = B * B - A * C;
      if (disc < 0.0) break;
      value = (B + std::sqrt(disc)) / A;
      if (k + 1 == m || value <= terms[k + 1].first - base) break;
    }
    return base + value;
  };

  while (!heap.empty()) {
    const auto [value, node] = heap.top();
    heap.pop();
    if (state[node] == kAccepted || value != psi[node]) continue;
    state[node] = kAccepted;
    const MultiIndex idx = grid.unravel(node);
    for (int d : directions) {
      const int a = d / 2;
      const bool forward = d % 2 == 1;
      if (forward ? idx[a] + 1 >= grid.shape(a) : idx[a] == 0) continue;
      const std::size_t nb = forward ? node + grid.stride(a) : node - grid.stride(a);
      if (state[nb] == kAccepted || fixed[nb] || !in_domain(nb)) continue;
      MultiIndex nidx = idx;
      nidx[a] += forward ? 1 : -1;
      const double candidate = solve(nb, nidx);
      if (candidate < psi[nb]) {
        psi[nb] = candidate;
        state[nb] = kTrial;
        heap.emplace(candidate, nb);
      }
    }
  }

  Mask mask(n, 0);
  for (std::size_t i = 0; i < n; ++i) mask[i] = std::isfinite(psi[i]) ? 1 : 0;
  return ScalarField(grid, std::move(psi), std::move(mask));
}

namespace {

double default_band(const GridSpec& grid, double band) {
  if (band > 0.0) return band;
  double s = 0.0;
  for (int a = 0; a < grid.dim(); ++a) s += grid.spacing(a) * grid.spacing(a);
  return 0.5 * std::sqrt(s);
}

// Visits every node within `band` of the axis-aligned box [lo, hi].
template <typename Fn>
void for_nodes_near_box(const GridSpec& grid, const Vec& lo, const Vec& hi, double band, Fn&& fn) {
  const int dim = grid.dim();
  MultiIndex first{}, last{}, idx{};
  for (int a = 0; a < dim; ++a) {
    first[a] = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::floor((lo[a] - band - grid.origin(a)) / grid.spacing(a))));
    last[a] = std::min<std::int64_t>(
        grid.shape(a) - 1, static_cast<std::int64_t>(std::ceil((hi[a] + band - grid.origin(a)) / grid.spacing(a))));
    if (first[a] > last[a]) return;
    idx[a] = first[a];
  }
  while (true) {
    fn(grid.ravel(idx));
    int a = dim - 1;
    while (a >= 0) {
      if (++idx[a] <= last[a]) break;
      idx[a] = first[a];
      --a;
    }
    if (a < 0) break;
  }
}

}  // namespace

ScalarField fast_marching(const GridSpec& grid, std::span<const Vec> seeds,
                          const FastMarchingOptions& options) {
  if (seeds.empty()) throw Error(ErrorKind::Precondition, "fast marching needs at least one seed");
  const double band = default_band(grid, options.seed_band);
  std::vector<std::pair<std::size_t, double>> initial;
  for (const auto& p : seeds) {
    if (p.size() != grid.dim() || !grid.contains(p)) {
      throw Error(ErrorKind::Precondition, "seed point outside the grid");
    }
    for_nodes_near_box(grid, p, p, band, [&](std::size_t i) {
      const double d = (grid.node(i) - p).norm();
      if (d <= band) initial.emplace_back(i, d);
    });
  }
  if (initial.empty()) throw Error(ErrorKind::Precondition, "seed band contains no node");
  return fast_marching_from_nodes(grid, std::move(initial), options);
}

ScalarField fast_marching(const ScalarField& level, const FastMarchingOptions& options) {
  const GridSpec& grid = level.grid();
  std::vector<std::pair<std::size_t, double>> initial;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!level.valid(i)) continue;
    const double f = level[i];
    if (f == 0.0) {
      initial.emplace_back(i, 0.0);
      continue;
    }
    const MultiIndex idx = grid.unravel(i);
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < grid.dim(); ++a) {
      for (int side : {-1, 1}) {
        const std::int64_t j = idx[a] + side;
        if (j < 0 || j >= grid.shape(a)) continue;
        const std::size_t nb = side > 0 ? i + grid.stride(a) : i - grid.stride(a);
        if (!level.valid(nb)) continue;
        const double g = level[nb];
        if (g == 0.0 || (f > 0.0) == (g > 0.0)) continue;
        best = std::min(best, grid.spacing(a) * f / (f - g));
      }
    }
    if (std::isfinite(best)) initial.emplace_back(i, std::abs(best));
  }
  if (initial.empty()) throw Error(ErrorKind::Precondition, "level field has no zero crossing");
  return fast_marching_from_nodes(grid, std::move(initial), options);
}

double polyline_distance(const Vec& x, std::span<const Vec> polyline) {
  if (polyline.empty()) throw Error(ErrorKind::Precondition, "empty polyline");
  if (polyline.size() == 1) return (x - polyline[0]).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
    const Vec& a = polyline[k];
    const Vec d = polyline[k + 1] - a;
    const double len2 = d.squaredNorm();
    double t = len2 > 0.0 ? (x - a).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, (x - a - t * d).norm());
  }
  return best;
}

ScalarField gen_distance_field_2d(const GridSpec& grid, std::span<const Vec> polyline,
                                  const FastMarchingOptions& options) {
  if (grid.dim() != 2) throw Error(ErrorKind::Unsupported, "distance field generator is 2D");
  if (polyline.empty()) throw Error(ErrorKind::Precondition, "empty polyline");
  for (const auto& p : polyline) {
    if (p.size() != 2 || !grid.contains(p)) throw Error(ErrorKind::Precondition, "curve leaves the grid box");
  }
  const double band = default_band(grid, options.seed_band);
  std::vector<std::pair<std::size_t, double>> initial;
  std::vector<std::uint8_t> seen(grid.size(), 0);
  for (std::size_t k = 0; k + 1 < std::max<std::size_t>(polyline.size(), 2); ++k) {
    const Vec& a = polyline[std::min(k, polyline.size() - 1)];
    const Vec& b = polyline[std::min(k + 1, polyline.size() - 1)];
    const Vec lo = a.cwiseMin(b);
    const Vec hi = a.cwiseMax(b);
    for_nodes_near_box(grid, lo, hi, band, [&](std::size_t i) {
      if (seen[i]) return;
      const double d = polyline_distance(grid.node(i), polyline);
      if (d <= band) {
        seen[i] = 1;
        initial.emplace_back(i, d);
      }
    });
  }
  if (initial.empty()) throw Error(ErrorKind::Precondition, "curve rasterises to no node");
  return fast_marching_from_nodes(grid, std::move(initial), options);
}

double godunov_residual(const ScalarField& psi, const Mask& fixed) {
  const GridSpec& grid = psi.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!psi.valid(i) || (!fixed.empty() && fixed[i])) continue;
    const MultiIndex idx = grid.unravel(i);
    double sum = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      double best = std::numeric_limits<double>::infinity();
      const std::size_t s = grid.stride(a);
      if (idx[a] > 0 && psi.valid(i - s)) best = std::min(best, psi[i - s]);
      if (idx[a] + 1 < grid.shape(a) && psi.valid(i + s)) best = std::min(best, psi[i + s]);
      if (!std::isfinite(best)) continue;
      const double t = std::max(psi[i] - best, 0.0) / grid.spacing(a);
      sum += t * t;
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

ScalarField gen_point_distance(const GridSpec& grid, const Vec& p) {
  require_dim(p, grid.dim(), "point");
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = (grid.node(i) - p).norm();
  return ScalarField(grid, std::move(values));
}

double ellipsoid_signed_distance(const Vec& x, const Vec& center, const Vec& semi_axes) {
  const int dim = static_cast<int>(x.size());
  Vec y = (x - center).cwiseAbs();
  Vec a2 = semi_axes.cwiseProduct(semi_axes);
  double level = 0.0;
  for (int k = 0; k < dim; ++k) level += y[k] * y[k] / a2[k];
  if (level == 1.0) return 0.0;
  // Closest point x_k = a_k^2 y_k / (t + a_k^2); F(t) = sum (a_k y_k / (t + a_k^2))^2 - 1
  // is decreasing in t on (-min a_k^2, inf).
  auto F = [&](double t) {
    double s = -1.0;
    for (int k = 0; k < dim; ++k) {
      const double q = semi_axes[k] * y[k] / (t + a2[k]);
      s += q * q;
    }
    return s;
  };
  double lo, hi;
  if (level > 1.0) {
    lo = 0.0;
    hi = semi_axes.maxCoeff() * y.norm();
    while (F(hi) > 0.0) hi *= 2.0;
  } else {
    lo = -a2.minCoeff();
    hi = 0.0;
    // On the medial set (zero coordinates along the shortest axes) F stays
    // bounded as t -> lo; if F(lo) <= 0 the closest points form a circle.
    double rest = -1.0, fixed_sq = 0.0, fixed_d2 = 0.0;
    bool medial = true;
    for (int k = 0; k < dim; ++k) {
      if (a2[k] == -lo) {
        medial = medial && y[k] == 0.0;
        continue;
      }
      const double xk = a2[k] * y[k] / (a2[k] + lo);
      rest += (semi_axes[k] * y[k] / (a2[k] + lo)) * (semi_axes[k] * y[k] / (a2[k] + lo));
      fixed_sq += xk * xk / a2[k];
      fixed_d2 += (y[k] - xk) * (y[k] - xk);
    }
    if (medial && rest <= 0.0) return -std::sqrt(fixed_d2 + -lo * std::max(0.0, 1.0 - fixed_sq));
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (F(mid) > 0.0) lo = mid; else hi = mid;
  }
  const double t = 0.5 * (lo + hi);
  Vec closest(dim);
  for (int k = 0; k < dim; ++k) closest[k] = a2[k] * y[k] / (t + a2[k]);
  const double d = (y - closest).norm();
  return level > 1.0 ? d : -d;
}

ScalarField gen_ellipsoid_distance(const GridSpec& grid, const Vec& center, const Vec& semi_axes) {
  require_dim(center, grid.dim(), "ellipsoid center");
  require_dim(semi_axes, grid.dim(), "ellipsoid semi-axes");
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = ellipsoid_signed_distance(grid.node(i), center, semi_axes);
  }
  return ScalarField(grid, std::move(values));
}

std::vector<Vec> circle_polyline(const Vec& center, double radius, std::size_t segments) {
  std::vector<Vec> out;
  for (std::size_t k = 0; k <= segments; ++k) {
    const double a = 2.0 * M_PI * static_cast<double>(k % segments) / static_cast<double>(segments);
    out.push_back(make_vec({center[0] + radius * std::cos(a), center[1] + radius * std::sin(a)}));
  }
  return out;
}

std::vector<Vec> parabola_polyline(double a, double c, double x0, double x1, std::size_t segments) {
  std::vector<Vec> out;
  for (std::size_t k = 0; k <= segments; ++k) {
    const double x = x0 + (x1 - x0) * static_cast<double>(k) / static_cast<double>(segments);
    out.push_back(make_vec({x, a * x * x + c}));
  }
  return out;
}

}  // namespace eikinetic
