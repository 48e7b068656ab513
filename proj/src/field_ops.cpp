#include "eikinetic/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace eikinetic {

namespace {

bool node_valid(const Mask& mask, std::size_t i) { return mask.empty() || mask[i] != 0; }

// Derivative along `axis` at `node` with the central stencil if possible,
// falling back to second-order one-sided stencils.
std::optional<double> partial_any(std::span<const double> f, const Mask& mask, const GridSpec& grid,
                                  std::size_t node, std::int64_t ia, int axis) {
  const std::int64_t n = grid.shape(axis);
  const std::size_t s = grid.stride(axis);
  const double h = grid.spacing(axis);
  const bool has_m1 = ia - 1 >= 0 && node_valid(mask, node - s);
  const bool has_p1 = ia + 1 < n && node_valid(mask, node + s);
  if (has_m1 && has_p1) return (f[node + s] - f[node - s]) / (2.0 * h);
  if (has_p1 && ia + 2 < n && node_valid(mask, node + 2 * s)) {
    return (-3.0 * f[node] + 4.0 * f[node + s] - f[node + 2 * s]) / (2.0 * h);
  }
  if (has_m1 && ia - 2 >= 0 && node_valid(mask, node - 2 * s)) {
    return (3.0 * f[node] - 4.0 * f[node - s] + f[node - 2 * s]) / (2.0 * h);
  }
  return std::nullopt;
}

struct CellLocation {
  MultiIndex cell{};
  std::array<double, kMaxDim> t{};
};

std::optional<CellLocation> locate(const GridSpec& grid, const Vec& p) {
  if (p.size() != grid.dim()) return std::nullopt;
  CellLocation loc;
  constexpr double snap = 1e-10;
  for (int a = 0; a < grid.dim(); ++a) {
    const double x = (p[a] - grid.origin(a)) / grid.spacing(a);
    if (!std::isfinite(x)) return std::nullopt;
    const std::int64_t last = grid.shape(a) - 1;
    if (x < -snap || x > static_cast<double>(last) + snap) return std::nullopt;
    auto c = static_cast<std::int64_t>(std::floor(x));
    c = std::clamp<std::int64_t>(c, 0, last - 1);
    double t = x - static_cast<double>(c);
    if (std::abs(t) < snap) t = 0.0;
    if (std::abs(t - 1.0) < snap) t = 1.0;
    t = std::clamp(t, 0.0, 1.0);
    loc.cell[a] = c;
    loc.t[a] = t;
  }
  return loc;
}

// Calls fn(linear_index, weight) for each corner with non-zero weight.
template <typename Fn>
bool for_each_corner(const GridSpec& grid, const CellLocation& loc, const Mask& mask, Fn&& fn) {
  const int dim = grid.dim();
  const std::size_t base = grid.ravel(loc.cell);
  for (int corner = 0; corner < (1 << dim); ++corner) {
    double w = 1.0;
    std::size_t idx = base;
    for (int a = 0; a < dim; ++a) {
      if (corner & (1 << a)) {
        w *= loc.t[a];
        idx += grid.stride(a);
      } else {
        w *= 1.0 - loc.t[a];
      }
    }
    if (w == 0.0) continue;
    if (!node_valid(mask, idx)) return false;
    fn(idx, w);
  }
  return true;
}

struct Kernel {
  std::vector<std::ptrdiff_t> offsets;
  std::vector<double> weights;
  std::array<std::int64_t, kMaxDim> reach{};
};

Kernel build_kernel(const GridSpec& grid, double eps) {
  if (!(eps >= 2.0 * grid.max_spacing())) {
    throw Error(ErrorKind::KernelUnderresolved,
                "mollification radius must be at least two grid cells");
  }
  const int dim = grid.dim();
  Kernel k;
  for (int a = 0; a < dim; ++a) {
    auto r = static_cast<std::int64_t>(std::floor(eps / grid.spacing(a)));
    if (static_cast<double>(r) * grid.spacing(a) >= eps) --r;
    k.reach[a] = r;
  }
  MultiIndex off{};
  for (int a = 0; a < dim; ++a) off[a] = -k.reach[a];
  double total = 0.0;
  while (true) {
    double r2 = 0.0;
    std::ptrdiff_t lin = 0;
    for (int a = 0; a < dim; ++a) {
      const double d = static_cast<double>(off[a]) * grid.spacing(a);
      r2 += d * d;
      lin += static_cast<std::ptrdiff_t>(off[a]) * static_cast<std::ptrdiff_t>(grid.stride(a));
    }
    const double s = r2 / (eps * eps);
    if (s < 1.0) {
      const double w = std::exp(-1.0 / (1.0 - s));
      k.offsets.push_back(lin);
      k.weights.push_back(w);
      total += w;
    }
    int a = dim - 1;
    while (a >= 0) {
      if (++off[a] <= k.reach[a]) break;
      off[a] = -k.reach[a];
      --a;
    }
    if (a < 0) break;
  }
  for (auto& w : k.weights) w /= total;
  return k;
}

Mask mollified_mask(const GridSpec& grid, const Mask& in, const Kernel& k) {
  Mask out(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const MultiIndex idx = grid.unravel(i);
    bool ok = true;
    for (int a = 0; a < grid.dim() && ok; ++a) {
      ok = idx[a] - k.reach[a] >= 0 && idx[a] + k.reach[a] < grid.shape(a);
    }
    if (!ok) continue;
    for (auto off : k.offsets) {
      if (!in[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + off)]) {
        ok = false;
        break;
      }
    }
    out[i] = ok ? 1 : 0;
  }
  return out;
}

std::vector<double> convolve(std::span<const double> f, const Mask& out_mask, const Kernel& k) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!out_mask[i]) continue;
    double acc = 0.0;
    for (std::size_t j = 0; j < k.offsets.size(); ++j) {
      acc += k.weights[j] * f[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + k.offsets[j])];
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace

VectorField gradient(const ScalarField& psi) {
  const GridSpec& grid = psi.grid();
  const int dim = grid.dim();
  for (int a = 0; a < dim; ++a) {
    if (grid.shape(a) < 4) {
      throw Error(ErrorKind::StencilUnavailable, "gradient needs at least 4 nodes per axis");
    }
  }
  std::vector<std::vector<double>> comps(dim, std::vector<double>(grid.size(), 0.0));
  Mask mask(grid.size(), 0);
  const auto f = psi.values();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!psi.valid(i)) continue;
    const MultiIndex idx = grid.unravel(i);
    bool ok = true;
    for (int a = 0; a < dim && ok; ++a) {
      const auto d = partial_any(f, psi.mask(), grid, i, idx[a], a);
      if (d) {
        comps[a][i] = *d;
      } else {
        ok = false;
      }
    }
    if (ok) {
      mask[i] = 1;
    } else {
      for (int a = 0; a < dim; ++a) comps[a][i] = 0.0;
    }
  }
  return VectorField(grid, std::move(comps), std::move(mask));
}

std::optional<double> central_partial(std::span<const double> values, const Mask& mask,
                                      const GridSpec& grid, std::size_t node, int axis) {
  const std::int64_t ia = grid.unravel(node)[axis];
  const std::size_t s = grid.stride(axis);
  if (ia - 1 < 0 || ia + 1 >= grid.shape(axis)) return std::nullopt;
  if (!node_valid(mask, node - s) || !node_valid(mask, node + s)) return std::nullopt;
  return (values[node + s] - values[node - s]) / (2.0 * grid.spacing(axis));
}

CurlResidual curl_residual(const VectorField& u) {
  const GridSpec& grid = u.grid();
  const int dim = grid.dim();
  CurlResidual out;
  std::vector<std::vector<double>> values;
  std::vector<Mask> masks;
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      out.pairs.emplace_back(i, j);
      values.emplace_back(grid.size(), 0.0);
      masks.emplace_back(grid.size(), 0);
    }
  }
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (!u.valid(n)) continue;
    bool any = false;
    for (std::size_t p = 0; p < out.pairs.size(); ++p) {
      const auto [i, j] = out.pairs[p];
      const auto dij = central_partial(u.component(j), u.mask(), grid, n, i);
      const auto dji = central_partial(u.component(i), u.mask(), grid, n, j);
      if (!dij || !dji) continue;
      const double r = *dij - *dji;
      values[p][n] = r;
      masks[p][n] = 1;
      out.max_abs = std::max(out.max_abs, std::abs(r));
      any = true;
    }
    if (any) ++out.evaluated_nodes;
  }
  for (std::size_t p = 0; p < out.pairs.size(); ++p) {
    out.fields.emplace_back(grid, std::move(values[p]), std::move(masks[p]));
  }
  return out;
}

std::optional<Vec> try_interpolate(const VectorField& u, const Vec& p) {
  const auto loc = locate(u.grid(), p);
  if (!loc) return std::nullopt;
  Vec acc = Vec::Zero(u.dim());
  const bool ok = for_each_corner(u.grid(), *loc, u.mask(), [&](std::size_t idx, double w) {
    for (int k = 0; k < u.dim(); ++k) acc[k] += w * u.component(k)[idx];
  });
  if (!ok) return std::nullopt;
  return acc;
}

std::optional<double> try_interpolate(const ScalarField& f, const Vec& p) {
  const auto loc = locate(f.grid(), p);
  if (!loc) return std::nullopt;
  double acc = 0.0;
  const bool ok = for_each_corner(f.grid(), *loc, f.mask(),
                                  [&](std::size_t idx, double w) { acc += w * f[idx]; });
  if (!ok) return std::nullopt;
  return acc;
}

Vec interpolate(const VectorField& u, const Vec& p) {
  auto v = try_interpolate(u, p);
  if (!v) throw Error(ErrorKind::OutOfDomain, "point outside the domain or in an invalid cell");
  return *v;
}

double interpolate(const ScalarField& f, const Vec& p) {
  auto v = try_interpolate(f, p);
  if (!v) throw Error(ErrorKind::OutOfDomain, "point outside the domain or in an invalid cell");
  return *v;
}

ScalarField mollify(const ScalarField& f, double eps) {
  const Kernel k = build_kernel(f.grid(), eps);
  Mask mask = mollified_mask(f.grid(), f.mask(), k);
  auto values = convolve(f.values(), mask, k);
  return ScalarField(f.grid(), std::move(values), std::move(mask));
}

VectorField mollify(const VectorField& u, double eps) {
  const Kernel k = build_kernel(u.grid(), eps);
  Mask mask = mollified_mask(u.grid(), u.mask(), k);
  std::vector<std::vector<double>> comps;
  for (int c = 0; c < u.dim(); ++c) comps.push_back(convolve(u.component(c), mask, k));
  return VectorField(u.grid(), std::move(comps), std::move(mask));
}

VectorField normalize(const VectorField& u, double floor) {
  const GridSpec& grid = u.grid();
  std::vector<std::vector<double>> comps(u.dim(), std::vector<double>(grid.size(), 0.0));
  Mask mask(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!u.valid(i)) continue;
    const Vec v = u.at(i);
    const double n = v.norm();
    if (n < floor) continue;
    for (int k = 0; k < u.dim(); ++k) comps[k][i] = v[k] / n;
    mask[i] = 1;
  }
  return VectorField(grid, std::move(comps), std::move(mask));
}

TestFunction::TestFunction(Vec center, double radius) : center_(std::move(center)), radius_(radius) {
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw Error(ErrorKind::Precondition, "test function radius must be positive");
  }
}

double TestFunction::value(const Vec& x) const {
  const double s = (x - center_).squaredNorm() / (radius_ * radius_);
  if (s >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s));
}

Vec TestFunction::gradient(const Vec& x) const {
  const Vec d = x - center_;
  const double r2 = radius_ * radius_;
  const double s = d.squaredNorm() / r2;
  if (s >= 1.0) return Vec::Zero(d.size());
  const double q = 1.0 - s;
  const double phi = std::exp(-1.0 / q);
  return d * (-2.0 * phi / (r2 * q * q));
}

bool TestFunction::fits_inside(const GridSpec& grid) const {
  if (center_.size() != grid.dim()) return false;
  const Vec lo = grid.lower();
  const Vec hi = grid.upper();
  for (int a = 0; a < grid.dim(); ++a) {
    if (!(center_[a] - radius_ > lo[a]) || !(center_[a] + radius_ < hi[a])) return false;
  }
  return true;
}

BumpStencil::BumpStencil(const GridSpec& grid, const TestFunction& phi, const Mask& mask)
    : phi_(phi), dim_(grid.dim()) {
  if (!phi.fits_inside(grid)) {
    throw Error(ErrorKind::SupportViolation, "test function support leaves the grid box");
  }
  MultiIndex lo{}, hi{}, idx{};
  for (int a = 0; a < dim_; ++a) {
    lo[a] = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::ceil((phi.center()[a] - phi.radius() - grid.origin(a)) / grid.spacing(a))));
    hi[a] = std::min<std::int64_t>(
        grid.shape(a) - 1,
        static_cast<std::int64_t>(std::floor((phi.center()[a] + phi.radius() - grid.origin(a)) / grid.spacing(a))));
    if (lo[a] > hi[a]) return;
    idx[a] = lo[a];
  }
  const double vol = grid.cell_volume();
  const double r2 = phi.radius() * phi.radius();
  Vec x(dim_);
  while (true) {
    for (int a = 0; a < dim_; ++a) x[a] = grid.coordinate(a, idx[a]);
    const Vec d = x - phi.center();
    const double s = d.squaredNorm() / r2;
    if (s < 1.0) {
      const std::size_t lin = grid.ravel(idx);
      if (!node_valid(mask, lin)) {
        throw Error(ErrorKind::SupportViolation,
                    "test function support touches invalid node " + std::to_string(lin));
      }
      const double q = 1.0 - s;
      const double v = std::exp(-1.0 / q);
      nodes_.push_back(lin);
      weights_.push_back(v * vol);
      const double g = -2.0 * v / (r2 * q * q) * vol;
      for (int k = 0; k < dim_; ++k) gradients_.push_back(g * d[k]);
    }
    int a = dim_ - 1;
    while (a >= 0) {
      if (++idx[a] <= hi[a]) break;
      idx[a] = lo[a];
      --a;
    }
    if (a < 0) break;
  }
}

double integrate_value(const ScalarField& f, const TestFunction& phi) {
  const BumpStencil st(f.grid(), phi, f.mask());
  double acc = 0.0;
  const auto nodes = st.nodes();
  const auto w = st.weights();
  for (std::size_t j = 0; j < nodes.size(); ++j) acc += f[nodes[j]] * w[j];
  return acc;
}

double integrate_gradient_dot(const ScalarField& f, const TestFunction& phi, const Vec& v) {
  const BumpStencil st(f.grid(), phi, f.mask());
  const Vec g = weighted_gradient_sum(st, [&](std::size_t i) { return f[i]; });
  return v.dot(g);
}

double halton(std::size_t i, int base) {
  double f = 1.0;
  double r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<std::size_t>(base));
    i /= static_cast<std::size_t>(base);
  }
  return r;
}

std::vector<TestFunction> halton_test_functions(const GridSpec& grid, const Mask& mask,
                                                std::size_t count, double radius,
                                                std::size_t skip) {
  static constexpr int kBases[kMaxDim] = {2, 3, 5, 7};
  std::vector<TestFunction> out;
  const Vec lo = grid.lower();
  const Vec hi = grid.upper();
  const double margin = radius * (1.0 + 1e-9);
  for (int a = 0; a < grid.dim(); ++a) {
    if (hi[a] - lo[a] <= 2.0 * margin) {
      throw Error(ErrorKind::SupportViolation, "test function radius exceeds the grid box");
    }
  }
  const std::size_t max_tries = 1000 * std::max<std::size_t>(count, 1);
  for (std::size_t i = skip + 1; out.size() < count && i <= skip + max_tries; ++i) {
    Vec c(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) {
      c[a] = lo[a] + margin + halton(i, kBases[a]) * (hi[a] - lo[a] - 2.0 * margin);
    }
    TestFunction phi(c, radius);
    try {
      BumpStencil probe(grid, phi, mask);
    } catch (const Error&) {
      continue;
    }
    out.push_back(phi);
  }
  return out;
}

}  // namespace eikinetic
