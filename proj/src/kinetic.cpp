#include "eikinetic/kinetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "eikinetic/generators.hpp"
#include "eikinetic/parallel.hpp"

namespace eikinetic {

namespace {

void require_unit_direction(const Vec& xi, int dim) {
  if (xi.size() != dim) throw Error(ErrorKind::Precondition, "direction has wrong dimension");
  if (std::abs(xi.norm() - 1.0) > 1e-12) throw Error(ErrorKind::Precondition, "direction must be a unit vector");
}

double dot_at(const VectorField& u, std::size_t i, const Vec& xi) {
  double s = 0.0;
  for (int k = 0; k < u.dim(); ++k) s += u.component(k)[i] * xi[k];
  return s;
}

std::vector<BumpStencil> build_stencils(const VectorField& u, std::span<const TestFunction> phis) {
  std::vector<BumpStencil> out;
  out.reserve(phis.size());
  for (const auto& phi : phis) {
    if (phi.center().size() != u.dim()) {
      throw Error(ErrorKind::Precondition, "test function dimension does not match the field");
    }
    out.emplace_back(u.grid(), phi, u.mask());
  }
  return out;
}

void finish(ResidualReport& report) {
  report.max_abs = 0.0;
  report.worst = 0;
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const double a = std::abs(report.entries[i].value);
    if (a > report.max_abs) {
      report.max_abs = a;
      report.worst = i;
    }
  }
  report.verdict = verdict_for(report.max_abs, report.tolerance);
}

// Every residual variant funnels through here so identical (xi, v, phi)
// triples give identical numbers.
ResidualReport residual_core(const VectorField& u, const std::vector<Vec>& xis,
                             const std::vector<std::vector<Vec>>& tangents,
                             std::span<const TestFunction> phis, double tolerance) {
  const auto stencils = build_stencils(u, phis);
  const std::size_t nphi = phis.size();
  const std::size_t nv = tangents.empty() ? 0 : tangents.front().size();
  ResidualReport report;
  report.tolerance = tolerance;
  report.entries.resize(xis.size() * nv * nphi);
  parallel_for(xis.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      const Vec& xi = xis[a];
      for (std::size_t p = 0; p < nphi; ++p) {
        const Vec g = weighted_gradient_sum(stencils[p], [&](std::size_t i) {
          return dot_at(u, i, xi) > 0.0 ? 1.0 : 0.0;
        });
        for (std::size_t b = 0; b < nv; ++b) {
          auto& e = report.entries[(a * nv + b) * nphi + p];
          e.xi_index = a;
          e.v_index = b;
          e.phi_index = p;
          e.xi = xi;
          e.v = tangents[a][b];
          e.phi_center = phis[p].center();
          e.phi_radius = phis[p].radius();
          e.value = -tangents[a][b].dot(g);
        }
      }
    }
  });
  finish(report);
  return report;
}

std::vector<Vec> direction_list(const DirectionSet& ds, int dim) {
  if (ds.dim() != dim) throw Error(ErrorKind::Precondition, "direction set dimension does not match the field");
  std::vector<Vec> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out.push_back(ds.node(i));
  return out;
}

}  // namespace

ChiField chi(const VectorField& u, const Vec& xi) {
  require_unit_direction(xi, u.dim());
  ChiField out{u.grid(), xi, std::vector<std::uint8_t>(u.grid().size(), 0), u.mask()};
  for (std::size_t i = 0; i < u.grid().size(); ++i) {
    out.values[i] = dot_at(u, i, xi) > 0.0 ? 1 : 0;
  }
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

Verdict verdict_for(double max_abs, double tolerance) {
  if (max_abs <= tolerance) return Verdict::Pass;
  if (max_abs > 10.0 * tolerance) return Verdict::Fail;
  return Verdict::Indeterminate;
}

ResidualReport kinetic_residual(const VectorField& u, const DirectionSet& ds, int tangents_per_xi,
                                std::span<const TestFunction> phis, double tolerance) {
  const auto xis = direction_list(ds, u.dim());
  std::vector<std::vector<Vec>> tangents;
  tangents.reserve(xis.size());
  for (const auto& xi : xis) tangents.push_back(tangent_set(xi, tangents_per_xi));
  return residual_core(u, xis, tangents, phis, tolerance);
}

ResidualReport kinetic_residual_2d(const VectorField& u, const DirectionSet& ds,
                                   std::span<const TestFunction> phis, double tolerance) {
  if (u.dim() != 2) throw Error(ErrorKind::Unsupported, "kinetic_residual_2d needs a 2D field");
  const auto xis = direction_list(ds, 2);
  std::vector<std::vector<Vec>> tangents;
  tangents.reserve(xis.size());
  for (const auto& xi : xis) tangents.push_back({make_vec({-xi[1], xi[0]})});
  return residual_core(u, xis, tangents, phis, tolerance);
}

ResidualReport weak_kinetic_residual(const VectorField& u, const DirectionSet& equator,
                                     std::span<const TestFunction> phis, double tolerance) {
  const int dim = u.dim();
  if (dim < 3) throw Error(ErrorKind::Unsupported, "the weakened formulation needs dim >= 3");
  if (equator.dim() == dim - 1) {
    return kinetic_residual(u, embed_equator(equator), dim - 1, phis, tolerance);
  }
  if (equator.dim() != dim) throw Error(ErrorKind::Precondition, "equatorial set has wrong dimension");
  for (std::size_t i = 0; i < equator.size(); ++i) {
    if (std::abs(equator.node(i)[dim - 1]) > 1e-12) {
      throw Error(ErrorKind::Precondition, "equatorial directions must have xi_N = 0");
    }
  }
  return kinetic_residual(u, equator, dim - 1, phis, tolerance);
}

ResidualCalibration calibrate_residual(const GridSpec& grid, const DirectionSet& ds, int tangents_per_xi,
                                       double phi_radius, std::size_t phi_count) {
  const int dim = grid.dim();
  const Vec center = 0.5 * (grid.lower() + grid.upper());
  const VectorField vortex = gen_vortex(grid, center, 1);
  const VectorField constant = gen_constant(grid, Vec::Ones(dim) / std::sqrt(static_cast<double>(dim)));
  const auto phis = halton_test_functions(grid, vortex.mask(), phi_count, phi_radius);
  if (phis.empty()) throw Error(ErrorKind::Configuration, "no calibration test function fits the grid");
  ResidualCalibration cal;
  cal.constant_max = kinetic_residual(constant, ds, tangents_per_xi, phis, 0.0).max_abs;
  cal.vortex_max = kinetic_residual(vortex, ds, tangents_per_xi, phis, 0.0).max_abs;
  cal.tolerance = std::max(cal.factor * std::max(cal.constant_max, cal.vortex_max), cal.floor);
  return cal;
}

Reconstruction averaging_reconstruct(const VectorField& u, const DirectionSet& ds) {
  require_unit(u);
  const int dim = u.dim();
  if (ds.dim() != dim) throw Error(ErrorKind::Precondition, "direction set dimension does not match the field");
  const GridSpec& grid = u.grid();
  const double scale = 1.0 / unit_ball_volume(dim - 1);
  const auto nodes = ds.node_data();
  const auto weights = ds.weights();
  const std::size_t count = ds.size();
  std::vector<std::vector<double>> comps(dim, std::vector<double>(grid.size(), 0.0));
  std::vector<double> errors(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    std::array<double, kMaxDim> z{};
    for (std::size_t i = begin; i < end; ++i) {
      if (!u.valid(i)) continue;
      for (int k = 0; k < dim; ++k) z[k] = u.component(k)[i];
      std::array<double, kMaxDim> acc{};
      for (std::size_t j = 0; j < count; ++j) {
        const double* xi = nodes.data() + j * dim;
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += z[k] * xi[k];
        const double w = s > 0.0 ? weights[j] : 0.0;
        for (int k = 0; k < dim; ++k) acc[k] += w * xi[k];
      }
      double err = 0.0;
      for (int k = 0; k < dim; ++k) {
        comps[k][i] = scale * acc[k];
        err += (comps[k][i] - z[k]) * (comps[k][i] - z[k]);
      }
      errors[i] = std::sqrt(err);
    }
  });
  Reconstruction out{VectorField(grid, std::move(comps), u.mask()), 0.0};
  for (double e : errors) out.max_error = std::max(out.max_error, e);
  return out;
}

OrderingReport ordering_check(const VectorField& u, std::size_t pair_count, std::size_t xi_per_pair,
                              double delta, std::uint64_t seed) {
  require_unit(u);
  const GridSpec& grid = u.grid();
  const int dim = u.dim();
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (u.valid(i)) valid.push_back(i);
  }
  if (valid.size() < 2) throw Error(ErrorKind::InsufficientSamples, "fewer than two valid nodes");
  double hmin = grid.spacing(0);
  for (int a = 1; a < dim; ++a) hmin = std::min(hmin, grid.spacing(a));

  OrderingReport report;
  report.delta = delta;
  report.seed = seed;
  SeededRng rng(seed);
  const std::size_t max_attempts = 100 * std::max<std::size_t>(pair_count, 1);
  for (std::size_t attempt = 0; attempt < max_attempts && report.pairs_tested < pair_count; ++attempt) {
    const std::size_t iy = valid[rng.below(valid.size())];
    const std::size_t iz = valid[rng.below(valid.size())];
    if (iy == iz) continue;
    const Vec y = grid.node(iy);
    const Vec z = grid.node(iz);
    const Vec d = z - y;
    const double len = d.norm();
    const auto steps = static_cast<std::size_t>(std::ceil(len / (0.5 * hmin)));
    bool inside = true;
    for (std::size_t s = 1; s < steps && inside; ++s) {
      inside = try_interpolate(u, y + (static_cast<double>(s) / static_cast<double>(steps)) * d).has_value();
    }
    if (!inside) continue;
    ++report.pairs_tested;
    const Vec dn = d / len;
    const Vec uy = u.at(iy);
    const Vec uz = u.at(iz);
    for (std::size_t q = 0; q < xi_per_pair; ++q) {
      Vec xi;
      if (dim == 2) {
        xi = make_vec({-dn[1], dn[0]});
        if (rng.uniform() < 0.5) xi = -xi;
      } else {
        do {
          xi = random_unit(rng, dim);
          xi -= xi.dot(dn) * dn;
        } while (xi.norm() < 1e-6);
        xi.normalize();
      }
      ++report.checks;
      const double a = uy.dot(xi);
      const double b = uz.dot(xi);
      if ((a > delta && b < -delta) || (a < -delta && b > delta)) {
        ++report.violations;
        report.worst_margin = std::max(report.worst_margin, std::min(std::abs(a), std::abs(b)));
      }
    }
  }
  return report;
}

TraceField trace_on_segment(const VectorField& u, const Vec& a, const Vec& b, TraceOptions options) {
  const GridSpec& grid = u.grid();
  const int dim = grid.dim();
  if (a.size() != dim || b.size() != dim) throw Error(ErrorKind::Precondition, "segment endpoints have wrong dimension");
  const Vec axis = b - a;
  const double len = axis.norm();
  if (!(len > 0.0)) throw Error(ErrorKind::Geometry, "degenerate segment");
  const double h = grid.max_spacing();
  if (options.radii.empty()) options.radii = {16.0 * h, 8.0 * h, 4.0 * h};
  for (std::size_t i = 0; i < options.radii.size(); ++i) {
    if (!(options.radii[i] > 0.0) || (i > 0 && !(options.radii[i] < options.radii[i - 1]))) {
      throw Error(ErrorKind::Precondition, "trace radii must be positive and decreasing");
    }
  }
  if (options.samples < 2) throw Error(ErrorKind::Precondition, "trace needs at least two samples");
  const Vec e = axis / len;
  const auto frame = tangent_basis(e);

  // The largest square tube must stay inside the box.
  const double r0 = options.radii.front();
  const Vec lo = grid.lower();
  const Vec hi = grid.upper();
  for (int k = 0; k < dim; ++k) {
    double reach = 0.0;
    for (const auto& t : frame) reach += r0 * std::abs(t[k]);
    if (std::min(a[k], b[k]) - reach < lo[k] - 1e-12 || std::max(a[k], b[k]) + reach > hi[k] + 1e-12) {
      throw Error(ErrorKind::Geometry, "trace tube leaves the grid box");
    }
  }

  double hmin = grid.spacing(0);
  for (int k = 1; k < dim; ++k) hmin = std::min(hmin, grid.spacing(k));
  const int m = dim - 1;
  const auto per_axis_cap = static_cast<std::size_t>(std::floor(std::pow(40000.0, 1.0 / m)));

  TraceField out;
  out.a = a;
  out.b = b;
  out.radii = options.radii;
  out.unit_tolerance = options.unit_tolerance;
  out.samples.resize(options.samples);
  parallel_for(options.samples, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      TraceSample& s = out.samples[j];
      s.t = static_cast<double>(j) / static_cast<double>(options.samples - 1);
      s.point = a + s.t * axis;
      s.available = true;
      for (double r : options.radii) {
        const std::size_t n = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::ceil(2.0 * r / (0.5 * hmin))), 4, per_axis_cap);
        std::size_t total = 1;
        for (int k = 0; k < m; ++k) total *= n;
        Vec acc = Vec::Zero(dim);
        std::array<std::size_t, kMaxDim> idx{};
        bool ok = true;
        for (std::size_t q = 0; q < total && ok; ++q) {
          std::size_t rem = q;
          Vec p = s.point;
          for (int k = 0; k < m; ++k) {
            idx[k] = rem % n;
            rem /= n;
            const double off = -r + (static_cast<double>(idx[k]) + 0.5) * (2.0 * r / static_cast<double>(n));
            p += off * frame[k];
          }
          const auto v = try_interpolate(u, p);
          if (!v) ok = false;
          else acc += *v;
        }
        if (!ok) {
          s.available = false;
          s.averages.clear();
          break;
        }
        s.averages.push_back(acc / static_cast<double>(total));
      }
      if (!s.available) continue;
      const Vec& last = s.averages.back();
      if (s.averages.size() >= 2) s.cauchy = (last - s.averages[s.averages.size() - 2]).norm();
      s.reliable = std::abs(last.norm() - 1.0) <= options.unit_tolerance;
      s.value = s.reliable ? Vec(last / last.norm()) : last;
    }
  });
  return out;
}

CharacteristicPath characteristic_trace(const VectorField& u, const Vec& x0, double step, double max_len) {
  if (!(step > 0.0) || !(max_len > 0.0)) throw Error(ErrorKind::Precondition, "step and length must be positive");
  CharacteristicPath path;
  auto v0 = try_interpolate(u, x0);
  if (!v0) return path;
  path.points.push_back(x0);
  Vec x = x0;
  Vec k1 = *v0;
  while (path.length + step <= max_len * (1.0 + 1e-12)) {
    const auto k2 = try_interpolate(u, x + 0.5 * step * k1);
    if (!k2) break;
    const Vec next = x + step * *k2;
    const auto v = try_interpolate(u, next);
    if (!v) break;
    path.length += (next - x).norm();
    path.points.push_back(next);
    x = next;
    k1 = *v;
  }
  const Vec& first = path.points.front();
  const Vec chord = path.points.back() - first;
  const double cl = chord.norm();
  for (const auto& p : path.points) {
    const Vec d = p - first;
    const double dev = cl > 0.0 ? (d - d.dot(chord / cl) * (chord / cl)).norm() : d.norm();
    path.chord_deviation = std::max(path.chord_deviation, dev);
  }
  return path;
}

namespace {

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

GaussRule gauss_legendre(int n) {
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    rule.x[i] = z;
    rule.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

const GaussRule& gauss32() {
  static const GaussRule rule = gauss_legendre(32);
  return rule;
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

}  // namespace

AngularProfile smoothed_profile(double theta, double theta0, double k) {
  const double half_pi = 0.5 * std::numbers::pi;
  const double d = wrap_angle(theta - theta0);
  if (k <= 0.0) {
    if (std::abs(d) < half_pi) return {std::cos(d), -std::sin(d)};
    return {};
  }
  const double eps = 1.0 / k;
  if (eps >= half_pi) throw Error(ErrorKind::Precondition, "smoothing parameter too small");
  // Integrate rho(s) phi(d - s) over s in (-eps, eps), split where d - s hits +-pi/2.
  std::vector<double> cuts = {-eps, eps};
  for (double kink : {-half_pi, half_pi}) {
    for (int wrap = -1; wrap <= 1; ++wrap) {
      const double s = d - kink - 2.0 * std::numbers::pi * wrap;
      if (s > -eps && s < eps) cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  const GaussRule& g = gauss32();
  double mass = 0.0, value = 0.0, deriv = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c], hi = cuts[c + 1];
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const double s = mid + half * g.x[q];
      const double t = s / eps;
      const double rho = std::exp(-1.0 / (1.0 - t * t)) * g.w[q] * half;
      mass += rho;
      const double arg = wrap_angle(d - s);
      if (std::abs(arg) < half_pi) {
        value += rho * std::cos(arg);
        deriv -= rho * std::sin(arg);
      }
    }
  }
  return {value / mass, deriv / mass};
}

Vec entropy_flux(const Vec& z, const Vec& xi, double k) {
  if (k <= 0.0) {
    if (z.dot(xi) > 0.0) return make_vec({-xi[1], xi[0]});
    return Vec::Zero(2);
  }
  const double theta = std::atan2(z[1], z[0]);
  const double theta0 = std::atan2(xi[1], xi[0]);
  const AngularProfile p = smoothed_profile(theta, theta0, k);
  return make_vec({-p.derivative * z[0] - p.value * z[1], -p.derivative * z[1] + p.value * z[0]});
}

EntropyReport entropy_residual_2d(const VectorField& u, const Vec& xi, std::span<const TestFunction> phis,
                                  std::span<const double> ks, double tolerance) {
  if (u.dim() != 2) throw Error(ErrorKind::Unsupported, "entropy residuals are 2D only");
  require_unit(u);
  require_unit_direction(xi, 2);
  for (double k : ks) {
    if (!(k > 0.0)) throw Error(ErrorKind::Precondition, "smoothing parameters must be positive");
  }
  const auto stencils = build_stencils(u, phis);
  EntropyReport report;
  report.xi = xi;
  report.ks.assign(ks.begin(), ks.end());
  report.tolerance = tolerance;
  report.entries.resize(phis.size());
  parallel_for(phis.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto& st = stencils[p];
      const auto nodes = st.nodes();
      const auto grads = st.gradients();
      EntropyEntry& e = report.entries[p];
      e.phi_index = p;
      e.smoothed.assign(ks.size(), 0.0);
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const Vec z = u.at(nodes[j]);
        const double gx = grads[2 * j], gy = grads[2 * j + 1];
        const Vec sharp = entropy_flux(z, xi, 0.0);
        e.sharp += sharp[0] * gx + sharp[1] * gy;
        for (std::size_t q = 0; q < ks.size(); ++q) {
          const Vec f = entropy_flux(z, xi, ks[q]);
          e.smoothed[q] += f[0] * gx + f[1] * gy;
        }
      }
    }
  });
  report.smoothed_max.assign(ks.size(), 0.0);
  report.gap.assign(ks.size(), 0.0);
  double worst = 0.0;
  for (const auto& e : report.entries) {
    report.sharp_max = std::max(report.sharp_max, std::abs(e.sharp));
    for (std::size_t q = 0; q < ks.size(); ++q) {
      report.smoothed_max[q] = std::max(report.smoothed_max[q], std::abs(e.smoothed[q]));
      report.gap[q] = std::max(report.gap[q], std::abs(e.smoothed[q] - e.sharp));
    }
  }
  worst = report.sharp_max;
  for (double v : report.smoothed_max) worst = std::max(worst, v);
  report.verdict = verdict_for(worst, tolerance);
  return report;
}

CurlSymmetryReport curl_symmetry_check(const VectorField& u) {
  const int dim = u.dim();
  if (dim < 3) throw Error(ErrorKind::Unsupported, "curl symmetry check needs dim >= 3");
  const GridSpec& grid = u.grid();
  const int last = dim - 1;
  CurlSymmetryReport report;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!u.valid(i)) continue;
    bool counted = false;
    for (int k = 0; k < last; ++k) {
      const auto a = central_partial(u.component(last), u.mask(), grid, i, k);
      const auto b = central_partial(u.component(k), u.mask(), grid, i, last);
      if (!a || !b) continue;
      counted = true;
      const double r = std::abs(*a - *b);
      if (r > report.max_abs || report.worst_axis < 0) {
        report.max_abs = r;
        report.worst_axis = k;
      }
    }
    if (counted) ++report.evaluated_nodes;
  }
  return report;
}

Reduction dimensional_reduce(const VectorField& u, double floor) {
  const int dim = u.dim();
  if (dim < 3) throw Error(ErrorKind::Unsupported, "dimensional reduction needs dim >= 3");
  const GridSpec& grid = u.grid();
  const int m = dim - 1;
  auto shape = grid.shape_vector();
  auto spacing = grid.spacing_vector();
  auto origin = grid.origin_vector();
  const std::int64_t slices = shape.back();
  shape.pop_back();
  spacing.pop_back();
  origin.pop_back();
  GridSpec reduced(shape, spacing, origin);

  std::vector<std::size_t> near_pole;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!u.valid(i)) continue;
    double n2 = 0.0;
    for (int k = 0; k < m; ++k) n2 += u.component(k)[i] * u.component(k)[i];
    if (std::sqrt(n2) < floor) near_pole.push_back(i);
  }
  if (!near_pole.empty()) {
    std::string msg = std::to_string(near_pole.size()) + " valid nodes have |u'| below the floor, first at node";
    for (std::size_t j = 0; j < std::min<std::size_t>(near_pole.size(), 5); ++j) msg += " " + std::to_string(near_pole[j]);
    throw Error(ErrorKind::NearPole, msg);
  }

  std::vector<std::vector<double>> comps(m, std::vector<double>(reduced.size(), 0.0));
  Mask mask(reduced.size(), 0);
  Reduction out{VectorField(reduced, comps, mask), 0.0, 0};
  double deviation = 0.0;
  for (std::size_t r = 0; r < reduced.size(); ++r) {
    bool ok = true;
    for (std::int64_t j = 0; j < slices && ok; ++j) ok = u.valid(r * slices + j);
    if (!ok) continue;
    Vec mean = Vec::Zero(m);
    for (std::int64_t j = 0; j < slices; ++j) {
      const std::size_t i = r * slices + j;
      Vec p(m);
      for (int k = 0; k < m; ++k) p[k] = u.component(k)[i];
      mean += p / p.norm();
    }
    const double norm = mean.norm();
    if (norm < floor) continue;
    mean /= norm;
    for (std::int64_t j = 0; j < slices; ++j) {
      const std::size_t i = r * slices + j;
      Vec p(m);
      for (int k = 0; k < m; ++k) p[k] = u.component(k)[i];
      deviation = std::max(deviation, (p / p.norm() - mean).norm());
    }
    for (int k = 0; k < m; ++k) comps[k][r] = mean[k];
    mask[r] = 1;
    ++out.reduced_nodes;
  }
  out.field = VectorField(reduced, std::move(comps), std::move(mask));
  out.slice_deviation = deviation;
  return out;
}

StreamFormReport stream_form_check(const VectorField& u, const StreamLabel& label, double tolerance) {
  const int dim = u.dim();
  if (dim < 3) throw Error(ErrorKind::Unsupported, "stream form check needs dim >= 3");
  const int m = dim - 1;
  if (label.value.size() != m) throw Error(ErrorKind::Precondition, "stream label has wrong dimension");
  if (label.kind == StreamLabel::Kind::Constant && std::abs(label.value.norm() - 1.0) > 1e-9) {
    throw Error(ErrorKind::Precondition, "constant label must be a unit vector");
  }
  const GridSpec& grid = u.grid();
  const double h = grid.max_spacing();

  struct Welford {
    std::size_t n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
      ++n;
      const double d = x - mean;
      mean += d / static_cast<double>(n);
      m2 += d * (x - mean);
    }
    double std_dev() const { return n > 1 ? std::sqrt(std::max(m2 / static_cast<double>(n), 0.0)) : 0.0; }
  };
  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<Welford, Welford>> bins;

  StreamFormReport report;
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!u.valid(i)) continue;
    const Vec x = grid.node(i);
    Vec xp = x.head(m);
    Vec up(m);
    for (int k = 0; k < m; ++k) up[k] = u.component(k)[i];
    double alpha;
    Vec grad_alpha;
    if (label.kind == StreamLabel::Kind::Vortex) {
      const Vec d = xp - label.value;
      alpha = d.norm();
      grad_alpha = alpha > 1e-12 ? Vec(d / alpha) : Vec::Zero(m);
    } else {
      alpha = label.value.dot(xp);
      grad_alpha = label.value;
    }
    const double un = u.component(m)[i];
    const double norm = up.norm();
    if (norm > 1e-6 && grad_alpha.norm() > 0.0) {
      report.direction_defect = std::max(report.direction_defect, 1.0 - std::abs(up.dot(grad_alpha) / norm));
    }
    const auto key = std::make_pair(static_cast<std::int64_t>(std::floor(alpha / h)),
                                    static_cast<std::int64_t>(std::floor(x[m] / h)));
    auto& cell = bins[key];
    cell.first.add(un);
    cell.second.add(norm);
  }
  for (const auto& [key, cell] : bins) {
    if (cell.first.n < 2) continue;
    ++report.bins;
    report.max_std_un = std::max(report.max_std_un, cell.first.std_dev());
    report.max_std_norm = std::max(report.max_std_norm, cell.second.std_dev());
  }
  const double worst = std::max({report.max_std_un, report.max_std_norm, report.direction_defect});
  report.verdict = worst <= tolerance ? Verdict::Pass : Verdict::Fail;
  return report;
}

}  // namespace eikinetic
