#include "eikinetic/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace eikinetic {

namespace {

constexpr std::array<std::size_t, 5> kRungs = {256, 1024, 4096, 10000, 50000};

constexpr QuadratureCalibration kTable[] = {
#include "quadrature_table.inc"
};

std::vector<Vec> probe_normals(int dim) {
  std::vector<Vec> out;
  for (int k = 0; k < dim; ++k) out.push_back(unit_axis(dim, k));
  Vec diag = Vec::Ones(dim);
  out.push_back(diag / diag.norm());
  Vec skew(dim);
  for (int k = 0; k < dim; ++k) skew[k] = 0.3 + 0.7 * k * k - 0.4 * k;
  out.push_back(skew / skew.norm());
  return out;
}

}  // namespace

QuadratureError measure_quadrature_error(const DirectionSet& ds) {
  const int dim = ds.dim();
  const double area = sphere_area(dim);
  QuadratureError e;
  e.mass = std::abs(ds.total_weight() - area) / area;
  e.first = ds.first_moment().norm();
  e.second = (ds.second_moment() - (area / dim) * Mat::Identity(dim, dim)).cwiseAbs().maxCoeff();
  const double v = unit_ball_volume(dim - 1);
  for (const auto& n : probe_normals(dim)) {
    e.half_first = std::max(e.half_first, (half_sphere_first_moment(ds, n) - v * n).norm());
  }
  return e;
}

QuadratureError measure_quadrature_rung(int dim, DirectionScheme scheme, std::size_t count) {
  QuadratureError worst;
  const std::uint64_t seeds = scheme == DirectionScheme::MonteCarlo ? 5 : 1;
  for (std::uint64_t s = 1; s <= seeds; ++s) {
    const auto e = measure_quadrature_error(build_directions(dim, count, scheme, s));
    worst.mass = std::max(worst.mass, e.mass);
    worst.first = std::max(worst.first, e.first);
    worst.second = std::max(worst.second, e.second);
    worst.half_first = std::max(worst.half_first, e.half_first);
  }
  return worst;
}

std::span<const std::size_t> calibration_rungs() { return kRungs; }

std::span<const QuadratureCalibration> quadrature_table() { return kTable; }

std::optional<QuadratureError> quadrature_tolerance(int dim, DirectionScheme scheme, std::size_t count) {
  const QuadratureCalibration* best = nullptr;
  for (const auto& row : kTable) {
    if (row.dim != dim || row.scheme != scheme || row.count > count) continue;
    if (!best || row.count > best->count) best = &row;
  }
  if (!best) return std::nullopt;
  return best->tolerance;
}

double pinned_tolerance(double measured) {
  const double t = 2.0 * measured;
  if (t <= 1e-13) return 1e-13;
  const double scale = std::pow(10.0, std::floor(std::log10(t)) - 1.0);
  return std::ceil(t / scale) * scale;
}

}  // namespace eikinetic
