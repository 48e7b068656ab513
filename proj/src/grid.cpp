#include "eikinetic/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace eikinetic {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidGrid: return "invalid-grid";
    case ErrorKind::StencilUnavailable: return "stencil-unavailable";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::KernelUnderresolved: return "kernel-underresolved";
    case ErrorKind::SupportViolation: return "support-violation";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::NearPole: return "near-pole";
    case ErrorKind::CriticalPoint: return "critical-point";
    case ErrorKind::NoSamples: return "no-samples";
    case ErrorKind::InsufficientSamples: return "insufficient-samples";
    case ErrorKind::DegenerateContour: return "degenerate-contour";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

GridSpec::GridSpec(std::vector<std::int64_t> shape, std::vector<double> spacing,
                   std::vector<double> origin)
    : dim_(static_cast<int>(shape.size())) {
  if (dim_ < 2 || dim_ > kMaxDim) {
    throw Error(ErrorKind::InvalidGrid, "dimension must be 2..4, got " + std::to_string(dim_));
  }
  if (spacing.size() != shape.size() || origin.size() != shape.size()) {
    throw Error(ErrorKind::InvalidGrid, "shape/spacing/origin length mismatch");
  }
  for (int a = 0; a < dim_; ++a) {
    if (shape[a] < 4) {
      throw Error(ErrorKind::InvalidGrid, "every axis needs at least 4 nodes");
    }
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) {
      throw Error(ErrorKind::InvalidGrid, "spacing must be positive and finite");
    }
    if (!std::isfinite(origin[a])) {
      throw Error(ErrorKind::InvalidGrid, "origin must be finite");
    }
    shape_[a] = shape[a];
    spacing_[a] = spacing[a];
    origin_[a] = origin[a];
  }
  std::size_t s = 1;
  for (int a = dim_ - 1; a >= 0; --a) {
    stride_[a] = s;
    s *= static_cast<std::size_t>(shape_[a]);
  }
  size_ = s;
}

GridSpec GridSpec::cube(int dim, std::int64_t n, double lo, double hi) {
  const double h = (hi - lo) / static_cast<double>(n - 1);
  return GridSpec(std::vector<std::int64_t>(dim, n), std::vector<double>(dim, h),
                  std::vector<double>(dim, lo));
}

std::vector<std::int64_t> GridSpec::shape_vector() const {
  return {shape_.begin(), shape_.begin() + dim_};
}
std::vector<double> GridSpec::spacing_vector() const {
  return {spacing_.begin(), spacing_.begin() + dim_};
}
std::vector<double> GridSpec::origin_vector() const {
  return {origin_.begin(), origin_.begin() + dim_};
}

double GridSpec::max_spacing() const {
  return *std::max_element(spacing_.begin(), spacing_.begin() + dim_);
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= spacing_[a];
  return v;
}

Vec GridSpec::node(const MultiIndex& idx) const {
  Vec p(dim_);
  for (int a = 0; a < dim_; ++a) p[a] = coordinate(a, idx[a]);
  return p;
}

MultiIndex GridSpec::unravel(std::size_t linear) const {
  MultiIndex idx{};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = static_cast<std::int64_t>(linear / stride_[a]);
    linear %= stride_[a];
  }
  return idx;
}

std::size_t GridSpec::ravel(const MultiIndex& idx) const {
  std::size_t linear = 0;
  for (int a = 0; a < dim_; ++a) linear += static_cast<std::size_t>(idx[a]) * stride_[a];
  return linear;
}

bool GridSpec::in_range(const MultiIndex& idx) const {
  for (int a = 0; a < dim_; ++a) {
    if (idx[a] < 0 || idx[a] >= shape_[a]) return false;
  }
  return true;
}

Vec GridSpec::lower() const {
  Vec p(dim_);
  for (int a = 0; a < dim_; ++a) p[a] = origin_[a];
  return p;
}

Vec GridSpec::upper() const {
  Vec p(dim_);
  for (int a = 0; a < dim_; ++a) p[a] = coordinate(a, shape_[a] - 1);
  return p;
}

bool GridSpec::contains(const Vec& p) const {
  if (p.size() != dim_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (p[a] < origin_[a] || p[a] > coordinate(a, shape_[a] - 1)) return false;
  }
  return true;
}

bool GridSpec::operator==(const GridSpec& other) const {
  if (dim_ != other.dim_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (shape_[a] != other.shape_[a] || spacing_[a] != other.spacing_[a] ||
        origin_[a] != other.origin_[a]) {
      return false;
    }
  }
  return true;
}

namespace {

Mask full_mask_or(Mask mask, std::size_t n) {
  if (mask.empty()) return Mask(n, 1);
  if (mask.size() != n) throw Error(ErrorKind::Precondition, "mask length must equal node count");
  for (auto& m : mask) m = m ? 1 : 0;
  return mask;
}

}  // namespace

ScalarField::ScalarField(GridSpec grid, std::vector<double> values, Mask mask)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorKind::Precondition, "scalar values length must equal node count");
  }
  mask_ = full_mask_or(std::move(mask), grid_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (mask_[i] && !std::isfinite(values_[i])) {
      throw Error(ErrorKind::Precondition, "non-finite scalar value at valid node " + std::to_string(i));
    }
  }
}

std::size_t ScalarField::valid_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
}

VectorField::VectorField(GridSpec grid, std::vector<std::vector<double>> components, Mask mask)
    : grid_(std::move(grid)), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != grid_.dim()) {
    throw Error(ErrorKind::Precondition, "vector field needs one component per dimension");
  }
  for (const auto& c : components_) {
    if (c.size() != grid_.size()) {
      throw Error(ErrorKind::Precondition, "component length must equal node count");
    }
  }
  mask_ = full_mask_or(std::move(mask), grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!mask_[i]) continue;
    for (const auto& c : components_) {
      if (!std::isfinite(c[i])) {
        throw Error(ErrorKind::Precondition, "non-finite vector value at valid node " + std::to_string(i));
      }
    }
  }
}

std::size_t VectorField::valid_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
}

Vec VectorField::at(std::size_t i) const {
  Vec v(dim());
  for (int k = 0; k < dim(); ++k) v[k] = components_[k][i];
  return v;
}

double VectorField::unit_norm_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!mask_[i]) continue;
    double s = 0.0;
    for (int k = 0; k < dim(); ++k) s += components_[k][i] * components_[k][i];
    worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
  }
  return worst;
}

void require_unit(const VectorField& u, double tol) {
  const double defect = u.unit_norm_defect();
  if (defect > tol) {
    throw Error(ErrorKind::Precondition,
                "field must be unit-norm on valid nodes (defect " + std::to_string(defect) + ")");
  }
}

Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Vec make_vec(std::span<const double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

Vec unit_axis(int dim, int axis) {
  Vec v = Vec::Zero(dim);
  v[axis] = 1.0;
  return v;
}

}  // namespace eikinetic
