#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "eikinetic/error.hpp"

namespace eikinetic {

inline constexpr int kMaxDim = 4;

/// Dimension-generic point/vector without heap allocation (N <= 4).
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using MultiIndex = std::array<std::int64_t, kMaxDim>;
using Mask = std::vector<std::uint8_t>;

/// Uniform Cartesian grid in 2 to 4 dimensions. Node values are stored
/// row-major (last axis fastest).
class GridSpec {
 public:
  GridSpec(std::vector<std::int64_t> shape, std::vector<double> spacing,
           std::vector<double> origin);

  /// Grid with `n` nodes per axis spanning [lo, hi] on every axis.
  static GridSpec cube(int dim, std::int64_t n, double lo, double hi);

  int dim() const { return dim_; }
  std::int64_t shape(int axis) const { return shape_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double origin(int axis) const { return origin_[axis]; }
  std::vector<std::int64_t> shape_vector() const;
  std::vector<double> spacing_vector() const;
  std::vector<double> origin_vector() const;

  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return stride_[axis]; }
  double max_spacing() const;
  double cell_volume() const;

  /// node(i) = origin + i * spacing, per axis.
  double coordinate(int axis, std::int64_t i) const {
    return origin_[axis] + static_cast<double>(i) * spacing_[axis];
  }
  Vec node(const MultiIndex& idx) const;
  Vec node(std::size_t linear) const { return node(unravel(linear)); }

  MultiIndex unravel(std::size_t linear) const;
  std::size_t ravel(const MultiIndex& idx) const;
  bool in_range(const MultiIndex& idx) const;

  Vec lower() const;
  Vec upper() const;
  /// True when `p` lies in the closed bounding box.
  bool contains(const Vec& p) const;

  bool operator==(const GridSpec& other) const;

 private:
  int dim_;
  std::array<std::int64_t, kMaxDim> shape_{};
  std::array<double, kMaxDim> spacing_{};
  std::array<double, kMaxDim> origin_{};
  std::array<std::size_t, kMaxDim> stride_{};
  std::size_t size_ = 0;
};

/// Node-sampled scalar function with a validity mask. Values at invalid nodes
/// are unspecified (fast marching leaves +inf there).
class ScalarField {
 public:
  ScalarField(GridSpec grid, std::vector<double> values, Mask mask = {});

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool valid(std::size_t i) const { return mask_[i] != 0; }
  const Mask& mask() const { return mask_; }
  std::size_t valid_count() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
  Mask mask_;
};

/// Node-sampled vector field, one array per component, plus validity mask.
class VectorField {
 public:
  VectorField(GridSpec grid, std::vector<std::vector<double>> components, Mask mask = {});

  const GridSpec& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  std::span<const double> component(int k) const { return components_[k]; }
  const std::vector<std::vector<double>>& components() const { return components_; }
  bool valid(std::size_t i) const { return mask_[i] != 0; }
  const Mask& mask() const { return mask_; }
  std::size_t valid_count() const;

  Vec at(std::size_t i) const;

  /// max over valid nodes of | |u| - 1 |.
  double unit_norm_defect() const;
  bool is_unit(double tol = 1e-12) const { return unit_norm_defect() <= tol; }

 private:
  GridSpec grid_;
  std::vector<std::vector<double>> components_;
  Mask mask_;
};

/// Throws Precondition unless `u` is unit-norm on its valid nodes.
void require_unit(const VectorField& u, double tol = 1e-12);

Vec make_vec(std::initializer_list<double> values);
Vec make_vec(std::span<const double> values);
Vec unit_axis(int dim, int axis);

}  // namespace eikinetic
