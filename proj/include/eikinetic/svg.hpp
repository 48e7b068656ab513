#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eikinetic/grid.hpp"

namespace eikinetic {

/// A 2D axis-aligned view of a field: two displayed axes, with every other
/// axis pinned to one node index.
struct Slice2D {
  int axis_x = 0;
  int axis_y = 1;
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  double x0 = 0.0, y0 = 0.0, hx = 1.0, hy = 1.0;
  /// Row-major over (ix, iy), NaN where invalid.
  std::vector<double> scalar;
  std::vector<double> vx;
  std::vector<double> vy;
};

/// `fixed` pins (axis, coordinate); required for N >= 3 (remaining extra axes
/// sit at their middle node).
Slice2D slice_field(const VectorField& u, std::optional<std::pair<int, double>> fixed = std::nullopt);
Slice2D slice_field(const ScalarField& f, std::optional<std::pair<int, double>> fixed = std::nullopt);

std::string render_quiver(const Slice2D& s, std::size_t arrows_per_axis = 32);
std::string render_heatmap(const Slice2D& s, std::size_t max_cells_per_axis = 128);

}  // namespace eikinetic
