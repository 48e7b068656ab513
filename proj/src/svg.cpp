#include "eikinetic/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace eikinetic {

namespace {

constexpr double kCanvas = 640.0;
constexpr double kMargin = 20.0;

struct Layout {
  int ax = 0, ay = 1;
  MultiIndex base{};
};

Layout layout_for(const GridSpec& grid, std::optional<std::pair<int, double>> fixed) {
  const int dim = grid.dim();
  Layout l;
  for (int a = 0; a < dim; ++a) l.base[a] = grid.shape(a) / 2;
  if (dim == 2) {
    if (fixed) throw Error(ErrorKind::Precondition, "2D fields take no slice");
    return l;
  }
  if (!fixed) throw Error(ErrorKind::Precondition, "fields with dim >= 3 need a slice axis=value");
  const int axis = fixed->first;
  if (axis < 0 || axis >= dim) throw Error(ErrorKind::Precondition, "slice axis out of range");
  const double idx = std::round((fixed->second - grid.origin(axis)) / grid.spacing(axis));
  if (idx < 0 || idx > static_cast<double>(grid.shape(axis) - 1)) {
    throw Error(ErrorKind::OutOfDomain, "slice coordinate outside the grid");
  }
  l.base[axis] = static_cast<std::int64_t>(idx);
  std::vector<int> free;
  for (int a = 0; a < dim; ++a) {
    if (a != axis) free.push_back(a);
  }
  l.ax = free[0];
  l.ay = free[1];
  return l;
}

template <typename Fill>
Slice2D make_slice(const GridSpec& grid, const Layout& l, Fill&& fill) {
  Slice2D s;
  s.axis_x = l.ax;
  s.axis_y = l.ay;
  s.nx = grid.shape(l.ax);
  s.ny = grid.shape(l.ay);
  s.x0 = grid.origin(l.ax);
  s.y0 = grid.origin(l.ay);
  s.hx = grid.spacing(l.ax);
  s.hy = grid.spacing(l.ay);
  const std::size_t n = static_cast<std::size_t>(s.nx * s.ny);
  s.scalar.assign(n, std::numeric_limits<double>::quiet_NaN());
  s.vx.assign(n, std::numeric_limits<double>::quiet_NaN());
  s.vy.assign(n, std::numeric_limits<double>::quiet_NaN());
  MultiIndex idx = l.base;
  for (std::int64_t i = 0; i < s.nx; ++i) {
    for (std::int64_t j = 0; j < s.ny; ++j) {
      idx[l.ax] = i;
      idx[l.ay] = j;
      fill(static_cast<std::size_t>(i * s.ny + j), grid.ravel(idx), s);
    }
  }
  return s;
}

std::string color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 * std::clamp(1.5 - std::abs(4 * t - 3), 0.0, 1.0)));
  const int g = static_cast<int>(std::lround(255 * std::clamp(1.5 - std::abs(4 * t - 2), 0.0, 1.0)));
  const int b = static_cast<int>(std::lround(255 * std::clamp(1.5 - std::abs(4 * t - 1), 0.0, 1.0)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

struct Frame {
  double sx, sy, width, height;
};

Frame frame_for(const Slice2D& s) {
  const double wx = s.hx * static_cast<double>(s.nx - 1);
  const double wy = s.hy * static_cast<double>(s.ny - 1);
  const double scale = (kCanvas - 2 * kMargin) / std::max(wx, wy);
  return {scale, scale, wx * scale + 2 * kMargin, wy * scale + 2 * kMargin};
}

std::string header(const Frame& f) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
      << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out.str();
}

}  // namespace

Slice2D slice_field(const VectorField& u, std::optional<std::pair<int, double>> fixed) {
  const Layout l = layout_for(u.grid(), fixed);
  return make_slice(u.grid(), l, [&](std::size_t k, std::size_t node, Slice2D& s) {
    if (!u.valid(node)) return;
    s.vx[k] = u.component(l.ax)[node];
    s.vy[k] = u.component(l.ay)[node];
    s.scalar[k] = std::atan2(s.vy[k], s.vx[k]);
  });
}

Slice2D slice_field(const ScalarField& f, std::optional<std::pair<int, double>> fixed) {
  const Layout l = layout_for(f.grid(), fixed);
  return make_slice(f.grid(), l, [&](std::size_t k, std::size_t node, Slice2D& s) {
    if (f.valid(node)) s.scalar[k] = f[node];
  });
}

std::string render_quiver(const Slice2D& s, std::size_t arrows_per_axis) {
  const Frame f = frame_for(s);
  std::ostringstream out;
  out << header(f);
  const std::int64_t stride_x = std::max<std::int64_t>(1, s.nx / static_cast<std::int64_t>(arrows_per_axis));
  const std::int64_t stride_y = std::max<std::int64_t>(1, s.ny / static_cast<std::int64_t>(arrows_per_axis));
  const double len = 0.8 * std::min(stride_x * s.hx, stride_y * s.hy) * f.sx;
  out << "<g stroke=\"#1f3b73\" stroke-width=\"1\">\n";
  for (std::int64_t i = 0; i < s.nx; i += stride_x) {
    for (std::int64_t j = 0; j < s.ny; j += stride_y) {
      const std::size_t k = static_cast<std::size_t>(i * s.ny + j);
      if (!std::isfinite(s.vx[k])) continue;
      const double n = std::hypot(s.vx[k], s.vy[k]);
      if (n == 0.0) continue;
      const double px = kMargin + i * s.hx * f.sx;
      const double py = f.height - kMargin - j * s.hy * f.sy;
      const double dx = len * s.vx[k] / n, dy = -len * s.vy[k] / n;
      const double tx = px + dx, ty = py + dy;
      out << "<line x1=\"" << px << "\" y1=\"" << py << "\" x2=\"" << tx << "\" y2=\"" << ty << "\"/>";
      const double hx = -0.3 * dx, hy = -0.3 * dy;
      out << "<line x1=\"" << tx << "\" y1=\"" << ty << "\" x2=\"" << tx + hx - 0.5 * hy << "\" y2=\""
          << ty + hy + 0.5 * hx << "\"/>\n";
    }
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string render_heatmap(const Slice2D& s, std::size_t max_cells_per_axis) {
  const Frame f = frame_for(s);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : s.scalar) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::ostringstream out;
  out << header(f);
  if (!(hi >= lo)) {
    out << "</svg>\n";
    return out.str();
  }
  const std::int64_t stride_x = std::max<std::int64_t>(1, s.nx / static_cast<std::int64_t>(max_cells_per_axis));
  const std::int64_t stride_y = std::max<std::int64_t>(1, s.ny / static_cast<std::int64_t>(max_cells_per_axis));
  const double cw = stride_x * s.hx * f.sx, ch = stride_y * s.hy * f.sy;
  for (std::int64_t i = 0; i < s.nx; i += stride_x) {
    for (std::int64_t j = 0; j < s.ny; j += stride_y) {
      const double v = s.scalar[static_cast<std::size_t>(i * s.ny + j)];
      const double px = kMargin + i * s.hx * f.sx - 0.5 * cw;
      const double py = f.height - kMargin - j * s.hy * f.sy - 0.5 * ch;
      const std::string fill = std::isfinite(v) ? color(hi > lo ? (v - lo) / (hi - lo) : 0.5) : "#cccccc";
      out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\""
          << fill << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace eikinetic
