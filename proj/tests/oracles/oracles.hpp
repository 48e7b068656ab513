#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

// Test-only reference computations. None of these call into the library.
namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Surface area of the unit sphere S^{n-1} in R^n.
inline double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

/// Volume of the unit ball in R^k.
inline double ball_volume(int k) { return std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k + 1.0); }

/// Composite Simpson rule on [a, b] with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return s * h / 3.0;
}

/// Standard bump profile exp(-1 / (1 - s^2)) for s = |x - c| / r < 1.
inline double bump(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

/// Integral of bump(|x|/r)^power over R^dim by a 1D radial rule.
inline double bump_moment(int dim, double radius, int power = 1) {
  auto f = [&](double rho) { return std::pow(rho, dim - 1) * std::pow(bump(rho / radius), power); };
  return sphere_area(dim) * simpson(f, 0.0, radius, 200000);
}

/// Winding number of the planar map theta -> f(theta) by dense angle summation.
inline double winding(const std::function<std::pair<double, double>(double)>& f, std::size_t steps) {
  double total = 0.0;
  auto [x0, y0] = f(0.0);
  double prev = std::atan2(y0, x0);
  for (std::size_t k = 1; k <= steps; ++k) {
    const auto [x, y] = f(2.0 * kPi * static_cast<double>(k) / static_cast<double>(steps));
    const double a = std::atan2(y, x);
    double d = a - prev;
    while (d > kPi) d -= 2.0 * kPi;
    while (d < -kPi) d += 2.0 * kPi;
    total += d;
    prev = a;
  }
  return total / (2.0 * kPi);
}

/// Euclidean distance between two points of equal length.
inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// Principal curvatures of the ellipsoid sum x_k^2 / a_k^2 = 1 (3D) at a surface
/// point, from the first and second fundamental forms of the implicit surface.
inline std::pair<double, double> ellipsoid_principal_curvatures(const double a[3], const double x[3]) {
  double g[3], n = 0.0;
  for (int k = 0; k < 3; ++k) {
    g[k] = 2.0 * x[k] / (a[k] * a[k]);
    n += g[k] * g[k];
  }
  n = std::sqrt(n);
  // Shape operator on the tangent plane: P H P / |grad F| with H = diag(2 / a_k^2).
  double P[3][3], S[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) P[i][j] = (i == j) - g[i] * g[j] / (n * n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      S[i][j] = 0.0;
      for (int k = 0; k < 3; ++k) S[i][j] += P[i][k] * (2.0 / (a[k] * a[k])) * P[k][j] / n;
    }
  // Nonzero eigenvalues of the symmetric S: trace and sum of principal 2x2 minors.
  const double tr = S[0][0] + S[1][1] + S[2][2];
  const double m2 = S[0][0] * S[1][1] - S[0][1] * S[1][0] + S[0][0] * S[2][2] - S[0][2] * S[2][0] +
                    S[1][1] * S[2][2] - S[1][2] * S[2][1];
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * m2));
  return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

/// Curvature of the offset at distance d on the convex side of y = a x^2 + c at
/// abscissa x of the base curve.
inline double parabola_offset_curvature(double a, double x, double d) {
  const double k = 2.0 * a / std::pow(1.0 + 4.0 * a * a * x * x, 1.5);
  return k / (1.0 + d * k);
}

/// Convolution of the step H(x_1) with the normalised radial bump of radius eps
/// in R^dim (dim = 2 or 3), evaluated at x_1 = x through its 1D marginal.
inline double mollified_step(double x, double eps, int dim) {
  auto marginal = [&](double t) {
    const double top = std::sqrt(std::max(0.0, eps * eps - t * t));
    if (dim == 2) return 2.0 * simpson([&](double r) { return bump(std::hypot(t, r) / eps); }, 0.0, top, 4000);
    return 2.0 * kPi * simpson([&](double r) { return r * bump(std::hypot(t, r) / eps); }, 0.0, top, 4000);
  };
  if (x <= -eps) return 0.0;
  if (x >= eps) return 1.0;
  return simpson(marginal, -eps, x, 4000) / simpson(marginal, -eps, eps, 4000);
}

}  // namespace oracle
