#include <algorithm>
#include <cmath>
#include <limits>

#include "eikinetic/field_ops.hpp"
#include "eikinetic/generators.hpp"
#include "helpers.hpp"
#include "../oracles/oracles.hpp"

using namespace eikinetic;

namespace {

constexpr double kGradientSphereC = 12.0;
constexpr double kCurlVortexC = 1.0;
constexpr double kInterpVortexC = 0.5;
constexpr double kBumpMassRel = 2e-5;
constexpr double kGradientPairingRel = 1e-4;
constexpr double kStepOracleTol = 0.02;

ScalarField sample(const GridSpec& g, auto&& f, Mask mask = {}) {
  std::vector<double> v(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mask.empty() || mask[i]) v[i] = f(g.node(i));
  }
  return ScalarField(g, std::move(v), std::move(mask));
}

VectorField sample_vec(const GridSpec& g, auto&& f) {
  std::vector<std::vector<double>> c(g.dim(), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec u = f(g.node(i));
    for (int k = 0; k < g.dim(); ++k) c[k][i] = u[k];
  }
  return VectorField(g, std::move(c));
}

}  // namespace

TEST_SUITE("field-core") {
  TEST_CASE("grid construction rejects invalid specs") {
    CHECK_ERROR_KIND(GridSpec({8}, {0.1}, {0.0}), ErrorKind::InvalidGrid);
    CHECK_ERROR_KIND(GridSpec({8, 8, 8, 8, 8}, {1, 1, 1, 1, 1}, {0, 0, 0, 0, 0}), ErrorKind::InvalidGrid);
    CHECK_ERROR_KIND(GridSpec({8, 3}, {0.1, 0.1}, {0.0, 0.0}), ErrorKind::InvalidGrid);
    CHECK_ERROR_KIND(GridSpec({8, 8}, {0.1, 0.0}, {0.0, 0.0}), ErrorKind::InvalidGrid);
    CHECK_ERROR_KIND(GridSpec({8, 8}, {0.1, -1.0}, {0.0, 0.0}), ErrorKind::InvalidGrid);
  }

  TEST_CASE("node coordinates are bit-exact and ravel inverts unravel") {
    const GridSpec g({5, 7, 6}, {0.1, 0.37, 1.0 / 3.0}, {-0.3, 2.0, 1e-3});
    for (std::size_t i = 0; i < g.size(); ++i) {
      const MultiIndex idx = g.unravel(i);
      REQUIRE(g.ravel(idx) == i);
      const Vec p = g.node(i);
      for (int a = 0; a < 3; ++a) CHECK(p[a] == g.origin(a) + static_cast<double>(idx[a]) * g.spacing(a));
    }
  }

  TEST_CASE("fields validate lengths and finiteness") {
    const GridSpec g = GridSpec::cube(2, 4, 0.0, 1.0);
    CHECK_ERROR_KIND(ScalarField(g, std::vector<double>(15, 0.0)), ErrorKind::Precondition);
    std::vector<double> v(16, 0.0);
    v[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_ERROR_KIND(ScalarField(g, v), ErrorKind::Precondition);
    Mask m(16, 1);
    m[3] = 0;
    CHECK_NOTHROW(ScalarField(g, v, m));
    CHECK_ERROR_KIND(VectorField(g, {std::vector<double>(16, 1.0)}), ErrorKind::Precondition);
  }

  TEST_CASE("unit-norm check uses masked nodes only") {
    const GridSpec g = GridSpec::cube(2, 5, -1.0, 1.0);
    const VectorField u = gen_vortex(g, Vec::Zero(2));
    CHECK(u.is_unit());
    CHECK(u.unit_norm_defect() <= 1e-15);
    CHECK_FALSE(u.valid(g.ravel({2, 2})));
  }

  TEST_CASE("gradient is exact on affine functions, including boundary nodes") {
    const GridSpec g({6, 5, 7}, {0.2, 0.3, 0.1}, {-1.0, 0.5, 0.0});
    const Vec a = make_vec({1.5, -0.25, 3.0});
    const VectorField u = gradient(sample(g, [&](const Vec& x) { return a.dot(x) + 0.7; }));
    for (std::size_t i = 0; i < g.size(); ++i) {
      REQUIRE(u.valid(i));
      CHECK((u.at(i) - a).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("gradient of zero is zero") {
    const GridSpec g = GridSpec::cube(3, 6, 0.0, 1.0);
    const VectorField u = gradient(ScalarField(g, std::vector<double>(g.size(), 0.0)));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(u.at(i).norm() == 0.0);
  }

  TEST_CASE("gradient of |x| outside a 5h ball") {
    const GridSpec g = GridSpec::cube(3, 48, -1.0, 1.0);
    const double h = g.max_spacing();
    Mask m(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) m[i] = g.node(i).norm() >= 5.0 * h;
    const VectorField u = gradient(sample(g, [](const Vec& x) { return x.norm(); }, m));
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!u.valid(i)) continue;
      const Vec x = g.node(i);
      err = std::max(err, (u.at(i) - x / x.norm()).norm());
    }
    CHECK(err <= kGradientSphereC * h * h);
  }

  TEST_CASE("gradient of |x| is second order outside a fixed ball") {
    std::vector<double> errs;
    for (std::int64_t n : {25, 49}) {
      const GridSpec g = GridSpec::cube(3, n, -1.0, 1.0);
      Mask m(g.size(), 0);
      for (std::size_t i = 0; i < g.size(); ++i) m[i] = g.node(i).norm() >= 0.3;
      const VectorField u = gradient(sample(g, [](const Vec& x) { return x.norm(); }, m));
      double err = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec x = g.node(i);
        if (!u.valid(i) || x.norm() < 0.45) continue;
        err = std::max(err, (u.at(i) - x / x.norm()).norm());
      }
      errs.push_back(err);
    }
    CHECK(errs[0] / errs[1] >= 3.0);
  }

  TEST_CASE("curl residual of constants and rotations") {
    const GridSpec g = GridSpec::cube(2, 9, -1.0, 1.0);
    CHECK(curl_residual(gen_constant(g, make_vec({0.6, 0.8}))).max_abs == 0.0);
    const auto c = curl_residual(sample_vec(g, [](const Vec& x) { return make_vec({-x[1], x[0]}); }));
    CHECK(c.max_abs == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(c.fields.size() == 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (c.fields[0].valid(i)) CHECK(std::abs(c.fields[0][i]) == doctest::Approx(2.0).epsilon(1e-12));
    }
  }

  TEST_CASE("curl residual of the vortex is second order") {
    for (std::int64_t n : {33, 65}) {
      const GridSpec g = GridSpec::cube(2, n, -1.0, 1.0);
      const double h = g.max_spacing();
      const auto c = curl_residual(gen_vortex(g, make_vec({0.013, -0.021})));
      const double rmin = exclusion_radius(g);
      // Truncation error of d_i u_j scales like h^2 / r^3 at the mask edge.
      CHECK(c.max_abs <= kCurlVortexC * h * h / (rmin * rmin * rmin));
    }
  }

  TEST_CASE("interpolation: nodes, affine exactness, vortex accuracy, domain errors") {
    const GridSpec g = GridSpec::cube(3, 17, -1.0, 1.0);
    const VectorField aff = sample_vec(g, [](const Vec& x) { return make_vec({x[0] - 2 * x[1], 0.5, x[2] + x[0]}); });
    gen::Rng rng(11);
    for (int t = 0; t < 50; ++t) {
      const Vec p = rng.point(3, -1.0, 1.0);
      const Vec e = make_vec({p[0] - 2 * p[1], 0.5, p[2] + p[0]});
      CHECK((interpolate(aff, p) - e).norm() <= 1e-13);
      const std::size_t i = static_cast<std::size_t>(rng.integer(0, static_cast<int>(g.size()) - 1));
      CHECK((interpolate(aff, g.node(i)) - aff.at(i)).norm() == 0.0);
    }
    CHECK_ERROR_KIND(interpolate(aff, make_vec({1.5, 0.0, 0.0})), ErrorKind::OutOfDomain);
    const VectorField v = gen_vortex(g, Vec::Zero(3));
    CHECK_ERROR_KIND(interpolate(v, make_vec({0.01, 0.0, 0.0})), ErrorKind::OutOfDomain);
    CHECK_FALSE(try_interpolate(v, make_vec({0.01, 0.0, 0.0})).has_value());
    for (std::int64_t n : {33, 65}) {
      const GridSpec gg = GridSpec::cube(3, n, -1.0, 1.0);
      const double h = gg.max_spacing();
      const VectorField vv = gen_vortex(gg, Vec::Zero(3));
      const double r = 0.6;
      const Vec p = make_vec({1.0, 1.0, 0.0}) / std::sqrt(2.0) * r;
      CHECK((interpolate(vv, p) - p / r).norm() <= kInterpVortexC * h * h / (r * r));
    }
  }

  TEST_CASE("mollify: underresolved kernel, constants, far-field indicator, step ramp") {
    const GridSpec g = GridSpec::cube(2, 81, -1.0, 1.0);
    const double h = g.max_spacing();
    CHECK_ERROR_KIND(mollify(sample(g, [](const Vec&) { return 1.0; }), 1.5 * h), ErrorKind::KernelUnderresolved);
    const double eps = 6.0 * h;
    const ScalarField c = mollify(sample(g, [](const Vec&) { return 2.5; }), eps);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!c.valid(i)) continue;
      ++kept;
      CHECK(c[i] == doctest::Approx(2.5).epsilon(1e-14));
    }
    CHECK(kept < g.size());
    CHECK(kept > 0);
    // Trapezoid convention H(0) = 1/2 matches the continuous convolution.
    const ScalarField step =
        mollify(sample(g, [](const Vec& x) { return x[0] > 0.0 ? 1.0 : (x[0] == 0.0 ? 0.5 : 0.0); }), eps);
    double prev = -1.0;
    const std::int64_t row = 40;
    for (std::int64_t i = 0; i < g.shape(0); ++i) {
      const std::size_t k = g.ravel({i, row});
      if (!step.valid(k)) continue;
      const double x = g.node(k)[0];
      CHECK(step[k] >= prev - 1e-15);
      prev = step[k];
      if (std::abs(x) > eps) CHECK(step[k] == doctest::Approx(x > 0 ? 1.0 : 0.0).epsilon(1e-14));
      CHECK(std::abs(step[k] - oracle::mollified_step(x, eps, 2)) <= kStepOracleTol);
    }
  }

  TEST_CASE("bump quadrature against the radial oracle") {
    const GridSpec g = GridSpec::cube(3, 64, -1.0, 1.0);
    const TestFunction phi(make_vec({0.1, -0.2, 0.05}), 0.3);
    const double mass = oracle::bump_moment(3, 0.3, 1);
    const double l2 = oracle::bump_moment(3, 0.3, 2);
    const ScalarField ones = sample(g, [](const Vec&) { return 1.0; });
    const ScalarField c = sample(g, [](const Vec&) { return -1.75; });
    const ScalarField self = sample(g, [&](const Vec& x) { return phi.value(x); });
    CHECK(std::abs(integrate_value(c, phi) / (-1.75 * mass) - 1.0) <= kBumpMassRel);
    CHECK(std::abs(integrate_value(self, phi) / l2 - 1.0) <= kBumpMassRel);
    const Vec v = make_vec({0.3, -1.0, 2.0});
    CHECK(std::abs(integrate_gradient_dot(ones, phi, v)) <= kGradientPairingRel * v.norm() * mass / phi.radius());
  }

  TEST_CASE("test-function support errors") {
    const GridSpec g = GridSpec::cube(2, 32, -1.0, 1.0);
    const ScalarField ones = sample(g, [](const Vec&) { return 1.0; });
    CHECK_ERROR_KIND(integrate_value(ones, TestFunction(make_vec({0.9, 0.0}), 0.3)), ErrorKind::SupportViolation);
    const VectorField v = gen_vortex(g, Vec::Zero(2));
    std::vector<double> vals(g.size(), 1.0);
    const ScalarField masked(g, vals, v.mask());
    CHECK_ERROR_KIND(integrate_value(masked, TestFunction(make_vec({0.05, 0.0}), 0.2)), ErrorKind::SupportViolation);
    const auto hal = halton_test_functions(g, v.mask(), 20, 0.2);
    CHECK(hal.size() == 20);
    for (const auto& p : hal) CHECK_NOTHROW(integrate_value(masked, p));
  }

  TEST_CASE("property: mollify keeps the range and commutes with constants") {
    gen::Rng rng(5);
    for (int trial = 0; trial < 8; ++trial) {
      const GridSpec g = GridSpec::cube(2, rng.integer(20, 40), -1.0, 1.0);
      std::vector<double> v(g.size());
      for (auto& x : v) x = rng.uniform(-3.0, 3.0);
      const ScalarField f(g, v);
      const double eps = rng.uniform(2.0, 5.0) * g.max_spacing();
      const double shift = rng.uniform(-10.0, 10.0);
      std::vector<double> vs(v);
      for (auto& x : vs) x += shift;
      const ScalarField m = mollify(f, eps);
      const ScalarField ms = mollify(ScalarField(g, vs), eps);
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!m.valid(i)) continue;
        CHECK(m[i] >= *lo - 1e-12);
        CHECK(m[i] <= *hi + 1e-12);
        CHECK(ms[i] == doctest::Approx(m[i] + shift).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("property: gradient-dot pairing is linear in f and v") {
    gen::Rng rng(6);
    const GridSpec g = GridSpec::cube(3, 24, -1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const Vec c1 = rng.point(3, -1.0, 1.0), c2 = rng.point(3, -1.0, 1.0);
      const ScalarField f1 = sample(g, [&](const Vec& x) { return std::sin(c1.dot(x)); });
      const ScalarField f2 = sample(g, [&](const Vec& x) { return std::cos(c2.dot(x)); });
      const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
      std::vector<double> sum(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) sum[i] = a * f1[i] + b * f2[i];
      const TestFunction phi(rng.point(3, -0.4, 0.4), rng.uniform(0.2, 0.5));
      const Vec v1 = rng.point(3, -1.0, 1.0), v2 = rng.point(3, -1.0, 1.0);
      const double lhs = integrate_gradient_dot(ScalarField(g, sum), phi, v1);
      const double rhs = a * integrate_gradient_dot(f1, phi, v1) + b * integrate_gradient_dot(f2, phi, v1);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
      const double lv = integrate_gradient_dot(f1, phi, v1 + 3.0 * v2);
      const double rv = integrate_gradient_dot(f1, phi, v1) + 3.0 * integrate_gradient_dot(f1, phi, v2);
      CHECK(lv == doctest::Approx(rv).epsilon(1e-10).scale(1.0));
    }
  }

  TEST_CASE("property: gradient then curl is second order for smooth stream functions") {
    gen::Rng rng(8);
    for (int trial = 0; trial < 5; ++trial) {
      const Vec k = rng.point(3, -2.0, 2.0);
      const double ph = rng.uniform(0.0, 3.0);
      auto psi = [&](const Vec& x) { return std::sin(k.dot(x) + ph) + 0.3 * x[0] * x[1] * x[2]; };
      std::vector<double> res;
      for (std::int64_t n : {17, 33}) {
        const GridSpec g = GridSpec::cube(3, n, -1.0, 1.0);
        res.push_back(curl_residual(gradient(sample(g, psi))).max_abs);
      }
      // Interior second differences commute exactly; the one-sided boundary
      // rows carry the h^2 truncation.
      CHECK(res[1] <= res[0] / 3.0 + 1e-12);
    }
  }
}
