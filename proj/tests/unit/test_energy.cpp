#include <cmath>
#include <vector>

#include "eikinetic/energy.hpp"
#include "eikinetic/field_ops.hpp"
#include "eikinetic/generators.hpp"
#include "helpers.hpp"
#include "../oracles/oracles.hpp"

using namespace eikinetic;

namespace {

constexpr double kPi = oracle::kPi;

ScalarField sample(const GridSpec& g, auto&& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.node(i));
  return ScalarField(g, std::move(v));
}

VectorField sample_vec(const GridSpec& g, auto&& f) {
  std::vector<std::vector<double>> c(2, std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec u = f(g.node(i));
    c[0][i] = u[0];
    c[1][i] = u[1];
  }
  return VectorField(g, std::move(c));
}

// R u(R^T x) for R the quarter turn, on a grid symmetric about the origin.
VectorField quarter_turn(const VectorField& u) {
  const GridSpec& g = u.grid();
  const std::int64_t n = g.shape(0);
  std::vector<std::vector<double>> c(2, std::vector<double>(g.size()));
  Mask mask(g.size());
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      const std::size_t dst = g.ravel({i, j});
      const std::size_t src = g.ravel({j, n - 1 - i});
      c[0][dst] = -u.component(1)[src];
      c[1][dst] = u.component(0)[src];
      mask[dst] = u.mask()[src];
    }
  }
  return VectorField(g, std::move(c), std::move(mask));
}

}  // namespace

TEST_SUITE("energy") {
  TEST_CASE("zero vorticity has zero norm") {
    const GridSpec g = GridSpec::cube(2, 33, 0.0, 1.0);
    CHECK(hminus1_norm_sq(ScalarField(g, std::vector<double>(g.size(), 0.0))) == 0.0);
  }

  TEST_CASE("Laplace eigenfunction") {
    const GridSpec g = GridSpec::cube(2, 129, 0.0, 1.0);
    const ScalarField w = sample(g, [](const Vec& x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]); });
    const double expected = 0.25 / (2.0 * kPi * kPi);
    CHECK(std::abs(hminus1_norm_sq(w) / expected - 1.0) <= 1e-2);
    const PoissonSolve s = solve_dirichlet_poisson(w);
    CHECK(s.relative_residual <= 1e-10);
    CHECK(s.iterations > 0);
  }

  TEST_CASE("property: the H^-1 norm is a quadratic form") {
    gen::Rng rng(61);
    const GridSpec g = GridSpec::cube(2, 33, -1.0, 1.0);
    for (int t = 0; t < 5; ++t) {
      std::vector<double> v(g.size());
      for (auto& x : v) x = rng.uniform(-1.0, 1.0);
      const ScalarField w(g, v);
      const double base = hminus1_norm_sq(w);
      CHECK(base > 0.0);
      const double a = t == 0 ? 2.0 : rng.uniform(-3.0, 3.0);
      std::vector<double> scaled(v);
      for (auto& x : scaled) x *= a;
      CHECK(hminus1_norm_sq(ScalarField(g, scaled)) == doctest::Approx(a * a * base).epsilon(1e-10));
    }
  }

  TEST_CASE("solver failure is reported") {
    const GridSpec g = GridSpec::cube(2, 33, 0.0, 1.0);
    const ScalarField w = sample(g, [](const Vec& x) { return x[0] * (1.0 - x[1]); });
    CgOptions o;
    o.max_iteration_factor = 0;
    CHECK_ERROR_KIND(solve_dirichlet_poisson(w, o), ErrorKind::Solver);
    CHECK_ERROR_KIND(hminus1_norm_sq(ScalarField(GridSpec::cube(3, 5, 0.0, 1.0), std::vector<double>(125, 1.0))),
                     ErrorKind::Unsupported);
  }

  TEST_CASE("property: energy parts are nonnegative and sum to the total") {
    gen::Rng rng(62);
    const GridSpec g = GridSpec::cube(2, 33, -1.0, 1.0);
    for (int t = 0; t < 5; ++t) {
      const Vec c = rng.point(2, -0.3, 0.3);
      const double eps = rng.uniform(0.05, 0.3);
      const double tilt = rng.uniform(0.0, 2.0);
      const VectorField u = sample_vec(g, [&](const Vec& x) {
        const Vec d = x - c;
        return make_vec({std::cos(tilt * d[0]) * 0.9, std::sin(tilt * d[1] + d[0])});
      });
      const EnergyBreakdown e = gl_energy(u, eps);
      CHECK(e.dirichlet >= 0.0);
      CHECK(e.penalty >= 0.0);
      CHECK(e.curl_term >= 0.0);
      CHECK(e.total == doctest::Approx(e.dirichlet + e.penalty + e.curl_term).epsilon(1e-12));
      CHECK(e.eps == eps);
    }
    CHECK_ERROR_KIND(gl_energy(gen_constant(g, unit_axis(2, 0)), 0.0), ErrorKind::Precondition);
  }

  TEST_CASE("constant fields carry no energy") {
    const GridSpec g = GridSpec::cube(2, 33, -1.0, 1.0);
    const EnergyBreakdown e = gl_energy(gen_constant(g, make_vec({0.6, 0.8})), 0.1);
    CHECK(e.dirichlet <= 1e-28);
    CHECK(e.penalty <= 1e-28);
    CHECK(e.curl_term == 0.0);
  }

  TEST_CASE("gradient fields have no curl term") {
    const GridSpec g = GridSpec::cube(2, 65, -1.0, 1.0);
    const ScalarField psi = sample(g, [](const Vec& x) { return std::sin(2.0 * x[0]) * std::cos(x[1]) + x[0] * x[1] * x[1]; });
    const EnergyBreakdown e = gl_energy(gradient(psi), 0.1);
    CHECK(e.curl_term <= 1e-10);
    CHECK(e.dirichlet > 0.0);

    const VectorField vortex = gen_vortex(g, make_vec({0.05, 0.02}));
    const EnergyBreakdown ev = gl_energy(vortex, 0.1);
    CHECK(ev.penalty <= 1e-25);
    CHECK(ev.curl_term <= 1e-3 * ev.dirichlet);
  }

  TEST_CASE("property: energy is invariant under quarter turns") {
    gen::Rng rng(63);
    const GridSpec g = GridSpec::cube(2, 33, -1.0, 1.0);
    for (int t = 0; t < 3; ++t) {
      const Vec c = rng.point(2, -0.3, 0.3);
      const VectorField u = sample_vec(g, [&](const Vec& x) {
        const Vec d = x - c;
        return make_vec({std::cos(3.0 * d[1]) + 0.2 * d[0], std::sin(2.0 * d[0] * d[1])});
      });
      VectorField r = quarter_turn(u);
      const EnergyBreakdown e = gl_energy(u, 0.2);
      for (int q = 0; q < 3; ++q) {
        const EnergyBreakdown er = gl_energy(r, 0.2);
        CHECK(er.dirichlet == doctest::Approx(e.dirichlet).epsilon(1e-12));
        CHECK(er.penalty == doctest::Approx(e.penalty).epsilon(1e-12));
        CHECK(er.curl_term == doctest::Approx(e.curl_term).epsilon(1e-8));
        CHECK(er.total == doctest::Approx(e.total).epsilon(1e-8));
        r = quarter_turn(r);
      }
    }
  }

  TEST_CASE("regularised vortices lose energy as the core shrinks") {
    const GridSpec g = GridSpec::cube(2, 129, -1.0, 1.0);
    double previous = 1e300;
    for (double eps : {0.2, 0.1, 0.05}) {
      const VectorField u = regularized_vortex_2d(g, Vec::Zero(2), eps);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.node(i).norm();
        if (r >= eps) CHECK(std::abs(u.at(i).norm() - 1.0) <= 1e-14);
        else CHECK(u.at(i).norm() == doctest::Approx(r / eps).epsilon(1e-12));
      }
      const EnergyBreakdown e = gl_energy(u, eps);
      CHECK(e.total < previous);
      previous = e.total;
    }
  }
}
