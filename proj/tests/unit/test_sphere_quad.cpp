#include <cmath>
#include <vector>

#include "eikinetic/calibration.hpp"
#include "eikinetic/serialize.hpp"
#include "eikinetic/sphere_quad.hpp"
#include "helpers.hpp"
#include "../oracles/oracles.hpp"

using namespace eikinetic;

namespace {

constexpr double kPi = oracle::kPi;
constexpr double kMomentTol = 1e-2;
constexpr double kEquivarianceTol = 2e-2;

double max_entry(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("sphere-quad") {
  TEST_CASE("sphere area and ball volume against closed forms") {
    for (int n = 2; n <= 4; ++n) CHECK(sphere_area(n) == doctest::Approx(oracle::sphere_area(n)).epsilon(1e-14));
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
    CHECK(unit_ball_volume(2) == doctest::Approx(kPi));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0));
  }

  TEST_CASE("four uniform angles") {
    const DirectionSet ds = build_directions(2, 4, DirectionScheme::UniformAngle);
    REQUIRE(ds.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      const double a = kPi / 2.0 * static_cast<double>(i);
      CHECK(ds.node(i)[0] == doctest::Approx(std::cos(a)).scale(1.0));
      CHECK(ds.node(i)[1] == doctest::Approx(std::sin(a)).scale(1.0));
      CHECK(ds.weight(i) == doctest::Approx(kPi / 2.0));
    }
  }

  TEST_CASE("scheme and dimension mismatches are configuration errors") {
    CHECK_ERROR_KIND(build_directions(3, 100, DirectionScheme::UniformAngle), ErrorKind::Configuration);
    CHECK_ERROR_KIND(build_directions(2, 100, DirectionScheme::Fibonacci), ErrorKind::Configuration);
    CHECK_ERROR_KIND(build_directions(4, 100, DirectionScheme::Fibonacci), ErrorKind::Configuration);
    CHECK_ERROR_KIND(build_directions(3, 3, DirectionScheme::MonteCarlo, 1), ErrorKind::Configuration);
    CHECK_ERROR_KIND(build_directions(3, 100, DirectionScheme::Explicit), ErrorKind::Configuration);
    CHECK_ERROR_KIND(parse_scheme("lebedev"), ErrorKind::Configuration);
    CHECK(parse_scheme("fibonacci") == DirectionScheme::Fibonacci);
  }

  TEST_CASE("direction-set invariants hold for every stored rung") {
    for (const auto& row : quadrature_table()) {
      const std::uint64_t seed = row.scheme == DirectionScheme::MonteCarlo ? 1 : 0;
      const DirectionSet ds = build_directions(row.dim, row.count, row.scheme, seed);
      double unit = 0.0;
      for (std::size_t i = 0; i < ds.size(); ++i) unit = std::max(unit, std::abs(ds.node(i).norm() - 1.0));
      CHECK(unit <= 1e-14);
      CHECK(std::abs(ds.total_weight() / oracle::sphere_area(row.dim) - 1.0) <= 1e-3);
      const QuadratureError e = measure_quadrature_error(ds);
      CHECK(e.first <= row.tolerance.first);
      CHECK(e.second <= row.tolerance.second);
      CHECK(e.half_first <= row.tolerance.half_first);
    }
  }

  TEST_CASE("stored table matches a fresh measurement") {
    for (const auto& row : quadrature_table()) {
      const QuadratureError m = measure_quadrature_rung(row.dim, row.scheme, row.count);
      CHECK(pinned_tolerance(m.first) == doctest::Approx(row.tolerance.first).epsilon(1e-12));
      CHECK(pinned_tolerance(m.second) == doctest::Approx(row.tolerance.second).epsilon(1e-12));
      CHECK(pinned_tolerance(m.half_first) == doctest::Approx(row.tolerance.half_first).epsilon(1e-12));
    }
  }

  TEST_CASE("fibonacci 10k second moment and monte carlo mass") {
    const DirectionSet fib = build_directions(3, 10000, DirectionScheme::Fibonacci);
    CHECK(max_entry(fib.second_moment() - 4.0 * kPi / 3.0 * Mat::Identity(3, 3)) <= 1e-3);
    const DirectionSet mc = build_directions(4, 50000, DirectionScheme::MonteCarlo, 1);
    CHECK(std::abs(mc.total_weight() / (2.0 * kPi * kPi) - 1.0) <= 1e-2);
  }

  TEST_CASE("half-sphere first moments") {
    const DirectionSet fib = build_directions(3, 10000, DirectionScheme::Fibonacci);
    const Vec e3 = unit_axis(3, 2);
    CHECK((half_sphere_first_moment(fib, e3) - oracle::ball_volume(2) * e3).cwiseAbs().maxCoeff() <= kMomentTol);
    const DirectionSet uni = build_directions(2, 1024, DirectionScheme::UniformAngle);
    const Vec e2 = unit_axis(2, 1);
    CHECK((half_sphere_first_moment(uni, e2) - oracle::ball_volume(1) * e2).cwiseAbs().maxCoeff() <= kMomentTol);
    gen::Rng rng(3);
    for (int dim = 2; dim <= 4; ++dim) {
      const DirectionSet ds = build_directions(dim, 2000, DirectionScheme::MonteCarlo, 9);
      const Vec n = rng.unit(dim);
      const Vec sum = half_sphere_first_moment(ds, n) + half_sphere_first_moment(ds, Vec(-n));
      CHECK((sum - ds.first_moment()).norm() <= 1e-12);
    }
  }

  TEST_CASE("equatorial second moments") {
    const DirectionSet fib = build_directions(3, 10000, DirectionScheme::Fibonacci);
    CHECK(max_entry(half_sphere_second_moment(fib, unit_axis(3, 2)) - kPi / 2.0 * Mat::Identity(2, 2)) <= kMomentTol);
    std::vector<Vec> nodes;
    gen::Rng rng(4);
    for (int i = 0; i < 10000; ++i) nodes.push_back(rng.unit(4));
    const DirectionSet four = explicit_directions(nodes);
    const Mat half = half_sphere_second_moment(four, unit_axis(4, 3));
    CHECK(max_entry(half - 2.0 * kPi / 3.0 * Mat::Identity(3, 3)) <= kMomentTol);
    const Mat full = half_sphere_second_moment(four, unit_axis(4, 3), EquatorPart::Full);
    const Mat neg = half_sphere_second_moment(four, unit_axis(4, 3), EquatorPart::Negative);
    CHECK(max_entry(full - half - neg) <= 1e-12);
    CHECK(max_entry(full - 2.0 * half) <= kMomentTol);
    CHECK_ERROR_KIND(half_sphere_second_moment(build_directions(2, 64, DirectionScheme::UniformAngle), unit_axis(2, 0)),
                     ErrorKind::Unsupported);
  }

  TEST_CASE("tangent bases are orthonormal and perpendicular") {
    gen::Rng rng(12);
    for (int dim = 2; dim <= 4; ++dim) {
      for (int t = 0; t < 20; ++t) {
        const Vec n = rng.unit(dim);
        const auto b = tangent_basis(n);
        REQUIRE(static_cast<int>(b.size()) == dim - 1);
        for (std::size_t i = 0; i < b.size(); ++i) {
          CHECK(std::abs(b[i].dot(n)) <= 1e-14);
          for (std::size_t j = 0; j < b.size(); ++j) CHECK(std::abs(b[i].dot(b[j]) - (i == j)) <= 1e-14);
        }
        if (dim == 2) CHECK((b[0] - make_vec({-n[1], n[0]})).norm() == 0.0);
      }
    }
  }

  TEST_CASE("property: moments are rotation equivariant") {
    gen::Rng rng(21);
    const DirectionSet fib = build_directions(3, 10000, DirectionScheme::Fibonacci);
    for (int t = 0; t < 5; ++t) {
      const Mat R = rng.rotation(3);
      const Vec n = rng.unit(3);
      const DirectionSet rot = rotate(fib, R);
      const Vec lhs = half_sphere_first_moment(rot, R * n);
      const Vec rhs = R * half_sphere_first_moment(fib, n);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= kEquivarianceTol);
      const Mat sl = rot.second_moment();
      const Mat sr = R * fib.second_moment() * R.transpose();
      CHECK(max_entry(sl - sr) <= 1e-10);
    }
  }

  TEST_CASE("property: monte carlo error halves when the count quadruples") {
    for (int dim = 2; dim <= 4; ++dim) {
      double e1 = 0.0, e4 = 0.0;
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const double a = max_entry(build_directions(dim, 4000, DirectionScheme::MonteCarlo, seed).second_moment() -
                                   sphere_area(dim) / dim * Mat::Identity(dim, dim));
        const double b = max_entry(build_directions(dim, 16000, DirectionScheme::MonteCarlo, seed).second_moment() -
                                   sphere_area(dim) / dim * Mat::Identity(dim, dim));
        e1 += a * a;
        e4 += b * b;
      }
      const double ratio = std::sqrt(e1 / e4);
      CHECK(ratio >= 1.3);
      CHECK(ratio <= 3.0);
    }
  }

  TEST_CASE("monte carlo sets are deterministic per seed and antithetic") {
    const DirectionSet a = build_directions(3, 101, DirectionScheme::MonteCarlo, 5);
    const DirectionSet b = build_directions(3, 101, DirectionScheme::MonteCarlo, 5);
    const DirectionSet c = build_directions(3, 101, DirectionScheme::MonteCarlo, 6);
    CHECK(std::vector<double>(a.node_data().begin(), a.node_data().end()) ==
          std::vector<double>(b.node_data().begin(), b.node_data().end()));
    CHECK((a.node(0) - c.node(0)).norm() > 0.0);
    CHECK((a.node(0) + a.node(1)).norm() == 0.0);
  }

  TEST_CASE("direction sets round-trip through JSON") {
    const DirectionSet ds = build_directions(4, 64, DirectionScheme::MonteCarlo, 17);
    const DirectionSet back = direction_set_from_json(to_json(ds));
    CHECK(back.dim() == 4);
    CHECK(back.scheme() == DirectionScheme::MonteCarlo);
    CHECK(back.seed() == 17);
    CHECK(std::vector<double>(back.node_data().begin(), back.node_data().end()) ==
          std::vector<double>(ds.node_data().begin(), ds.node_data().end()));
    CHECK(std::vector<double>(back.weights().begin(), back.weights().end()) ==
          std::vector<double>(ds.weights().begin(), ds.weights().end()));
  }
}
