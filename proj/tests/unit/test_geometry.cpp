#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "eikinetic/generators.hpp"
#include "eikinetic/geometry.hpp"
#include "helpers.hpp"
#include "../oracles/oracles.hpp"

using namespace eikinetic;

namespace {

constexpr double kPi = oracle::kPi;
constexpr double kLineTol = 1e-8;
constexpr double kSphereCurvatureC = 2.0;
constexpr double kEllipsoidCurvatureTol = 0.05;
constexpr double kCircleCurvatureC = 2.0;
constexpr double kAsymmetryC = 1.0;

ScalarField sample(const GridSpec& g, auto&& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.node(i));
  return ScalarField(g, std::move(v));
}

VectorField sample_vec(const GridSpec& g, auto&& f) {
  std::vector<std::vector<double>> c(g.dim(), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec u = f(g.node(i));
    for (int k = 0; k < g.dim(); ++k) c[k][i] = u[k];
  }
  return VectorField(g, std::move(c));
}

Line random_line(gen::Rng& rng, int dim) { return Line(rng.point(dim, -2.0, 2.0), rng.unit(dim)); }

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("coplanarity of intersecting, skew and parallel lines") {
    const Line x(Vec::Zero(3), unit_axis(3, 0));
    const Line y(Vec::Zero(3), unit_axis(3, 1));
    const auto meet = coplanar(x, y, 1e-12);
    CHECK(meet.coplanar);
    CHECK(meet.defect == doctest::Approx(0.0).scale(1.0));
    const auto skew = coplanar(x, Line(unit_axis(3, 2), unit_axis(3, 1)), 1e-12);
    CHECK_FALSE(skew.coplanar);
    CHECK(skew.defect == doctest::Approx(1.0).epsilon(1e-14));
    const auto par = coplanar(x, Line(make_vec({0.0, 3.0, -1.0}), unit_axis(3, 0)), 1e-12);
    CHECK(par.coplanar);
    CHECK(Line(Vec::Zero(3), make_vec({3.0, 0.0, 4.0})).direction.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_ERROR_KIND(Line(Vec::Zero(3), Vec::Zero(3)), ErrorKind::Precondition);
  }

  TEST_CASE("property: coplanarity is symmetric and rigid-motion invariant") {
    gen::Rng rng(41);
    for (int dim = 3; dim <= 4; ++dim) {
      for (int t = 0; t < 50; ++t) {
        const Line a = random_line(rng, dim);
        const Line b = random_line(rng, dim);
        const auto ab = coplanar(a, b, 1e-9);
        const auto ba = coplanar(b, a, 1e-9);
        CHECK(ab.coplanar == ba.coplanar);
        CHECK(ab.defect == doctest::Approx(ba.defect).epsilon(1e-12));
        const Mat r = rng.rotation(dim);
        const Vec shift = rng.point(dim, -5.0, 5.0);
        const auto moved = coplanar(Line(r * a.point + shift, r * a.direction), Line(r * b.point + shift, r * b.direction), 1e-9);
        CHECK(moved.defect == doctest::Approx(ab.defect).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("concurrent family recovers the common point") {
    gen::Rng rng(3);
    const Vec o = make_vec({1.0, 2.0, 3.0});
    std::vector<Line> lines;
    for (int i = 0; i < 20; ++i) {
      const Vec d = rng.unit(3);
      lines.emplace_back(o + rng.uniform(-2.0, 2.0) * d, d);
    }
    const LineFamilyClass c = classify_line_family(lines, kLineTol);
    REQUIRE(c.tag == LineFamilyTag::Concurrent);
    REQUIRE(c.point);
    CHECK((*c.point - o).norm() <= 1e-8);
    CHECK(c.fit_residual <= kLineTol);

    std::vector<std::size_t> order(lines.size());
    std::iota(order.begin(), order.end(), 0);
    for (int t = 0; t < 10; ++t) {
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.integer(0, static_cast<int>(i) - 1)]);
      std::vector<Line> shuffled;
      for (std::size_t i : order) shuffled.push_back(lines[i]);
      const LineFamilyClass s = classify_line_family(shuffled, kLineTol);
      REQUIRE(s.tag == LineFamilyTag::Concurrent);
      CHECK((*s.point - *c.point).norm() <= 1e-12);
    }
  }

  TEST_CASE("parallel, incoherent and planar families") {
    gen::Rng rng(4);
    std::vector<Line> par;
    for (int i = 0; i < 20; ++i) par.emplace_back(rng.point(3, -1.0, 1.0), unit_axis(3, 0));
    CHECK(classify_line_family(par, kLineTol).tag == LineFamilyTag::Parallel);

    const std::vector<Line> skew{Line(Vec::Zero(3), unit_axis(3, 0)), Line(unit_axis(3, 2), unit_axis(3, 1)),
                                 Line(make_vec({0.0, 1.0, -1.0}), make_vec({0.3, 0.0, 1.0}))};
    const LineFamilyClass inc = classify_line_family(skew, kLineTol);
    CHECK(inc.tag == LineFamilyTag::Incoherent);
    REQUIRE(inc.witness);
    CHECK_FALSE(coplanar(skew[inc.witness->first], skew[inc.witness->second], kLineTol).coplanar);

    std::vector<Line> flat;
    for (int i = 0; i < 10; ++i) {
      const double a = rng.uniform(0.0, kPi);
      flat.emplace_back(make_vec({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0}),
                        make_vec({std::cos(a), std::sin(a), 0.0}));
    }
    CHECK(classify_line_family(flat, kLineTol).tag == LineFamilyTag::Planar);
    CHECK_ERROR_KIND(classify_line_family({par[0], par[1]}, kLineTol), ErrorKind::Precondition);
  }

  TEST_CASE("line families parse from CSV") {
    std::istringstream in("# point, direction\n0,0,0,2,0,0\n\n1,2,3,0,0,5\n");
    const auto lines = read_lines_csv(in);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].direction == unit_axis(3, 0));
    CHECK(lines[1].point == make_vec({1.0, 2.0, 3.0}));
    CHECK(lines[1].direction == unit_axis(3, 2));
    std::istringstream bad("0,0,x,1,0,0\n");
    CHECK_ERROR_KIND(read_lines_csv(bad), ErrorKind::Parse);
    std::istringstream odd("0,0,0,1,0\n");
    CHECK_ERROR_KIND(read_lines_csv(odd), ErrorKind::Parse);
  }

  TEST_CASE("property: classify recovers vortex centre and sign") {
    const GridSpec g = GridSpec::cube(3, 25, -1.0, 1.0);
    const double h = g.max_spacing();
    const Vec c = make_vec({0.13, -0.21, 0.07});
    for (int sign : {1, -1}) {
      const VectorField u = gen_vortex(g, c, sign);
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const FieldClass f = classify_field(u, 64, seed, 1e-3);
        REQUIRE(f.tag == FieldClass::Tag::Vortex);
        CHECK((f.center - c).norm() <= 2.0 * h);
        CHECK(f.sign == sign);
      }
    }
  }

  TEST_CASE("classify labels constants and the vortex line") {
    const GridSpec g = GridSpec::cube(3, 17, -1.0, 1.0);
    const FieldClass c = classify_field(gen_constant(g, unit_axis(3, 0)), 64, 1, 1e-3);
    REQUIRE(c.tag == FieldClass::Tag::Constant);
    CHECK((c.direction - unit_axis(3, 0)).norm() <= 1e-12);
    const FieldClass line = classify_field(gen_vortex_line(g, make_vec({0.03, -0.02})), 64, 1, 1e-3);
    CHECK(line.tag == FieldClass::Tag::Other);
    CHECK_FALSE(line.diagnostics.empty());
    CHECK_ERROR_KIND(classify_field(gen_constant(g, unit_axis(3, 0)), 8, 1, 1e-3), ErrorKind::InsufficientSamples);
  }

  TEST_CASE("shape operator of spheres and hyperplanes") {
    const GridSpec g = GridSpec::cube(3, 33, -1.0, 1.0);
    const double h = g.max_spacing();
    const Vec p = make_vec({0.1, -0.05, 0.05});
    const ScalarField dist = gen_point_distance(g, p);
    const ShapeOperatorContext ctx(dist);
    gen::Rng rng(6);
    for (int t = 0; t < 10; ++t) {
      const double r = rng.uniform(0.4, 0.7);
      const Vec x = p + r * rng.unit(3);
      const ShapeOperator s = ctx.at(x);
      CHECK((s.normal - (x - p) / r).norm() <= kSphereCurvatureC * h * h);
      for (int k = 0; k < 2; ++k) CHECK(std::abs(s.eigenvalues[k] - 1.0 / r) <= kSphereCurvatureC * h * h / (r * r * r));
      CHECK((s.matrix - s.matrix.transpose()).norm() <= 1e-10);
      CHECK(s.asymmetry <= kAsymmetryC * h * h);
      for (const auto& tv : s.tangents) CHECK(std::abs(tv.dot(s.normal)) <= 1e-14);
    }

    const Vec xi = make_vec({0.48, 0.6, 0.64});
    const ScalarField plane = sample(g, [&](const Vec& x) { return x.dot(xi); });
    const ShapeOperator flat = shape_operator(plane, make_vec({0.2, -0.3, 0.1}));
    CHECK(flat.matrix.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((flat.normal - xi).norm() <= 1e-14);

    const ScalarField centred = gen_point_distance(GridSpec::cube(3, 33, -1.0, 1.0), Vec::Zero(3));
    CHECK_ERROR_KIND(shape_operator(centred, Vec::Zero(3)), ErrorKind::CriticalPoint);
  }

  TEST_CASE("shape operator of an ellipsoid matches its principal curvatures") {
    const double axes[3] = {2.0, 1.0, 1.0};
    const GridSpec g({81, 41, 41}, {1.0 / 16.0, 1.0 / 16.0, 1.0 / 16.0}, {-2.5, -1.25, -1.25});
    const ScalarField psi = gen_ellipsoid_distance(g, Vec::Zero(3), make_vec({2.0, 1.0, 1.0}));
    const ShapeOperatorContext ctx(psi);
    for (auto [t, s] : {std::pair{0.7, 0.4}, std::pair{1.2, 2.0}, std::pair{2.2, -0.9}}) {
      const double x[3] = {2.0 * std::cos(t), std::sin(t) * std::cos(s), std::sin(t) * std::sin(s)};
      const auto [k1, k2] = oracle::ellipsoid_principal_curvatures(axes, x);
      const ShapeOperator so = ctx.at(make_vec({x[0], x[1], x[2]}));
      CHECK(std::abs(so.eigenvalues[0] - k1) <= kEllipsoidCurvatureTol);
      CHECK(std::abs(so.eigenvalues[1] - k2) <= kEllipsoidCurvatureTol);
    }
  }

  TEST_CASE("umbilic check separates spheres, planes and ellipsoids") {
    const GridSpec g = GridSpec::cube(3, 41, -1.0, 1.0);
    const double h = g.max_spacing();
    const Vec p = make_vec({0.1, -0.05, 0.05});
    const UmbilicReport sphere = umbilic_check(gen_point_distance(g, p), 0.7);
    CHECK(sphere.umbilical);
    CHECK(sphere.verdict == Verdict::Pass);
    REQUIRE(sphere.center_estimate);
    CHECK((*sphere.center_estimate - p).norm() <= 3.0 * h);
    CHECK(sphere.center_spread <= 3.0 * h);
    for (const auto& s : sphere.samples) CHECK(std::isfinite(s.lambda));

    const Vec xi = make_vec({0.0, 0.6, 0.8});
    const UmbilicReport plane = umbilic_check(sample(g, [&](const Vec& x) { return x.dot(xi) + 5.0; }), 5.1);
    CHECK(plane.umbilical);
    CHECK(plane.planar);
    CHECK_FALSE(plane.center_estimate);

    const GridSpec ge({81, 41, 41}, {1.0 / 16.0, 1.0 / 16.0, 1.0 / 16.0}, {-2.5, -1.25, -1.25});
    const UmbilicReport ell = umbilic_check(gen_ellipsoid_distance(ge, Vec::Zero(3), make_vec({2.0, 1.0, 1.0})), 0.0);
    CHECK_FALSE(ell.umbilical);
    CHECK(ell.verdict == Verdict::Fail);
    CHECK(ell.max_spread > 10.0 * ell.tolerance);

    CHECK_ERROR_KIND(umbilic_check(gen_point_distance(g, p), 9.0), ErrorKind::NoSamples);
    CHECK_ERROR_KIND(umbilic_check(gen_point_distance(GridSpec::cube(2, 9, -1.0, 1.0), Vec::Zero(2)), 0.5),
                     ErrorKind::Unsupported);
  }

  TEST_CASE("level curvature of exact circles") {
    const GridSpec g = GridSpec::cube(2, 129, -1.0, 1.0);
    const double h = g.max_spacing();
    const double r = 0.5;
    const auto samples = level_curvature_2d(gen_point_distance(g, make_vec({0.05, -0.02})), r);
    REQUIRE(samples.size() > 20);
    for (const auto& s : samples) CHECK(std::abs(s.curvature - 1.0 / r) <= kCircleCurvatureC * h * h / (r * r * r));
  }

  TEST_CASE("degree of vortices, reflections and constants") {
    const GridSpec g2 = GridSpec::cube(2, 65, -1.0, 1.0);
    const Vec c2 = make_vec({0.05, -0.03});
    CHECK(jacobian_degree(gen_vortex(g2, c2), c2, 0.5).degree == 1);
    CHECK(jacobian_degree(gen_vortex(g2, c2, -1), c2, 0.5).degree == 1);
    const DegreeResult refl = jacobian_degree(gen_reflected_vortex_2d(g2, c2), c2, 0.5);
    const double oracle_refl = oracle::winding([](double t) { return std::pair{std::cos(t), -std::sin(t)}; }, 4096);
    CHECK(refl.degree == static_cast<int>(std::lround(oracle_refl)));
    CHECK(refl.degree == -1);
    CHECK(refl.integer_distance <= 0.05);
    CHECK(jacobian_degree(gen_constant(g2, make_vec({0.6, 0.8})), c2, 0.5).degree == 0);
    CHECK(jacobian_degree(gen_vortex(g2, c2), make_vec({0.5, 0.5}), 0.2).degree == 0);

    const GridSpec g3 = GridSpec::cube(3, 33, -1.0, 1.0);
    const Vec c3 = make_vec({0.05, -0.03, 0.02});
    const DegreeResult d3 = jacobian_degree(gen_vortex(g3, c3), c3, 0.5);
    CHECK(d3.degree == 1);
    CHECK(d3.integer_distance <= 0.05);
    CHECK(jacobian_degree(gen_vortex(g3, c3, -1), c3, 0.5).degree == -1);
    CHECK(jacobian_degree(gen_constant(g3, unit_axis(3, 1)), c3, 0.5).degree == 0);

    const VectorField weak = sample_vec(g2, [](const Vec&) { return make_vec({0.1, 0.0}); });
    CHECK_ERROR_KIND(jacobian_degree(weak, c2, 0.5), ErrorKind::DegenerateContour);
    CHECK_ERROR_KIND(jacobian_degree(gen_vortex(GridSpec::cube(4, 9, -1.0, 1.0), Vec::Zero(4)), Vec::Zero(4), 0.5),
                     ErrorKind::Unsupported);
  }

  TEST_CASE("property: degree is stable under radius perturbation") {
    gen::Rng rng(9);
    const GridSpec g2 = GridSpec::cube(2, 65, -1.0, 1.0);
    const GridSpec g3 = GridSpec::cube(3, 33, -1.0, 1.0);
    for (int t = 0; t < 5; ++t) {
      const Vec c2 = rng.point(2, -0.2, 0.2);
      const VectorField u2 = gen_vortex(g2, c2, t % 2 == 0 ? 1 : -1);
      const double r2 = rng.uniform(0.35, 0.6);
      const double h2 = g2.max_spacing();
      const int d2 = jacobian_degree(u2, c2, r2).degree;
      CHECK(jacobian_degree(u2, c2, r2 - h2).degree == d2);
      CHECK(jacobian_degree(u2, c2, r2 + h2).degree == d2);

      const Vec c3 = rng.point(3, -0.2, 0.2);
      const VectorField u3 = gen_vortex(g3, c3);
      const double r3 = rng.uniform(0.35, 0.6);
      const double h3 = g3.max_spacing();
      const int d3 = jacobian_degree(u3, c3, r3).degree;
      CHECK(jacobian_degree(u3, c3, r3 - h3).degree == d3);
      CHECK(jacobian_degree(u3, c3, r3 + h3).degree == d3);
    }
  }
}
