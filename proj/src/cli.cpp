#include "eikinetic/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "eikinetic/energy.hpp"
#include "eikinetic/field_ops.hpp"
#include "eikinetic/generators.hpp"
#include "eikinetic/geometry.hpp"
#include "eikinetic/kinetic.hpp"
#include "eikinetic/serialize.hpp"
#include "eikinetic/svg.hpp"
#include "eikinetic/vfld.hpp"

namespace eikinetic::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Configuration, std::string("bad number in ") + what + ": '" + cell + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::Configuration, std::string("empty list for ") + what);
  return out;
}

Vec parse_vec(const std::string& text, int dim, const char* what) {
  const auto v = parse_list(text, what);
  if (static_cast<int>(v.size()) != dim) {
    throw Error(ErrorKind::Configuration, std::string(what) + " needs " + std::to_string(dim) + " entries");
  }
  return make_vec(std::span<const double>(v));
}

std::optional<std::pair<int, double>> parse_slice(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::Configuration, "--slice expects axis=value");
  try {
    return std::make_pair(std::stoi(text.substr(0, eq)), std::stod(text.substr(eq + 1)));
  } catch (const std::exception&) {
    throw Error(ErrorKind::Configuration, "--slice expects axis=value");
  }
}

int exit_for(Verdict v) { return v == Verdict::Pass ? kExitPass : kExitFail; }

void emit(std::ostream& out, const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (!path.empty()) write_file_atomic(path, text);
  out << text;
}

DirectionScheme default_scheme(int dim) {
  switch (dim) {
    case 2: return DirectionScheme::UniformAngle;
    case 3: return DirectionScheme::Fibonacci;
    default: return DirectionScheme::MonteCarlo;
  }
}

struct GridArgs {
  int dim = 2;
  std::string shape = "64";
  std::string lo = "-1";
  std::string hi = "1";

  void add(CLI::App* app) {
    app->add_option("--dim", dim, "Dimension (2..4)")->check(CLI::Range(2, 4));
    app->add_option("--shape", shape, "Nodes per axis: one value or a comma list");
    app->add_option("--lo", lo, "Lower box corner: one value or a comma list");
    app->add_option("--hi", hi, "Upper box corner: one value or a comma list");
  }

  GridSpec build() const {
    const auto s = parse_list(shape, "--shape");
    if (s.size() != 1 && static_cast<int>(s.size()) != dim) {
      throw Error(ErrorKind::Configuration, "--shape needs 1 or dim entries");
    }
    const auto l = parse_list(lo, "--lo");
    const auto u = parse_list(hi, "--hi");
    for (const auto* v : {&l, &u}) {
      if (v->size() != 1 && static_cast<int>(v->size()) != dim) {
        throw Error(ErrorKind::Configuration, "--lo/--hi need 1 or dim entries");
      }
    }
    auto pick = [](const std::vector<double>& v, int a) { return v.size() == 1 ? v[0] : v[a]; };
    std::vector<std::int64_t> n(dim);
    std::vector<double> h(dim), o(dim);
    for (int a = 0; a < dim; ++a) {
      n[a] = static_cast<std::int64_t>(pick(s, a));
      if (n[a] < 4) throw Error(ErrorKind::InvalidGrid, "every axis needs at least 4 nodes");
      o[a] = pick(l, a);
      if (!(pick(u, a) > o[a])) throw Error(ErrorKind::InvalidGrid, "--hi must exceed --lo");
      h[a] = (pick(u, a) - o[a]) / static_cast<double>(n[a] - 1);
    }
    return GridSpec(n, h, o);
  }
};

// Direction-set and test-function options shared by the residual commands.
struct ResidualArgs {
  std::string scheme;
  std::size_t count = 200;
  std::uint64_t seed = 1;
  int tangents = 0;
  std::size_t phi_count = 20;
  double phi_radius = 0.0;
  std::vector<std::string> xi;
  std::vector<std::string> phi;
  double tolerance = -1.0;
  std::size_t max_entries = 200;

  void add(CLI::App* app, bool with_tangents) {
    app->add_option("--scheme", scheme, "uniform-angle | fibonacci | monte-carlo");
    app->add_option("--count", count, "Number of directions");
    app->add_option("--seed", seed, "Seed for Monte Carlo directions");
    if (with_tangents) app->add_option("--tangents", tangents, "Tangent vectors per direction (default N)");
    app->add_option("--phi-count", phi_count, "Number of Halton test functions");
    app->add_option("--phi-radius", phi_radius, "Test-function radius (default 0.15 x shortest box side)");
    app->add_option("--xi", xi, "Explicit direction(s), comma separated; replaces the scheme");
    app->add_option("--phi", phi, "Explicit test function(s) c1,..,cN,r added to the Halton family");
    app->add_option("--tol", tolerance, "Verdict tolerance (default: calibrated)");
    app->add_option("--max-entries", max_entries, "Largest entries kept in the JSON (0 = all)");
  }

  double radius(const GridSpec& g) const {
    if (phi_radius > 0.0) return phi_radius;
    double side = std::numeric_limits<double>::infinity();
    for (int a = 0; a < g.dim(); ++a) side = std::min(side, g.upper()[a] - g.lower()[a]);
    return 0.15 * side;
  }

  DirectionSet directions(int dim) const {
    if (!xi.empty()) {
      std::vector<Vec> d;
      for (const auto& s : xi) d.push_back(parse_vec(s, dim, "--xi"));
      return explicit_directions(d);
    }
    const DirectionScheme sc = scheme.empty() ? default_scheme(dim) : parse_scheme(scheme);
    return build_directions(dim, count, sc, seed);
  }

  std::vector<TestFunction> test_functions(const VectorField& u) const {
    auto out = halton_test_functions(u.grid(), u.mask(), phi_count, radius(u.grid()));
    for (const auto& s : phi) {
      const auto v = parse_list(s, "--phi");
      if (static_cast<int>(v.size()) != u.dim() + 1) {
        throw Error(ErrorKind::Configuration, "--phi needs N centre coordinates and a radius");
      }
      out.emplace_back(make_vec(std::span<const double>(v.data(), u.dim())), v.back());
    }
    if (out.empty()) throw Error(ErrorKind::NoSamples, "no test function fits the valid region");
    return out;
  }

  json parameters(const DirectionSet& ds, int tangents_used, const GridSpec& g) const {
    return {{"directions", to_json(ds, !xi.empty())},
            {"tangents", tangents_used},
            {"phi_count", phi_count},
            {"phi_radius", radius(g)},
            {"explicit_phi", phi}};
  }
};

struct ResidualOutcome {
  json result;
  Verdict verdict;
};

ResidualOutcome full_residual(const VectorField& u, const ResidualArgs& args) {
  const DirectionSet ds = args.directions(u.dim());
  const int tangents = args.tangents > 0 ? args.tangents : u.dim();
  const auto phis = args.test_functions(u);
  json cal_json;
  double tol = args.tolerance;
  if (tol < 0.0) {
    const auto cal = calibrate_residual(u.grid(), ds, tangents, args.radius(u.grid()), args.phi_count);
    tol = cal.tolerance;
    cal_json = to_json(cal);
  }
  const auto report = kinetic_residual(u, ds, tangents, phis, tol);
  json j = to_json(report, args.max_entries);
  j["calibration"] = cal_json.is_null() ? json{{"tolerance", tol}, {"source", "user"}} : cal_json;
  j["parameters"] = args.parameters(ds, tangents, u.grid());
  return {j, report.verdict};
}

ResidualOutcome weak_residual(const VectorField& u, const ResidualArgs& args, std::size_t equator_count) {
  const int dim = u.dim();
  DirectionSet ds = [&] {
    if (!args.xi.empty()) return args.directions(dim);
    const DirectionScheme sc = args.scheme.empty() ? default_scheme(dim - 1) : parse_scheme(args.scheme);
    return embed_equator(build_directions(dim - 1, equator_count, sc, args.seed));
  }();
  const auto phis = args.test_functions(u);
  json cal_json;
  double tol = args.tolerance;
  if (tol < 0.0) {
    const auto cal = calibrate_residual(u.grid(), ds, dim - 1, args.radius(u.grid()), args.phi_count);
    tol = cal.tolerance;
    cal_json = to_json(cal);
  }
  const auto report = weak_kinetic_residual(u, ds, phis, tol);
  json j = to_json(report, args.max_entries);
  j["calibration"] = cal_json.is_null() ? json{{"tolerance", tol}, {"source", "user"}} : cal_json;
  j["parameters"] = args.parameters(ds, dim - 1, u.grid());
  j["parameters"]["equatorial"] = true;
  return {j, report.verdict};
}

void write_plots(const std::string& prefix, const VectorField& u, const std::string& slice) {
  if (prefix.empty()) return;
  const auto s = slice_field(u, parse_slice(slice));
  write_file_atomic(prefix + ".quiver.svg", render_quiver(s));
  write_file_atomic(prefix + ".heatmap.svg", render_heatmap(s));
}

void write_plots(const std::string& prefix, const ScalarField& f, const std::string& slice) {
  if (prefix.empty()) return;
  write_file_atomic(prefix + ".heatmap.svg", render_heatmap(slice_field(f, parse_slice(slice))));
}

struct FieldInput {
  std::string path;
  std::string field;
  std::string out;
  std::string svg;
  std::string slice;

  void add(CLI::App* app, bool plots = true) {
    app->add_option("input", path, "Input VFLD file")->required();
    app->add_option("--field", field, "Field name inside the VFLD file");
    app->add_option("--out", out, "Also write the JSON result to this path");
    if (plots) {
      app->add_option("--svg", svg, "Write quiver/heatmap SVGs with this path prefix");
      app->add_option("--slice", slice, "Slice axis=value for SVGs of N >= 3 fields");
    }
  }

  VectorField vector() const { return vector_field(read_vfld(path), field); }
  ScalarField scalar() const { return scalar_field(read_vfld(path), field); }

  // 2D inputs always plot; higher dimensions only when a slice is given.
  template <typename F>
  void plot(const F& f) const {
    if (svg.empty()) return;
    if (f.grid().dim() == 2 || !slice.empty()) write_plots(svg, f, slice);
  }
};

json battery(const VectorField& u, const ResidualArgs& args, std::size_t equator_count, bool& all_pass) {
  json out = json::object();
  auto record = [&](const char* name, auto&& fn) {
    try {
      out[name] = fn();
    } catch (const Error& e) {
      out[name] = {{"error", e.what()}, {"kind", to_string(e.kind())}};
      all_pass = false;
    }
  };
  auto verdict_of = [&](const json& j) {
    if (j.contains("verdict") && j["verdict"] != "pass") all_pass = false;
    return j;
  };
  const int dim = u.dim();
  record("residual", [&] { return verdict_of(full_residual(u, args).result); });
  if (dim >= 3) {
    record("weak", [&] { return verdict_of(weak_residual(u, args, equator_count).result); });
    record("curl_symmetry", [&] { return to_json(curl_symmetry_check(u)); });
  }
  record("curl", [&] {
    const auto c = curl_residual(u);
    return json{{"max_abs", c.max_abs}, {"evaluated_nodes", c.evaluated_nodes}};
  });
  if (u.is_unit()) {
    record("classify", [&] { return to_json(classify_field(u, 64, args.seed, 1e-3)); });
    record("ordering", [&] { return to_json(ordering_check(u, 1000, 4, 5.0 * u.grid().max_spacing(), args.seed)); });
  }
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for unit-norm gradient fields", "eikinetic"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // generate
  auto* gen = app.add_subcommand("generate", "Write an analytic or fast-marching field as VFLD");
  GridArgs grid_args;
  grid_args.add(gen);
  std::string kind, gen_out, gen_center, gen_direction, gen_axes, gen_svg, gen_slice;
  int gen_sign = 1;
  bool restrict_x2 = false;
  double gen_eps = 0.1, gen_radius = 0.5, gen_inner = 0.0, gen_outer = 0.0, par_a = 1.0, par_c = 0.0;
  gen->add_option("--kind", kind,
                  "vortex | constant | rotational | reflected-vortex | vortex-line | regularized-vortex | "
                  "circle-gradient | point-distance | fmm-point | ellipsoid-distance | circle-distance | "
                  "parabola-distance")
      ->required();
  gen->add_option("--out", gen_out, "Output VFLD path")->required();
  gen->add_option("--center", gen_center, "Centre / axis point (default: box centre)");
  gen->add_option("--sign", gen_sign, "Vortex sign (+1 or -1)");
  gen->add_option("--direction", gen_direction, "Constant direction (default e_1)");
  gen->add_option("--axes", gen_axes, "Ellipsoid semi-axes");
  gen->add_flag("--restrict-x2", restrict_x2, "Vortex line: keep only x_2 > 1");
  gen->add_option("--eps", gen_eps, "Core radius of the regularised vortex");
  gen->add_option("--radius", gen_radius, "Circle radius");
  gen->add_option("--inner", gen_inner, "circle-gradient: inner annulus radius (default 0.25 R)");
  gen->add_option("--outer", gen_outer, "circle-gradient: outer annulus radius (default 0.9 R)");
  gen->add_option("--a", par_a, "Parabola y = a x^2 + c: a");
  gen->add_option("--c", par_c, "Parabola y = a x^2 + c: c");
  gen->add_option("--svg", gen_svg, "Write SVG plots with this path prefix");
  gen->add_option("--slice", gen_slice, "Slice axis=value for SVGs of N >= 3 fields");

  // residual / residual2d / weak
  auto* res = app.add_subcommand("residual", "Kinetic residual over directions, tangents and test functions");
  FieldInput res_in;
  res_in.add(res);
  ResidualArgs res_args;
  res_args.add(res, true);

  auto* res2 = app.add_subcommand("residual2d", "2D kinetic residual with v = xi^perp");
  FieldInput res2_in;
  res2_in.add(res2);
  ResidualArgs res2_args;
  res2_args.add(res2, false);

  auto* weak = app.add_subcommand("weak", "Kinetic residual over equatorial directions xi_N = 0");
  FieldInput weak_in;
  weak_in.add(weak);
  ResidualArgs weak_args;
  weak_args.count = 64;
  weak_args.add(weak, false);

  // classify
  auto* cls = app.add_subcommand("classify", "Constant / vortex / other classification from characteristic lines");
  FieldInput cls_in;
  cls_in.add(cls, false);
  std::size_t cls_samples = 64;
  std::uint64_t cls_seed = 1;
  double cls_tol = 1e-3;
  bool cls_normalize = false;
  std::string cls_expect;
  cls->add_option("--samples", cls_samples, "Sampled nodes (>= 16)");
  cls->add_option("--seed", cls_seed, "Sampling seed");
  cls->add_option("--tol", cls_tol, "Geometric tolerance");
  cls->add_flag("--normalize", cls_normalize, "Normalise the field first (e.g. numerical gradients)");
  cls->add_option("--expect", cls_expect, "Exit 1 unless the tag matches (Constant | Vortex | Other)");

  // trace
  auto* trc = app.add_subcommand("trace", "Trace of the field on a segment, or a characteristic path");
  FieldInput trc_in;
  trc_in.add(trc, false);
  std::string trc_a, trc_b, trc_radii, trc_x0;
  std::size_t trc_samples = 33;
  double trc_unit_tol = 0.05, trc_step = 0.0, trc_len = 1.0;
  trc->add_option("--a", trc_a, "Segment start");
  trc->add_option("--b", trc_b, "Segment end");
  trc->add_option("--radii", trc_radii, "Decreasing cross-section radii (default 16h,8h,4h)");
  trc->add_option("--samples", trc_samples, "Samples along the segment");
  trc->add_option("--unit-tol", trc_unit_tol, "Allowed | |u~| - 1 | for a reliable sample");
  trc->add_option("--characteristic", trc_x0, "Integrate a characteristic from this point instead");
  trc->add_option("--step", trc_step, "Characteristic step (default h/2)");
  trc->add_option("--length", trc_len, "Maximum characteristic length");

  // umbilic
  auto* umb = app.add_subcommand("umbilic", "Umbilicity of a level set of a scalar field");
  FieldInput umb_in;
  umb_in.add(umb);
  double umb_level = 0.0;
  UmbilicOptions umb_opts;
  umb->add_option("--level", umb_level, "Level value")->required();
  umb->add_option("--samples", umb_opts.sample_count, "Level-set samples");
  umb->add_option("--tol", umb_opts.tolerance, "Allowed ||S - lambda Id||");
  umb->add_option("--seed", umb_opts.seed, "Sampling seed");

  // degree
  auto* deg = app.add_subcommand("degree", "Topological degree on a circle or sphere");
  FieldInput deg_in;
  deg_in.add(deg, false);
  std::string deg_center;
  double deg_radius = 0.5;
  int deg_expect = 0;
  bool has_expect = false;
  deg->add_option("--center", deg_center, "Contour centre (default box centre)");
  deg->add_option("--radius", deg_radius, "Contour radius");
  auto* expect_opt = deg->add_option("--expect", deg_expect, "Exit 1 unless the degree matches");

  // energy
  auto* eng = app.add_subcommand("energy", "Ginzburg-Landau line energy, with an eps sweep");
  std::string eng_path, eng_eps = "0.2,0.1,0.05", eng_csv, eng_out, eng_family, eng_svg;
  GridArgs eng_grid;
  eng_grid.shape = "257";
  eng->add_option("input", eng_path, "Input 2D VFLD (omit with --family)");
  eng->add_option("--eps", eng_eps, "Comma list of eps values");
  eng->add_option("--family", eng_family, "regularized-vortex: regenerate u_eps for each eps");
  eng_grid.add(eng);
  eng->add_option("--csv", eng_csv, "Write the sweep as CSV");
  eng->add_option("--out", eng_out, "Also write the JSON result here");
  eng->add_option("--svg", eng_svg, "Write SVG plots of the input field");

  // entropy
  auto* ent = app.add_subcommand("entropy", "2D entropy residuals, sharp and smoothed");
  FieldInput ent_in;
  ent_in.add(ent);
  std::string ent_xi = "1,0", ent_k = "4,8,16";
  std::size_t ent_phi_count = 20;
  double ent_phi_radius = 0.0, ent_tol = -1.0;
  ent->add_option("--xi", ent_xi, "Direction");
  ent->add_option("--k", ent_k, "Smoothing parameters");
  ent->add_option("--phi-count", ent_phi_count, "Number of Halton test functions");
  ent->add_option("--phi-radius", ent_phi_radius, "Test-function radius");
  ent->add_option("--tol", ent_tol, "Verdict tolerance (default: calibrated)");

  // reduce
  auto* red = app.add_subcommand("reduce", "Reduce a field over x_N and check the stream-function form");
  FieldInput red_in;
  red_in.add(red, false);
  std::string red_vfld;
  double red_floor = 1e-6, red_tol = 0.05, red_class_tol = 1e-3;
  std::uint64_t red_seed = 1;
  red->add_option("--reduced-out", red_vfld, "Write the reduced field as VFLD");
  red->add_option("--floor", red_floor, "Minimum |u'|");
  red->add_option("--tol", red_tol, "Stream-form tolerance");
  red->add_option("--classify-tol", red_class_tol, "Tolerance for classifying the reduced field");
  red->add_option("--seed", red_seed, "Classification seed");

  // report
  auto* rep = app.add_subcommand("report", "Check battery for a VFLD file, or bundle a directory of JSON results");
  std::string rep_path, rep_out;
  ResidualArgs rep_args;
  std::size_t rep_equator = 64;
  rep->add_option("input", rep_path, "VFLD file or directory")->required();
  rep->add_option("--out", rep_out, "Also write the report here");
  rep->add_option("--equator-count", rep_equator, "Equatorial directions for the weak residual");
  rep_args.add(rep, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) err << sub->help();
    if (app.get_subcommands().empty()) err << app.help();
    return kExitError;
  }
  has_expect = expect_opt->count() > 0;

  try {
    if (gen->parsed()) {
      const GridSpec grid = grid_args.build();
      const int dim = grid.dim();
      const Vec mid = 0.5 * (grid.lower() + grid.upper());
      const Vec center = gen_center.empty() ? mid : parse_vec(gen_center, dim, "--center");
      json prov = {{"generator", kind}, {"grid", to_json(grid)}};
      std::optional<VectorField> u;
      std::optional<ScalarField> psi;
      if (kind == "vortex") {
        u = gen_vortex(grid, center, gen_sign);
        prov["center"] = to_json(center);
        prov["sign"] = gen_sign;
      } else if (kind == "constant") {
        const Vec w = gen_direction.empty() ? unit_axis(dim, 0) : parse_vec(gen_direction, dim, "--direction");
        u = gen_constant(grid, w / w.norm());
        prov["direction"] = to_json(w / w.norm());
      } else if (kind == "rotational") {
        u = gen_rotational_2d(grid, center);
        prov["center"] = to_json(center);
      } else if (kind == "reflected-vortex") {
        u = gen_reflected_vortex_2d(grid, center);
        prov["center"] = to_json(center);
      } else if (kind == "vortex-line") {
        u = gen_vortex_line(grid, center, {restrict_x2});
        prov["axis_point"] = to_json(center.head(dim - 1));
        prov["restrict_x2_gt_1"] = restrict_x2;
      } else if (kind == "regularized-vortex") {
        u = regularized_vortex_2d(grid, center, gen_eps);
        prov["center"] = to_json(center);
        prov["eps"] = gen_eps;
      } else if (kind == "circle-gradient") {
        if (dim != 2) throw Error(ErrorKind::Unsupported, "circle-gradient is 2D");
        const double inner = gen_inner > 0.0 ? gen_inner : 0.25 * gen_radius;
        const double outer = gen_outer > 0.0 ? gen_outer : 0.9 * gen_radius;
        const VectorField v = gen_vortex(grid, center, -1);
        Mask mask = v.mask();
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const double r = (grid.node(i) - center).norm();
          if (r <= inner || r >= outer) mask[i] = 0;
        }
        u = VectorField(grid, v.components(), mask);
        prov["center"] = to_json(center);
        prov["radius"] = gen_radius;
        prov["annulus"] = {inner, outer};
      } else if (kind == "point-distance") {
        psi = gen_point_distance(grid, center);
        prov["center"] = to_json(center);
      } else if (kind == "fmm-point") {
        const std::vector<Vec> seeds{center};
        psi = fast_marching(grid, seeds);
        prov["center"] = to_json(center);
      } else if (kind == "ellipsoid-distance") {
        const Vec axes = gen_axes.empty() ? Vec(Vec::Ones(dim)) : parse_vec(gen_axes, dim, "--axes");
        psi = gen_ellipsoid_distance(grid, center, axes);
        prov["center"] = to_json(center);
        prov["semi_axes"] = to_json(axes);
      } else if (kind == "circle-distance") {
        const auto poly = circle_polyline(center, gen_radius, 2048);
        psi = gen_distance_field_2d(grid, poly);
        prov["center"] = to_json(center);
        prov["radius"] = gen_radius;
      } else if (kind == "parabola-distance") {
        const double half = std::sqrt(std::max((grid.upper()[1] - par_c) / std::max(par_a, 1e-12), 0.0));
        const double x1 = std::min({half, grid.upper()[0], -grid.lower()[0]});
        const auto poly = parabola_polyline(par_a, par_c, -x1, x1, 2048);
        psi = gen_distance_field_2d(grid, poly);
        prov["a"] = par_a;
        prov["c"] = par_c;
      } else {
        throw Error(ErrorKind::Configuration, "unknown --kind '" + kind + "'");
      }
      if (u) {
        write_vfld(gen_out, to_vfld(*u, "u", prov));
        if (!gen_svg.empty() && (dim == 2 || !gen_slice.empty())) write_plots(gen_svg, *u, gen_slice);
      } else {
        write_vfld(gen_out, to_vfld(*psi, "psi", prov));
        if (!gen_svg.empty() && (dim == 2 || !gen_slice.empty())) write_plots(gen_svg, *psi, gen_slice);
      }
      json summary = {{"written", gen_out}, {"provenance", prov}};
      out << summary.dump(2) << "\n";
      return kExitPass;
    }

    if (res->parsed()) {
      const VectorField u = res_in.vector();
      auto r = full_residual(u, res_args);
      r.result["input"] = res_in.path;
      emit(out, r.result, res_in.out);
      res_in.plot(u);
      return exit_for(r.verdict);
    }

    if (res2->parsed()) {
      const VectorField u = res2_in.vector();
      if (u.dim() != 2) throw Error(ErrorKind::Unsupported, "residual2d needs a 2D field");
      const DirectionSet ds = res2_args.directions(2);
      const auto phis = res2_args.test_functions(u);
      double tol = res2_args.tolerance;
      json cal_json = {{"tolerance", tol}, {"source", "user"}};
      if (tol < 0.0) {
        const auto cal = calibrate_residual(u.grid(), ds, 1, res2_args.radius(u.grid()), res2_args.phi_count);
        tol = cal.tolerance;
        cal_json = to_json(cal);
      }
      const auto report = kinetic_residual_2d(u, ds, phis, tol);
      json j = to_json(report, res2_args.max_entries);
      j["calibration"] = cal_json;
      j["parameters"] = res2_args.parameters(ds, 1, u.grid());
      j["input"] = res2_in.path;
      emit(out, j, res2_in.out);
      res2_in.plot(u);
      return exit_for(report.verdict);
    }

    if (weak->parsed()) {
      const VectorField u = weak_in.vector();
      auto r = weak_residual(u, weak_args, weak_args.count);
      r.result["input"] = weak_in.path;
      emit(out, r.result, weak_in.out);
      weak_in.plot(u);
      return exit_for(r.verdict);
    }

    if (cls->parsed()) {
      VectorField u = cls_in.vector();
      if (cls_normalize) u = normalize(u);
      const auto c = classify_field(u, cls_samples, cls_seed, cls_tol);
      json j = to_json(c);
      j["parameters"] = {{"samples", cls_samples}, {"seed", cls_seed}, {"tol", cls_tol}, {"normalize", cls_normalize}};
      j["input"] = cls_in.path;
      emit(out, j, cls_in.out);
      if (!cls_expect.empty() && cls_expect != to_string(c.tag)) return kExitFail;
      return kExitPass;
    }

    if (trc->parsed()) {
      const VectorField u = trc_in.vector();
      const int dim = u.dim();
      if (!trc_x0.empty()) {
        const double step = trc_step > 0.0 ? trc_step : 0.5 * u.grid().max_spacing();
        const auto p = characteristic_trace(u, parse_vec(trc_x0, dim, "--characteristic"), step, trc_len);
        json j = to_json(p);
        j["parameters"] = {{"step", step}, {"max_len", trc_len}};
        emit(out, j, trc_in.out);
        return p.points.empty() ? kExitFail : kExitPass;
      }
      if (trc_a.empty() || trc_b.empty()) throw Error(ErrorKind::Configuration, "trace needs --a and --b");
      TraceOptions opts;
      if (!trc_radii.empty()) opts.radii = parse_list(trc_radii, "--radii");
      opts.samples = trc_samples;
      opts.unit_tolerance = trc_unit_tol;
      const auto t = trace_on_segment(u, parse_vec(trc_a, dim, "--a"), parse_vec(trc_b, dim, "--b"), opts);
      json j = to_json(t);
      std::size_t available = 0, reliable = 0;
      for (const auto& s : t.samples) {
        available += s.available;
        reliable += s.reliable;
      }
      j["available"] = available;
      j["reliable"] = reliable;
      emit(out, j, trc_in.out);
      return available > 0 && available == reliable ? kExitPass : kExitFail;
    }

    if (umb->parsed()) {
      const ScalarField psi = umb_in.scalar();
      const auto r = umbilic_check(psi, umb_level, umb_opts);
      json j = to_json(r);
      j["parameters"] = {{"level", umb_level}, {"samples", umb_opts.sample_count}, {"tol", umb_opts.tolerance},
                         {"seed", umb_opts.seed}};
      emit(out, j, umb_in.out);
      umb_in.plot(psi);
      return exit_for(r.verdict);
    }

    if (deg->parsed()) {
      const VectorField u = deg_in.vector();
      const Vec c = deg_center.empty() ? Vec(0.5 * (u.grid().lower() + u.grid().upper()))
                                       : parse_vec(deg_center, u.dim(), "--center");
      const auto d = jacobian_degree(u, c, deg_radius);
      json j = to_json(d);
      j["parameters"] = {{"center", to_json(c)}, {"radius", deg_radius}};
      const bool ok = d.integer_distance <= 0.05 && (!has_expect || d.degree == deg_expect);
      j["verdict"] = ok ? "pass" : "fail";
      emit(out, j, deg_in.out);
      return ok ? kExitPass : kExitFail;
    }

    if (eng->parsed()) {
      const auto eps_list = parse_list(eng_eps, "--eps");
      std::optional<VectorField> fixed;
      if (eng_family.empty()) {
        if (eng_path.empty()) throw Error(ErrorKind::Configuration, "energy needs an input file or --family");
        fixed = vector_field(read_vfld(eng_path));
        if (!eng_svg.empty()) write_plots(eng_svg, *fixed, "");
      } else if (eng_family != "regularized-vortex") {
        throw Error(ErrorKind::Configuration, "unknown --family '" + eng_family + "'");
      }
      json rows = json::array();
      std::ostringstream csv;
      csv << "eps,dirichlet,penalty,curl_term,total\n";
      csv.precision(17);
      for (double e : eps_list) {
        EnergyBreakdown b;
        if (fixed) {
          b = gl_energy(*fixed, e);
        } else {
          eng_grid.dim = 2;
          const GridSpec g = eng_grid.build();
          b = gl_energy(regularized_vortex_2d(g, 0.5 * (g.lower() + g.upper()), e), e);
        }
        rows.push_back(to_json(b));
        csv << b.eps << ',' << b.dirichlet << ',' << b.penalty << ',' << b.curl_term << ',' << b.total << "\n";
      }
      if (!eng_csv.empty()) write_file_atomic(eng_csv, csv.str());
      json j = {{"sweep", rows},
                {"parameters", {{"eps", eps_list}, {"family", eng_family}, {"input", eng_path}}}};
      emit(out, j, eng_out);
      return kExitPass;
    }

    if (ent->parsed()) {
      const VectorField u = ent_in.vector();
      if (u.dim() != 2) throw Error(ErrorKind::Unsupported, "entropy needs a 2D field");
      Vec xi = parse_vec(ent_xi, 2, "--xi");
      xi /= xi.norm();
      const auto ks = parse_list(ent_k, "--k");
      double radius = ent_phi_radius;
      if (radius <= 0.0) {
        ResidualArgs tmp;
        radius = tmp.radius(u.grid());
      }
      const auto phis = halton_test_functions(u.grid(), u.mask(), ent_phi_count, radius);
      if (phis.empty()) throw Error(ErrorKind::NoSamples, "no test function fits the valid region");
      double tol = ent_tol;
      json cal_json = {{"tolerance", tol}, {"source", "user"}};
      if (tol < 0.0) {
        const auto cal = calibrate_residual(u.grid(), explicit_directions({xi}), 1, radius, ent_phi_count);
        tol = cal.tolerance;
        cal_json = to_json(cal);
      }
      const auto r = entropy_residual_2d(u, xi, phis, ks, tol);
      json j = to_json(r);
      j["calibration"] = cal_json;
      j["parameters"] = {{"phi_count", ent_phi_count}, {"phi_radius", radius}};
      emit(out, j, ent_in.out);
      ent_in.plot(u);
      return exit_for(r.verdict);
    }

    if (red->parsed()) {
      const VectorField u = red_in.vector();
      const auto r = dimensional_reduce(u, red_floor);
      if (!red_vfld.empty()) write_vfld(red_vfld, to_vfld(r.field, "u_reduced", {{"reduced_from", red_in.path}}));
      json j = {{"slice_deviation", r.slice_deviation}, {"reduced_nodes", r.reduced_nodes}};
      Verdict verdict = Verdict::Fail;
      if (r.field.dim() >= 2 && r.reduced_nodes >= 16) {
        const auto c = classify_field(r.field, 64, red_seed, red_class_tol);
        j["reduced_class"] = to_json(c);
        std::optional<StreamLabel> label;
        if (c.tag == FieldClass::Tag::Vortex) label = StreamLabel{StreamLabel::Kind::Vortex, c.center};
        if (c.tag == FieldClass::Tag::Constant) label = StreamLabel{StreamLabel::Kind::Constant, c.direction};
        if (label) {
          const auto s = stream_form_check(u, *label, red_tol);
          j["stream_form"] = to_json(s);
          verdict = s.verdict;
        }
      }
      j["verdict"] = to_string(verdict);
      j["parameters"] = {{"floor", red_floor}, {"tol", red_tol}, {"classify_tol", red_class_tol}, {"seed", red_seed}};
      emit(out, j, red_in.out);
      return exit_for(verdict);
    }

    if (rep->parsed()) {
      json j = {{"report_version", 1}, {"input", rep_path}};
      bool all_pass = true;
      if (fs::is_directory(rep_path)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(rep_path)) {
          if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        json bundle = json::object(), verdicts = json::object();
        for (const auto& f : files) {
          json content;
          try {
            content = json::parse(read_file(f));
          } catch (const json::parse_error& e) {
            throw Error(ErrorKind::Parse, f.string() + ": " + e.what());
          }
          const std::string name = f.filename().string();
          if (content.is_object() && content.contains("verdict")) {
            verdicts[name] = content["verdict"];
            if (content["verdict"] != "pass") all_pass = false;
          }
          bundle[name] = std::move(content);
        }
        j["files"] = bundle;
        j["verdicts"] = verdicts;
      } else {
        const VfldFile file = read_vfld(rep_path);
        const VectorField u = vector_field(file);
        j["provenance"] = file.provenance;
        j["grid"] = to_json(u.grid());
        j["checks"] = battery(u, rep_args, rep_equator, all_pass);
      }
      j["verdict"] = all_pass ? "pass" : "fail";
      emit(out, j, rep_out);
      return all_pass ? kExitPass : kExitFail;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace eikinetic::cli
