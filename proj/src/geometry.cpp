#include "eikinetic/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "eikinetic/field_ops.hpp"
#include "eikinetic/sphere_quad.hpp"

namespace eikinetic {

Line::Line(Vec p, Vec d) : point(std::move(p)), direction(std::move(d)) {
  if (point.size() != direction.size() || point.size() < 2) {
    throw Error(ErrorKind::Precondition, "line point and direction must share a dimension >= 2");
  }
  const double len = direction.norm();
  if (!(len > 0.0) || !std::isfinite(len)) throw Error(ErrorKind::Precondition, "line direction must be nonzero");
  direction /= len;
}

CoplanarResult coplanar(const Line& l1, const Line& l2, double tol) {
  const int dim = static_cast<int>(l1.point.size());
  if (l2.point.size() != dim) throw Error(ErrorKind::Precondition, "lines live in different dimensions");
  const Vec dp = l2.point - l1.point;
  CoplanarResult out;
  if (dim >= 3) {
    Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, kMaxDim> m(3, dim);
    m.row(0) = l1.direction.transpose();
    m.row(1) = l2.direction.transpose();
    m.row(2) = dp.transpose();
    Eigen::JacobiSVD<decltype(m)> svd(m);
    out.defect = svd.singularValues()(2);
  }
  out.coplanar = out.defect <= tol * std::max(1.0, dp.norm());
  return out;
}

std::string_view to_string(LineFamilyTag tag) {
  switch (tag) {
    case LineFamilyTag::Planar: return "Planar";
    case LineFamilyTag::Parallel: return "Parallel";
    case LineFamilyTag::Concurrent: return "Concurrent";
    case LineFamilyTag::Incoherent: return "Incoherent";
  }
  return "Unknown";
}

LineFamilyClass classify_line_family(const std::vector<Line>& lines, double tol) {
  if (lines.size() < 3) throw Error(ErrorKind::Precondition, "need at least three lines");
  const int dim = static_cast<int>(lines.front().point.size());
  for (const auto& l : lines) {
    if (l.point.size() != dim) throw Error(ErrorKind::Precondition, "lines live in different dimensions");
  }
  LineFamilyClass out;
  const std::size_t n = lines.size();

  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto c = coplanar(lines[i], lines[j], tol);
      worst = std::max(worst, c.defect);
      if (!c.coplanar && !out.witness) out.witness = std::make_pair(i, j);
    }
  }
  out.residual = worst;
  if (out.witness) {
    out.tag = LineFamilyTag::Incoherent;
    return out;
  }

  bool parallel = true;
  for (std::size_t i = 0; i < n && parallel; ++i) {
    for (std::size_t j = i + 1; j < n && parallel; ++j) {
      parallel = std::abs(lines[i].direction.dot(lines[j].direction)) >= 1.0 - tol;
    }
  }
  if (parallel) {
    out.tag = LineFamilyTag::Parallel;
    return out;
  }

  if (dim >= 3) {
    Vec mean = Vec::Zero(dim);
    for (const auto& l : lines) mean += l.point;
    mean /= static_cast<double>(n);
    Eigen::MatrixXd rows(2 * n, dim);
    for (std::size_t i = 0; i < n; ++i) {
      rows.row(2 * i) = (lines[i].point - mean).transpose();
      rows.row(2 * i + 1) = lines[i].direction.transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
    const auto& s = svd.singularValues();
    if (s(2) <= tol * std::max(1.0, s(0))) {
      out.tag = LineFamilyTag::Planar;
      return out;
    }
  }

  Mat a = Mat::Zero(dim, dim);
  Vec b = Vec::Zero(dim);
  for (const auto& l : lines) {
    const Mat p = Mat::Identity(dim, dim) - l.direction * l.direction.transpose();
    a += p;
    b += p * l.point;
  }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(dim - 1) <= 1e-12 * sv(0)) {
    out.tag = LineFamilyTag::Parallel;
    return out;
  }
  const Vec o = svd.solve(b);
  double fit = 0.0;
  for (const auto& l : lines) {
    const Vec d = o - l.point;
    fit = std::max(fit, (d - d.dot(l.direction) * l.direction).norm());
  }
  out.point = o;
  out.fit_residual = fit;
  out.tag = fit <= tol ? LineFamilyTag::Concurrent : LineFamilyTag::Incoherent;
  return out;
}

std::vector<Line> read_lines_csv(std::istream& in) {
  std::vector<Line> out;
  std::string row;
  std::size_t line_no = 0;
  while (std::getline(in, row)) {
    ++line_no;
    const auto first = row.find_first_not_of(" \t\r");
    if (first == std::string::npos || row[first] == '#') continue;
    std::vector<double> values;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (values.size() % 2 != 0 || values.size() < 4 || values.size() > 2 * kMaxDim) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected point and direction");
    }
    const std::size_t dim = values.size() / 2;
    if (!out.empty() && out.front().point.size() != static_cast<Eigen::Index>(dim)) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": dimension changes");
    }
    out.emplace_back(make_vec(std::span<const double>(values.data(), dim)),
                     make_vec(std::span<const double>(values.data() + dim, dim)));
  }
  return out;
}

std::string_view to_string(FieldClass::Tag tag) {
  switch (tag) {
    case FieldClass::Tag::Constant: return "Constant";
    case FieldClass::Tag::Vortex: return "Vortex";
    case FieldClass::Tag::Other: return "Other";
  }
  return "Unknown";
}

FieldClass classify_field(const VectorField& u, std::size_t sample_count, std::uint64_t seed, double tol) {
  require_unit(u);
  if (sample_count < 16) throw Error(ErrorKind::InsufficientSamples, "sample_count must be at least 16");
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < u.grid().size(); ++i) {
    if (u.valid(i)) valid.push_back(i);
  }
  if (valid.size() < 16) throw Error(ErrorKind::InsufficientSamples, "fewer than 16 valid nodes");
  const std::size_t count = std::min(sample_count, valid.size());
  SeededRng rng(seed);
  for (std::size_t i = 0; i < count; ++i) std::swap(valid[i], valid[i + rng.below(valid.size() - i)]);

  std::vector<Line> lines;
  lines.reserve(count);
  for (std::size_t i = 0; i < count; ++i) lines.emplace_back(u.grid().node(valid[i]), u.at(valid[i]));

  FieldClass out;
  out.samples = count;
  out.family = classify_line_family(lines, tol);
  std::ostringstream diag;
  switch (out.family.tag) {
    case LineFamilyTag::Parallel: {
      Vec w = Vec::Zero(u.dim());
      for (const auto& l : lines) w += l.direction;
      if (w.norm() > 0.0) w.normalize();
      const bool consistent = std::all_of(lines.begin(), lines.end(),
                                          [&](const Line& l) { return l.direction.dot(w) > 0.0; });
      if (consistent) {
        out.tag = FieldClass::Tag::Constant;
        out.direction = w;
      } else {
        diag << "parallel lines with opposite orientations";
      }
      break;
    }
    case LineFamilyTag::Concurrent: {
      const Vec& o = *out.family.point;
      std::size_t plus = 0, minus = 0;
      for (const auto& l : lines) {
        const double s = l.direction.dot(l.point - o);
        if (s > 0.0) ++plus;
        else if (s < 0.0) ++minus;
      }
      if (plus > 0 && minus > 0) {
        diag << "mixed orientation about the concurrency point (" << plus << " outward, " << minus << " inward)";
      } else {
        out.tag = FieldClass::Tag::Vortex;
        out.center = o;
        out.sign = plus > 0 ? 1 : -1;
      }
      break;
    }
    case LineFamilyTag::Planar:
      diag << "sampled lines lie in one 2-plane";
      break;
    case LineFamilyTag::Incoherent:
      if (out.family.witness) {
        diag << "non-coplanar pair (" << out.family.witness->first << ", " << out.family.witness->second
             << "), defect " << out.family.residual;
      } else {
        diag << "no common point, fit residual " << out.family.fit_residual;
      }
      break;
  }
  out.diagnostics = diag.str();
  return out;
}

ShapeOperatorContext::ShapeOperatorContext(const ScalarField& psi, double floor)
    : psi_(psi), floor_(floor), grad_(gradient(psi)), normal_(normalize(grad_, floor)) {
  const int dim = psi.grid().dim();
  dnormal_.reserve(dim);
  for (int j = 0; j < dim; ++j) {
    const auto c = normal_.component(j);
    dnormal_.push_back(gradient(ScalarField(psi.grid(), {c.begin(), c.end()}, normal_.mask())));
  }
}

ShapeOperator ShapeOperatorContext::at(const Vec& x) const {
  const int dim = psi_.grid().dim();
  const Vec g = interpolate(grad_, x);
  const double gn = g.norm();
  if (gn < floor_) throw Error(ErrorKind::CriticalPoint, "gradient below floor at evaluation point");
  ShapeOperator out;
  out.normal = g / gn;
  Mat jac(dim, dim);
  for (int j = 0; j < dim; ++j) {
    const auto row = try_interpolate(dnormal_[j], x);
    if (!row) throw Error(ErrorKind::OutOfDomain, "normal derivative unavailable at evaluation point");
    jac.row(j) = row->transpose();
  }
  out.tangents = tangent_basis(out.normal);
  const int m = dim - 1;
  Mat s(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) s(a, b) = out.tangents[a].dot(jac * out.tangents[b]);
  }
  out.asymmetry = (s - s.transpose()).norm();
  out.matrix = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(out.matrix);
  out.eigenvalues = eig.eigenvalues();
  out.lambda = out.eigenvalues.mean();
  out.deviation = (out.eigenvalues.array() - out.lambda).abs().maxCoeff();
  return out;
}

ShapeOperator shape_operator(const ScalarField& psi, const Vec& x, double floor) {
  return ShapeOperatorContext(psi, floor).at(x);
}

namespace {

// Linear crossings of {psi = level} on grid edges whose endpoints are valid,
// away from the box faces.
std::vector<Vec> level_crossings(const ScalarField& psi, double level, double margin_cells) {
  const GridSpec& grid = psi.grid();
  const int dim = grid.dim();
  const Vec lo = grid.lower();
  const Vec hi = grid.upper();
  std::vector<Vec> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!psi.valid(i)) continue;
    const MultiIndex idx = grid.unravel(i);
    const double fi = psi[i] - level;
    for (int a = 0; a < dim; ++a) {
      if (idx[a] + 1 >= grid.shape(a)) continue;
      const std::size_t j = i + grid.stride(a);
      if (!psi.valid(j)) continue;
      const double fj = psi[j] - level;
      if (!(fi == 0.0 || (fi < 0.0) != (fj < 0.0)) || fj == 0.0) continue;
      const double t = fi == 0.0 ? 0.0 : fi / (fi - fj);
      Vec p = grid.node(idx);
      p[a] += t * grid.spacing(a);
      bool inside = true;
      for (int k = 0; k < dim && inside; ++k) {
        const double m = margin_cells * grid.spacing(k);
        inside = p[k] >= lo[k] + m && p[k] <= hi[k] - m;
      }
      if (inside) out.push_back(p);
    }
  }
  return out;
}

}  // namespace

UmbilicReport umbilic_check(const ScalarField& psi, double level, const UmbilicOptions& options) {
  const int dim = psi.grid().dim();
  if (dim < 3) throw Error(ErrorKind::Unsupported, "umbilic check needs dim >= 3");
  auto candidates = level_crossings(psi, level, options.margin_cells);
  if (candidates.empty()) throw Error(ErrorKind::NoSamples, "level set is empty inside the valid region");
  SeededRng rng(options.seed);
  for (std::size_t i = candidates.size(); i > 1; --i) std::swap(candidates[i - 1], candidates[rng.below(i)]);

  const ShapeOperatorContext ctx(psi);
  UmbilicReport report;
  report.level = level;
  report.tolerance = options.tolerance;
  for (const auto& p : candidates) {
    if (report.samples.size() >= options.sample_count) break;
    ShapeOperator s;
    try {
      s = ctx.at(p);
    } catch (const Error&) {
      continue;
    }
    UmbilicSample sample;
    sample.point = p;
    sample.lambda = s.lambda;
    sample.deviation = s.deviation;
    sample.spread = s.eigenvalues.maxCoeff() - s.eigenvalues.minCoeff();
    if (std::abs(s.lambda) > options.flat_lambda) sample.center = Vec(p - s.normal / s.lambda);
    report.samples.push_back(sample);
  }
  if (report.samples.empty()) throw Error(ErrorKind::NoSamples, "no level-set point admits a shape operator");
  for (const auto& s : report.samples) {
    report.max_deviation = std::max(report.max_deviation, s.deviation);
    report.max_spread = std::max(report.max_spread, s.spread);
  }
  report.umbilical = report.max_deviation <= options.tolerance;
  const bool curved = std::all_of(report.samples.begin(), report.samples.end(),
                                  [](const UmbilicSample& s) { return s.center.has_value(); });
  report.planar = std::all_of(report.samples.begin(), report.samples.end(),
                              [](const UmbilicSample& s) { return !s.center.has_value(); });
  if (curved) {
    Vec mean = Vec::Zero(dim);
    for (const auto& s : report.samples) mean += *s.center;
    mean /= static_cast<double>(report.samples.size());
    report.center_estimate = mean;
    for (const auto& s : report.samples) report.center_spread = std::max(report.center_spread, (*s.center - mean).norm());
  }
  report.verdict = report.umbilical ? Verdict::Pass : Verdict::Fail;
  return report;
}

std::vector<CurvatureSample> level_curvature_2d(const ScalarField& psi, double level, double margin_cells) {
  if (psi.grid().dim() != 2) throw Error(ErrorKind::Unsupported, "level curvature is 2D only");
  const ShapeOperatorContext ctx(psi);
  std::vector<CurvatureSample> out;
  for (const auto& p : level_crossings(psi, level, margin_cells)) {
    try {
      out.push_back({p, ctx.at(p).lambda});
    } catch (const Error&) {
    }
  }
  if (out.empty()) throw Error(ErrorKind::NoSamples, "level curve is empty inside the valid region");
  return out;
}

namespace {

Vec unit_sample(const VectorField& u, const Vec& p) {
  const auto v = try_interpolate(u, p);
  if (!v) throw Error(ErrorKind::OutOfDomain, "contour leaves the valid region");
  const double n = v->norm();
  if (n < 0.5) throw Error(ErrorKind::DegenerateContour, "|u| below 0.5 on the contour");
  return *v / n;
}

struct Icosphere {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
};

Icosphere icosphere(int levels) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Icosphere s;
  for (const auto& v : std::vector<Eigen::Vector3d>{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                                                     {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                                                     {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}}) {
    s.vertices.push_back(v.normalized());
  }
  s.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      s.vertices.push_back((s.vertices[a] + s.vertices[b]).normalized());
      const int id = static_cast<int>(s.vertices.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * s.faces.size());
    for (const auto& f : s.faces) {
      const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    s.faces = std::move(next);
  }
  return s;
}

}  // namespace

DegreeResult jacobian_degree(const VectorField& u, const Vec& center, double radius) {
  const int dim = u.dim();
  if (center.size() != dim) throw Error(ErrorKind::Precondition, "center has wrong dimension");
  if (!(radius > 0.0)) throw Error(ErrorKind::Precondition, "radius must be positive");
  const double h = u.grid().max_spacing();
  double raw = 0.0;
  if (dim == 2) {
    const auto m = std::max<std::size_t>(
        256, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * radius / (0.25 * h))));
    auto point = [&](std::size_t i) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(i % m) / static_cast<double>(m);
      return Vec(center + radius * make_vec({std::cos(a), std::sin(a)}));
    };
    Vec prev = unit_sample(u, point(0));
    double total = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
      const Vec cur = unit_sample(u, point(i));
      total += std::atan2(prev[0] * cur[1] - prev[1] * cur[0], prev.dot(cur));
      prev = cur;
    }
    raw = total / (2.0 * std::numbers::pi);
  } else if (dim == 3) {
    int levels = 3;
    while (levels < 6 && 4.0 * std::numbers::pi * radius * radius / (20.0 * std::pow(4.0, levels)) > 0.25 * h * h) {
      ++levels;
    }
    const Icosphere sphere = icosphere(levels);
    std::vector<Eigen::Vector3d> values;
    values.reserve(sphere.vertices.size());
    for (const auto& v : sphere.vertices) {
      const Vec p = center + radius * Vec(v);
      const Vec w = unit_sample(u, p);
      values.emplace_back(w[0], w[1], w[2]);
    }
    double total = 0.0;
    for (const auto& f : sphere.faces) {
      const auto& a = values[f[0]];
      const auto& b = values[f[1]];
      const auto& c = values[f[2]];
      total += 2.0 * std::atan2(a.dot(b.cross(c)), 1.0 + a.dot(b) + b.dot(c) + c.dot(a));
    }
    raw = total / (4.0 * std::numbers::pi);
  } else {
    throw Error(ErrorKind::Unsupported, "degree is computed for N = 2 and N = 3 only");
  }
  DegreeResult out;
  out.raw = raw;
  out.degree = static_cast<int>(std::lround(raw));
  out.integer_distance = std::abs(raw - out.degree);
  return out;
}

}  // namespace eikinetic
