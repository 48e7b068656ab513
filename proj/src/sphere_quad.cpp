#include "eikinetic/sphere_quad.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace eikinetic {

std::string_view to_string(DirectionScheme scheme) {
  switch (scheme) {
    case DirectionScheme::UniformAngle: return "uniform-angle";
    case DirectionScheme::Fibonacci: return "fibonacci";
    case DirectionScheme::MonteCarlo: return "monte-carlo";
    case DirectionScheme::Explicit: return "explicit";
  }
  return "unknown";
}

DirectionScheme parse_scheme(std::string_view name) {
  if (name == "uniform-angle" || name == "uniform") return DirectionScheme::UniformAngle;
  if (name == "fibonacci") return DirectionScheme::Fibonacci;
  if (name == "monte-carlo" || name == "mc") return DirectionScheme::MonteCarlo;
  if (name == "explicit") return DirectionScheme::Explicit;
  throw Error(ErrorKind::Configuration, "unknown direction scheme '" + std::string(name) + "'");
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double unit_ball_volume(int k) {
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

DirectionSet::DirectionSet(int dim, std::vector<double> nodes, std::vector<double> weights,
                           DirectionScheme scheme, std::uint64_t seed)
    : dim_(dim), nodes_(std::move(nodes)), weights_(std::move(weights)), scheme_(scheme), seed_(seed) {
  if (dim_ < 1 || dim_ > kMaxDim) throw Error(ErrorKind::Configuration, "direction dimension out of range");
  if (nodes_.size() != weights_.size() * static_cast<std::size_t>(dim_)) {
    throw Error(ErrorKind::Configuration, "node/weight count mismatch");
  }
  for (double w : weights_) {
    if (!(w > 0.0)) throw Error(ErrorKind::Configuration, "direction weights must be positive");
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (std::abs(node(i).norm() - 1.0) > 1e-14) {
      throw Error(ErrorKind::Configuration, "direction node is not unit length");
    }
  }
}

Vec DirectionSet::node(std::size_t i) const {
  Vec v(dim_);
  for (int k = 0; k < dim_; ++k) v[k] = nodes_[i * dim_ + k];
  return v;
}

double DirectionSet::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

Vec DirectionSet::first_moment() const {
  Vec m = Vec::Zero(dim_);
  for (std::size_t i = 0; i < size(); ++i) m += weights_[i] * node(i);
  return m;
}

Mat DirectionSet::second_moment() const {
  Mat m = Mat::Zero(dim_, dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    const Vec x = node(i);
    m += weights_[i] * x * x.transpose();
  }
  return m;
}

namespace {

DirectionSet uniform_angle(std::size_t count, double phase) {
  std::vector<double> nodes;
  nodes.reserve(2 * count);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double a = phase + step * static_cast<double>(k);
    nodes.push_back(std::cos(a));
    nodes.push_back(std::sin(a));
  }
  return DirectionSet(2, std::move(nodes), std::vector<double>(count, step),
                      DirectionScheme::UniformAngle, 0);
}

DirectionSet fibonacci(std::size_t count) {
  const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;
  const double n = static_cast<double>(count);
  std::vector<double> nodes;
  nodes.reserve(3 * count);
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double frac = static_cast<double>(i) * inv_golden;
    frac -= std::floor(frac);
    const double theta = 2.0 * std::numbers::pi * frac;
    Vec p = make_vec({r * std::cos(theta), r * std::sin(theta), z});
    p /= p.norm();
    nodes.insert(nodes.end(), p.data(), p.data() + 3);
  }
  return DirectionSet(3, std::move(nodes), std::vector<double>(count, 4.0 * std::numbers::pi / n),
                      DirectionScheme::Fibonacci, 0);
}

DirectionSet monte_carlo(int dim, std::size_t count, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<double> nodes;
  nodes.reserve(dim * count);
  // Antithetic pairs (xi, -xi); an odd count leaves the last node unpaired.
  Vec p;
  for (std::size_t i = 0; i < count; ++i) {
    p = i % 2 == 0 ? random_unit(rng, dim) : Vec(-p);
    nodes.insert(nodes.end(), p.data(), p.data() + dim);
  }
  const double w = sphere_area(dim) / static_cast<double>(count);
  return DirectionSet(dim, std::move(nodes), std::vector<double>(count, w),
                      DirectionScheme::MonteCarlo, seed);
}

}  // namespace

DirectionSet build_directions(int dim, std::size_t count, DirectionScheme scheme, std::uint64_t seed) {
  if (count < 4) throw Error(ErrorKind::Configuration, "direction count must be at least 4");
  switch (scheme) {
    case DirectionScheme::UniformAngle:
      if (dim != 2) throw Error(ErrorKind::Configuration, "uniform-angle directions need dim 2");
      return uniform_angle(count, 0.0);
    case DirectionScheme::Fibonacci:
      if (dim != 3) throw Error(ErrorKind::Configuration, "fibonacci directions need dim 3");
      return fibonacci(count);
    case DirectionScheme::MonteCarlo:
      if (dim < 2 || dim > kMaxDim) throw Error(ErrorKind::Configuration, "monte-carlo dim must be 2..4");
      return monte_carlo(dim, count, seed);
    case DirectionScheme::Explicit:
      break;
  }
  throw Error(ErrorKind::Configuration, "unknown scheme");
}

DirectionSet explicit_directions(const std::vector<Vec>& directions) {
  if (directions.empty()) throw Error(ErrorKind::Configuration, "no directions given");
  const int dim = static_cast<int>(directions.front().size());
  std::vector<double> nodes;
  for (const auto& d : directions) {
    if (d.size() != dim) throw Error(ErrorKind::Configuration, "directions differ in dimension");
    const double len = d.norm();
    if (!(len > 0.0)) throw Error(ErrorKind::Configuration, "zero direction");
    const Vec p = d / len;
    nodes.insert(nodes.end(), p.data(), p.data() + dim);
  }
  const double w = sphere_area(dim) / static_cast<double>(directions.size());
  return DirectionSet(dim, std::move(nodes), std::vector<double>(directions.size(), w),
                      DirectionScheme::Explicit, 0);
}

DirectionSet rotate(const DirectionSet& ds, const Mat& rotation) {
  std::vector<double> nodes;
  nodes.reserve(ds.node_data().size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Vec p = rotation * ds.node(i);
    p /= p.norm();
    nodes.insert(nodes.end(), p.data(), p.data() + p.size());
  }
  return DirectionSet(ds.dim(), std::move(nodes), {ds.weights().begin(), ds.weights().end()},
                      ds.scheme(), ds.seed());
}

DirectionSet embed_equator(const DirectionSet& ds) {
  const int m = ds.dim();
  if (m + 1 > kMaxDim) throw Error(ErrorKind::Configuration, "cannot embed beyond dimension 4");
  std::vector<double> nodes;
  nodes.reserve((m + 1) * ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (int k = 0; k < m; ++k) nodes.push_back(ds.node_data()[i * m + k]);
    nodes.push_back(0.0);
  }
  return DirectionSet(m + 1, std::move(nodes), {ds.weights().begin(), ds.weights().end()},
                      ds.scheme(), ds.seed());
}

Vec half_sphere_first_moment(const DirectionSet& ds, const Vec& n) {
  Vec m = Vec::Zero(ds.dim());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Vec x = ds.node(i);
    if (x.dot(n) > 0.0) m += ds.weight(i) * x;
  }
  return m;
}

Mat half_sphere_second_moment(const DirectionSet& ds, const Vec& n, EquatorPart part) {
  const int dim = ds.dim();
  if (dim < 3) throw Error(ErrorKind::Unsupported, "equatorial second moment needs dim >= 3");
  const Mat ambient = equatorial_second_moment_ambient(ds, n, part);
  const auto basis = tangent_basis(n);
  const int m = dim - 1;
  Mat out(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) out(a, b) = basis[a].dot(ambient * basis[b]);
  }
  return out;
}

Mat equatorial_second_moment_ambient(const DirectionSet& ds, const Vec& n, EquatorPart part) {
  const int dim = ds.dim();
  if (dim < 3) throw Error(ErrorKind::Unsupported, "equatorial second moment needs dim >= 3");
  if (n.size() != dim || std::abs(n.norm() - 1.0) > 1e-12) {
    throw Error(ErrorKind::Precondition, "normal must be a unit vector of matching dimension");
  }
  const int m = dim - 1;
  // Half-step phase keeps uniform nodes off the dividing great circle.
  const DirectionSet equator = m == 2 ? uniform_angle(ds.size(), std::numbers::pi / static_cast<double>(ds.size()))
                               : ds.scheme() == DirectionScheme::MonteCarlo ? monte_carlo(m, ds.size(), ds.seed())
                                                                            : fibonacci(ds.size());
  const auto basis = tangent_basis(n);
  Mat out = Mat::Zero(dim, dim);
  for (std::size_t i = 0; i < equator.size(); ++i) {
    const Vec eta = equator.node(i);
    const bool take = part == EquatorPart::Full || (part == EquatorPart::Positive && eta[0] > 0.0) ||
                      (part == EquatorPart::Negative && eta[0] < 0.0);
    if (!take) continue;
    Vec xi = Vec::Zero(dim);
    for (int k = 0; k < m; ++k) xi += eta[k] * basis[k];
    out += equator.weight(i) * xi * xi.transpose();
  }
  return out;
}

std::vector<Vec> tangent_basis(const Vec& n) {
  const int dim = static_cast<int>(n.size());
  if (dim == 2) return {make_vec({-n[1], n[0]})};
  std::vector<Vec> basis;
  const Vec nn = n / n.norm();
  for (int k = 0; k < dim && static_cast<int>(basis.size()) < dim - 1; ++k) {
    Vec v = unit_axis(dim, k);
    for (int pass = 0; pass < 2; ++pass) {
      v -= v.dot(nn) * nn;
      for (const auto& b : basis) v -= v.dot(b) * b;
    }
    const double len = v.norm();
    if (len < 1e-6) continue;
    basis.push_back(v / len);
  }
  return basis;
}

std::vector<Vec> tangent_set(const Vec& n, int count) {
  std::vector<Vec> out = tangent_basis(n);
  const int m = static_cast<int>(out.size());
  if (count < m) {
    throw Error(ErrorKind::Precondition, "tangent count must be at least N-1");
  }
  for (int j = 0; out.size() < static_cast<std::size_t>(count); ++j) {
    Vec v = out[j % m] + out[(j + 1) % m];
    out.push_back(v / v.norm());
  }
  return out;
}

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::size_t SeededRng::below(std::size_t n) {
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

Vec random_unit(SeededRng& rng, int dim) {
  Vec p(dim);
  double len = 0.0;
  do {
    for (int k = 0; k < dim; ++k) p[k] = rng.normal();
    len = p.norm();
  } while (len < 1e-12);
  return p / len;
}

}  // namespace eikinetic
