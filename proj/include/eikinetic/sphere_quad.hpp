#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eikinetic/grid.hpp"

namespace eikinetic {

enum class DirectionScheme { UniformAngle, Fibonacci, MonteCarlo, Explicit };

std::string_view to_string(DirectionScheme scheme);
DirectionScheme parse_scheme(std::string_view name);

/// Surface measure of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);
/// Volume of the unit ball in R^k.
double unit_ball_volume(int k);

/// Quadrature nodes on S^{N-1} with positive weights in surface-measure units.
class DirectionSet {
 public:
  DirectionSet(int dim, std::vector<double> nodes, std::vector<double> weights,
               DirectionScheme scheme, std::uint64_t seed);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  DirectionScheme scheme() const { return scheme_; }
  std::uint64_t seed() const { return seed_; }

  /// Node coordinates, node-major.
  std::span<const double> node_data() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  Vec node(std::size_t i) const;
  double weight(std::size_t i) const { return weights_[i]; }

  double total_weight() const;
  Vec first_moment() const;
  Mat second_moment() const;

 private:
  int dim_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  DirectionScheme scheme_;
  std::uint64_t seed_;
};

/// Uniform angles (N=2), spherical Fibonacci lattice (N=3), or seeded uniform
/// Monte Carlo with equal weights (any N). Deterministic in its arguments.
DirectionSet build_directions(int dim, std::size_t count, DirectionScheme scheme,
                              std::uint64_t seed = 0);

/// Caller-supplied directions (normalised) with equal weights |S^{N-1}| / n.
DirectionSet explicit_directions(const std::vector<Vec>& directions);

/// Applies an orthogonal matrix to every node.
DirectionSet rotate(const DirectionSet& ds, const Mat& rotation);

/// Embeds an (N-1)-dimensional set as S^{N-2} x {0} in R^N.
DirectionSet embed_equator(const DirectionSet& ds);

/// sum over nodes with xi . n > 0 of w * xi; analytically V_{N-1} n.
Vec half_sphere_first_moment(const DirectionSet& ds, const Vec& n);

enum class EquatorPart { Positive, Negative, Full };

/// Second moment of the equatorial sphere S^{N-2} in n^perp, expressed in the
/// orthonormal basis returned by `tangent_basis(n)`. For the positive half the
/// expected value is H^{N-2}(S^{N-2}) / (2 (N-1)) * Id. The equatorial rule has
/// ds.size() nodes: uniform angles for N = 3, and for N = 4 Monte Carlo with
/// ds.seed() when ds is Monte Carlo, Fibonacci otherwise.
Mat half_sphere_second_moment(const DirectionSet& ds, const Vec& n,
                              EquatorPart part = EquatorPart::Positive);

/// The same quadrature as an N x N matrix acting on R^N; the half is the side
/// of the first tangent basis vector.
Mat equatorial_second_moment_ambient(const DirectionSet& ds, const Vec& n,
                                     EquatorPart part = EquatorPart::Positive);

/// Orthonormal basis of n^perp by Gram-Schmidt over e_1..e_N in index order,
/// skipping candidates that are nearly parallel to the span so far. In 2D the
/// single vector is n^perp = (-n_2, n_1).
std::vector<Vec> tangent_basis(const Vec& n);

/// `count` unit vectors spanning n^perp: the basis above followed by
/// normalised sums of cyclically adjacent basis vectors.
std::vector<Vec> tangent_set(const Vec& n, int count);

/// std::mt19937_64 with explicit uniform/normal mappings (the standard
/// distributions are implementation-defined).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();
  double normal();
  std::uint64_t next() { return engine_(); }
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Uniformly distributed point on S^{dim-1}.
Vec random_unit(SeededRng& rng, int dim);

}  // namespace eikinetic
