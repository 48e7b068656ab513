#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eikinetic/field_ops.hpp"
#include "eikinetic/grid.hpp"
#include "eikinetic/sphere_quad.hpp"

namespace eikinetic {

/// Indicator of {u . xi > 0} on the nodes of u; the tie u . xi = 0 maps to 0.
struct ChiField {
  GridSpec grid;
  Vec xi;
  std::vector<std::uint8_t> values;
  Mask mask;
};

ChiField chi(const VectorField& u, const Vec& xi);

enum class Verdict { Pass, Fail, Indeterminate };
std::string_view to_string(Verdict v);

/// pass iff max_abs <= tol, fail iff max_abs > 10 tol.
Verdict verdict_for(double max_abs, double tolerance);

struct ResidualEntry {
  std::size_t xi_index = 0;
  std::size_t v_index = 0;
  std::size_t phi_index = 0;
  Vec xi;
  Vec v;
  Vec phi_center;
  double phi_radius = 0.0;
  double value = 0.0;
};

struct ResidualReport {
  std::vector<ResidualEntry> entries;
  double max_abs = 0.0;
  /// Index of the entry attaining max_abs.
  std::size_t worst = 0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Pass;
};

/// R(xi, v, phi) = -sum_x chi(x, xi) (v . grad phi)(x) h^N for every xi in
/// `ds`, every v in tangent_set(xi, tangents_per_xi) and every phi.
ResidualReport kinetic_residual(const VectorField& u, const DirectionSet& ds, int tangents_per_xi,
                                std::span<const TestFunction> phis, double tolerance);

/// 2D form with the single tangent v = xi^perp.
ResidualReport kinetic_residual_2d(const VectorField& u, const DirectionSet& ds,
                                   std::span<const TestFunction> phis, double tolerance);

/// Kinetic residual restricted to the equatorial directions S^{N-2} x {0}.
/// `equator` is either an (N-1)-dimensional set, which is embedded, or an
/// N-dimensional one whose nodes have xi_N = 0.
ResidualReport weak_kinetic_residual(const VectorField& u, const DirectionSet& equator,
                                     std::span<const TestFunction> phis, double tolerance);

struct ResidualCalibration {
  double tolerance = 0.0;
  /// Largest residual seen on the constant and the vortex reference fields.
  double constant_max = 0.0;
  double vortex_max = 0.0;
  double factor = 3.0;
  double floor = 1e-12;
};

/// Runs the same direction set, tangent count and test-function family (radius
/// and count, Halton centres) on a constant field and on a vortex centred in
/// the box, and sets the tolerance to factor x the largest residual.
ResidualCalibration calibrate_residual(const GridSpec& grid, const DirectionSet& ds, int tangents_per_xi,
                                       double phi_radius, std::size_t phi_count);

struct Reconstruction {
  VectorField field;
  double max_error = 0.0;
};

/// u_hat(x) = (1 / V_{N-1}) sum_xi w_xi xi chi(x, xi) on the valid nodes.
Reconstruction averaging_reconstruct(const VectorField& u, const DirectionSet& ds);

struct OrderingReport {
  std::size_t pairs_tested = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  /// Largest min(|u(y) . xi|, |u(z) . xi|) over opposite-sign events.
  double worst_margin = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

/// Draws valid node pairs (y, z) whose segment stays in the valid region and
/// directions xi orthogonal to z - y; counts events where u(y) . xi and
/// u(z) . xi exceed delta with opposite signs.
OrderingReport ordering_check(const VectorField& u, std::size_t pair_count, std::size_t xi_per_pair,
                              double delta, std::uint64_t seed);

struct TraceOptions {
  /// Empty selects {16h, 8h, 4h}.
  std::vector<double> radii;
  std::size_t samples = 33;
  double unit_tolerance = 0.05;
};

struct TraceSample {
  double t = 0.0;
  Vec point;
  /// Cross-section average per radius; empty when the section touches an
  /// invalid cell.
  std::vector<Vec> averages;
  bool available = false;
  bool reliable = false;
  /// Value at the smallest radius, normalised when reliable.
  Vec value;
  /// |average(r_last) - average(r_prev)|.
  double cauchy = 0.0;
};

struct TraceField {
  Vec a;
  Vec b;
  std::vector<double> radii;
  std::vector<TraceSample> samples;
  double unit_tolerance = 0.0;
};

TraceField trace_on_segment(const VectorField& u, const Vec& a, const Vec& b, TraceOptions options = {});

struct CharacteristicPath {
  std::vector<Vec> points;
  double length = 0.0;
  /// Largest distance from the chord between the first and last point.
  double chord_deviation = 0.0;
};

/// Midpoint-rule integration of x' = u(x) with a fixed step until the path
/// leaves the valid region or reaches max_len.
CharacteristicPath characteristic_trace(const VectorField& u, const Vec& x0, double step, double max_len);

/// Truncated cosine profile cos(theta - theta0) on |theta - theta0| < pi/2
/// mollified by a bump of half-width 1/k; value and derivative.
struct AngularProfile {
  double value = 0.0;
  double derivative = 0.0;
};
AngularProfile smoothed_profile(double theta, double theta0, double k);

/// Phi_k(z) = -phi_k'(theta) z + phi_k(theta) z^perp; k <= 0 gives the sharp
/// entropy xi^perp 1{z . xi > 0}.
Vec entropy_flux(const Vec& z, const Vec& xi, double k);

struct EntropyEntry {
  std::size_t phi_index = 0;
  double sharp = 0.0;
  /// One value per smoothing parameter.
  std::vector<double> smoothed;
};

struct EntropyReport {
  Vec xi;
  std::vector<double> ks;
  std::vector<EntropyEntry> entries;
  double sharp_max = 0.0;
  std::vector<double> smoothed_max;
  /// max over phi of |R_k - R_sharp|, one per k.
  std::vector<double> gap;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Pass;
};

/// Weak divergence sum_x Phi(u(x)) . grad phi(x) h^2 for the sharp entropy and
/// its smoothed versions.
EntropyReport entropy_residual_2d(const VectorField& u, const Vec& xi, std::span<const TestFunction> phis,
                                  std::span<const double> ks, double tolerance);

struct CurlSymmetryReport {
  double max_abs = 0.0;
  /// Axis k attaining the maximum of |d_k u_N - d_N u_k|.
  int worst_axis = -1;
  std::size_t evaluated_nodes = 0;
};

CurlSymmetryReport curl_symmetry_check(const VectorField& u);

struct Reduction {
  VectorField field;
  /// max over reduced nodes and slices of |u'/|u'| - u_tilde|.
  double slice_deviation = 0.0;
  std::size_t reduced_nodes = 0;
};

/// Averages u'/|u'| over x_N. A reduced node is valid when every slice is.
Reduction dimensional_reduce(const VectorField& u, double floor = 1e-6);

struct StreamLabel {
  enum class Kind { Constant, Vortex } kind = Kind::Constant;
  /// w' for Constant, P' for Vortex (N-1 coordinates).
  Vec value;
};

struct StreamFormReport {
  double max_std_un = 0.0;
  double max_std_norm = 0.0;
  /// max of 1 - |u'/|u'| . grad' alpha|.
  double direction_defect = 0.0;
  std::size_t bins = 0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Pass;
};

StreamFormReport stream_form_check(const VectorField& u, const StreamLabel& label, double tolerance = 0.05);

}  // namespace eikinetic
