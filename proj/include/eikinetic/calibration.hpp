#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "eikinetic/sphere_quad.hpp"

namespace eikinetic {

/// Deviations of a direction set from the exact sphere identities.
struct QuadratureError {
  /// |sum w - |S^{N-1}|| / |S^{N-1}|.
  double mass = 0.0;
  /// |sum w xi|.
  double first = 0.0;
  /// max entry of |sum w xi xi^T - |S^{N-1}| / N Id|.
  double second = 0.0;
  /// max over probe normals n of |sum_{xi . n > 0} w xi - V_{N-1} n|.
  double half_first = 0.0;
};

QuadratureError measure_quadrature_error(const DirectionSet& ds);

/// Worst error over the seeds used for the stored table (1..5 for Monte
/// Carlo, the single deterministic set otherwise).
QuadratureError measure_quadrature_rung(int dim, DirectionScheme scheme, std::size_t count);

struct QuadratureCalibration {
  int dim;
  DirectionScheme scheme;
  std::size_t count;
  QuadratureError tolerance;
};

/// Count ladder of the stored table.
std::span<const std::size_t> calibration_rungs();
std::span<const QuadratureCalibration> quadrature_table();

/// Tolerances of the largest stored rung not exceeding `count`.
std::optional<QuadratureError> quadrature_tolerance(int dim, DirectionScheme scheme, std::size_t count);

/// Table value from a measurement: twice the measured error, rounded up to two
/// significant digits, never below 1e-13.
double pinned_tolerance(double measured);

}  // namespace eikinetic
