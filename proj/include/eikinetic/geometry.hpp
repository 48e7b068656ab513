#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eikinetic/grid.hpp"
#include "eikinetic/kinetic.hpp"

namespace eikinetic {

struct Line {
  Line(Vec point, Vec direction);
  Vec point;
  Vec direction;
};

struct CoplanarResult {
  bool coplanar = false;
  /// Third singular value of the rows {d1, d2, p2 - p1}.
  double defect = 0.0;
};

CoplanarResult coplanar(const Line& l1, const Line& l2, double tol);

enum class LineFamilyTag { Planar, Parallel, Concurrent, Incoherent };
std::string_view to_string(LineFamilyTag tag);

struct LineFamilyClass {
  LineFamilyTag tag = LineFamilyTag::Incoherent;
  /// Least-squares concurrency point (set for Concurrent, and as a diagnostic
  /// whenever the normal equations were solved).
  std::optional<Vec> point;
  /// Worst pairwise coplanarity defect.
  double residual = 0.0;
  /// Largest distance from `point` to a line.
  double fit_residual = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

LineFamilyClass classify_line_family(const std::vector<Line>& lines, double tol);

/// Rows of "px,py[,pz[,pw]],dx,dy[,...]"; blank lines and lines starting with
/// '#' are skipped. Directions are normalised.
std::vector<Line> read_lines_csv(std::istream& in);

struct FieldClass {
  enum class Tag { Constant, Vortex, Other } tag = Tag::Other;
  Vec direction;  // Constant
  Vec center;     // Vortex
  int sign = 0;   // Vortex
  LineFamilyClass family;
  std::size_t samples = 0;
  std::string diagnostics;
};
std::string_view to_string(FieldClass::Tag tag);

FieldClass classify_field(const VectorField& u, std::size_t sample_count, std::uint64_t seed, double tol);

struct ShapeOperator {
  Vec normal;
  /// Orthonormal tangent basis (columns of the frame used for `matrix`).
  std::vector<Vec> tangents;
  /// Symmetrised (N-1) x (N-1) matrix of P (grad n) P in `tangents`.
  Mat matrix;
  /// ||S - S^T|| before symmetrisation.
  double asymmetry = 0.0;
  Vec eigenvalues;
  /// Mean eigenvalue lambda and the deviation ||S - lambda Id||_2.
  double lambda = 0.0;
  double deviation = 0.0;
};

/// Shape operator of the level sets of psi. Gradients and unit normals are
/// precomputed once; evaluations interpolate grad n at arbitrary points.
class ShapeOperatorContext {
 public:
  explicit ShapeOperatorContext(const ScalarField& psi, double floor = 1e-6);
  ShapeOperator at(const Vec& x) const;
  const VectorField& gradient_field() const { return grad_; }
  const ScalarField& psi() const { return psi_; }

 private:
  ScalarField psi_;
  double floor_;
  VectorField grad_;
  VectorField normal_;
  /// One field per axis k holding d_k n.
  std::vector<VectorField> dnormal_;
};

ShapeOperator shape_operator(const ScalarField& psi, const Vec& x, double floor = 1e-6);

struct UmbilicSample {
  Vec point;
  double lambda = 0.0;
  double deviation = 0.0;
  /// Eigenvalue spread max - min.
  double spread = 0.0;
  std::optional<Vec> center;
};

struct UmbilicReport {
  double level = 0.0;
  std::vector<UmbilicSample> samples;
  double max_deviation = 0.0;
  double max_spread = 0.0;
  double tolerance = 0.0;
  bool umbilical = false;
  /// Set when every |lambda| exceeds the flatness threshold.
  std::optional<Vec> center_estimate;
  double center_spread = 0.0;
  bool planar = false;
  Verdict verdict = Verdict::Fail;
};

struct UmbilicOptions {
  std::size_t sample_count = 64;
  double tolerance = 0.05;
  std::uint64_t seed = 0;
  /// |lambda| below this is treated as the hyperplane branch.
  double flat_lambda = 1e-3;
  /// Samples closer than this to the box faces (in cells) are skipped.
  double margin_cells = 3.0;
};

UmbilicReport umbilic_check(const ScalarField& psi, double level, const UmbilicOptions& options = {});

struct CurvatureSample {
  Vec point;
  double curvature = 0.0;
};

/// Signed curvature of the 2D level curve {psi = level} at points found along
/// grid edges: kappa = div(grad psi / |grad psi|).
std::vector<CurvatureSample> level_curvature_2d(const ScalarField& psi, double level, double margin_cells = 3.0);

struct DegreeResult {
  int degree = 0;
  double raw = 0.0;
  double integer_distance = 0.0;
};

/// Winding number (2D) or covering degree of u restricted to a sphere (3D).
DegreeResult jacobian_degree(const VectorField& u, const Vec& center, double radius);

}  // namespace eikinetic
