// Regenerates src/quadrature_table.inc: eikinetic_calibrate > src/quadrature_table.inc
#include <cstdio>

#include "eikinetic/calibration.hpp"

using namespace eikinetic;

int main() {
  struct Family {
    int dim;
    DirectionScheme scheme;
    const char* name;
  };
  const Family families[] = {{2, DirectionScheme::UniformAngle, "UniformAngle"},
                             {3, DirectionScheme::Fibonacci, "Fibonacci"},
                             {2, DirectionScheme::MonteCarlo, "MonteCarlo"},
                             {3, DirectionScheme::MonteCarlo, "MonteCarlo"},
                             {4, DirectionScheme::MonteCarlo, "MonteCarlo"}};
  std::printf("// Generated by eikinetic_calibrate: 2x the measured error, 2 significant digits.\n");
  std::printf("// dim, scheme, count, {mass, first, second, half_first}\n");
  for (const auto& f : families) {
    for (std::size_t count : calibration_rungs()) {
      const auto e = measure_quadrature_rung(f.dim, f.scheme, count);
      std::printf("{%d, DirectionScheme::%s, %zu, {%.2e, %.2e, %.2e, %.2e}},\n", f.dim, f.name, count,
                  pinned_tolerance(e.mass), pinned_tolerance(e.first), pinned_tolerance(e.second),
                  pinned_tolerance(e.half_first));
    }
  }
  return 0;
}
