#pragma once

#include <doctest.h>

#include <cstdint>
#include <random>

#include "eikinetic/grid.hpp"

// Asserts that `expr` throws eikinetic::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected)                         \
  do {                                                           \
    bool thrown_ = false;                                        \
    try {                                                        \
      (void)(expr);                                              \
    } catch (const eikinetic::Error& e_) {                       \
      thrown_ = true;                                            \
      CHECK_MESSAGE(e_.kind() == (expected), e_.what());         \
    }                                                            \
    CHECK_MESSAGE(thrown_, "expected an eikinetic::Error");      \
  } while (0)

namespace gen {

// Minimal seeded generators for property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>()(engine_); }

  eikinetic::Vec point(int dim, double lo, double hi) {
    eikinetic::Vec p(dim);
    for (int k = 0; k < dim; ++k) p[k] = uniform(lo, hi);
    return p;
  }

  eikinetic::Vec unit(int dim) {
    eikinetic::Vec p(dim);
    do {
      for (int k = 0; k < dim; ++k) p[k] = normal();
    } while (p.norm() < 1e-3);
    return p / p.norm();
  }

  // Random rotation via QR of a Gaussian matrix, determinant +1.
  eikinetic::Mat rotation(int dim);

 private:
  std::mt19937_64 engine_;
};

}  // namespace gen
