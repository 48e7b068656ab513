#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/LU>
#include <Eigen/QR>

#include "helpers.hpp"

namespace gen {

eikinetic::Mat Rng::rotation(int dim) {
  eikinetic::Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = normal();
  Eigen::HouseholderQR<eikinetic::Mat> qr(g);
  eikinetic::Mat q = qr.householderQ();
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return q;
}

}  // namespace gen
