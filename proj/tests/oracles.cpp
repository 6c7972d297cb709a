#include "oracles.hpp"

#include <cmath>

namespace dirac::oracle {

Mat2 constant_E(cplx lambda, cplx c1, cplx c2, double x) {
  const cplx nu2 = lambda * lambda - c1 * c2;
  const cplx nu = std::sqrt(nu2);
  const cplx z = nu * x;
  cplx sinc;  // sin(nu x)/nu
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    sinc = x * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
  } else {
    sinc = std::sin(z) / nu;
  }
  Mat2 M;
  M << cplx(0.0, 1.0) * lambda, cplx(0.0, -1.0) * c1,
       cplx(0.0, 1.0) * c2, cplx(0.0, -1.0) * lambda;
  return std::cos(z) * Mat2::Identity() + sinc * M;
}

Mat2 free_E(cplx lambda, double x) {
  Mat2 E = Mat2::Zero();
  E(0, 0) = std::exp(cplx(0.0, 1.0) * lambda * x);
  E(1, 1) = std::exp(cplx(0.0, -1.0) * lambda * x);
  return E;
}

}  // namespace dirac::oracle
