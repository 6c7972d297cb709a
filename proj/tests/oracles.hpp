#pragma once

#include "dirac/fundamental.hpp"

namespace dirac::oracle {

// Closed form for constant P = c1, Q = c2: M(x) is constant with
// M^2 = (c1 c2 - lambda^2) I, so E(x) = cos(nu x) I + sin(nu x)/nu * M,
// nu = sqrt(lambda^2 - c1 c2).  Even in nu, so the sqrt branch is moot.
Mat2 constant_E(cplx lambda, cplx c1, cplx c2, double x);

// Potential-free case: diag(e^{i lambda x}, e^{-i lambda x}).
Mat2 free_E(cplx lambda, double x);

}  // namespace dirac::oracle
