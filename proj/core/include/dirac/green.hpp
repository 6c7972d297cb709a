#pragma once

#include <array>

#include "dirac/spectrum.hpp"

namespace dirac {

using Vec2 = Eigen::Vector2cd;

// The resolvent kernel in matrix form.  With W = C + D E(pi) and
// J = diag(1, -1),
//   H(t, x) = E(x) R(lambda) E(t)^{-1} J,   R = adj(W) C,
//   G(t, x) = i H / Delta - i [t > x] E(x) E(t)^{-1} J,
// and u(x) = int_0^pi G(t, x) f(t) dt solves (L - lambda) u = f under the
// boundary conditions.  R depends on the conditions only through the minors:
//   R = [[A12 + A13 e12 + A14 e22,        A23 e12 + A24 e22],
//        [     -A13 e11 - A14 e21,  A12 - A23 e11 - A24 e21]]  (entries at pi),
// so det R = Delta * A12 and tr R = Delta + A12 - A34.
Mat2 green_R(const BoundaryMinors& m, const Mat2& E_pi);

// Unperturbed kernel (V = 0), closed form:
//   h11 =  e^{i lambda (x - t)} (A12 + A14 e^{-i pi lambda})
//   h12 = -A24 e^{i lambda (x - pi + t)}
//   h21 = -A13 e^{i lambda (pi - x - t)}
//   h22 =  e^{i lambda (t - x)} (-A12 + A23 e^{i pi lambda})
// For periodic-type conditions (A13 = A24 = 0) all four vanish identically
// at every unperturbed eigenvalue.
Mat2 h0_kernel(const BoundaryMinors& m, cplx lambda, double t, double x);

// H and G tabulated on a shared uniform grid: one ODE solve per lambda.
class GreenKernel {
 public:
  // n_grid odd >= 3 (the grid doubles as a Simpson rule).
  GreenKernel(const FundamentalSolver& solver, const BcClassification& bc,
              cplx lambda, std::size_t n_grid = 129);

  cplx lambda() const { return lambda_; }
  cplx delta() const { return delta_; }
  const std::vector<double>& grid() const { return xs_; }
  const Mat2& E(std::size_t i) const { return E_[i]; }

  Mat2 H(std::size_t it, std::size_t ix) const;
  // The diagonal t == x carries no jump term (a null set; the kernel is
  // only used under integrals).
  Mat2 G(std::size_t it, std::size_t ix) const;

  // L2 norms of the four entries of H over the square [0, pi]^2,
  // ordered h11, h12, h21, h22.
  std::array<double, 4> hjk_norms() const;

  // Simpson quadrature of G(., x_ix) against f; the resolvent applied to f
  // when f is tabulated on grid().
  Vec2 apply(const std::vector<Vec2>& f, std::size_t ix) const;

 private:
  cplx lambda_, delta_;
  std::vector<double> xs_;
  std::vector<double> w_;        // Simpson weights
  std::vector<Mat2> E_;
  std::vector<Mat2> left_;       // E(x_i) R
  std::vector<Mat2> right_;      // E(t_l)^{-1} J
};

// Spectral projection data at a simple eigenvalue: the residue of the
// resolvent is the rank-one kernel i H(t, x, lambda_n) / Delta'(lambda_n)
// = y(x) z(t)^*.  The weighted SVD of the tabulated kernel splits it;
// sigma2/sigma1 measures how far it is from rank one.
struct ResiduePair {
  cplx lambda{0.0, 0.0};
  cplx ddelta{0.0, 0.0};
  double sigma1 = 0.0;         // = ||y|| ||z||
  double sigma2 = 0.0;
  double frobenius = 0.0;      // Hilbert-Schmidt norm of the residue kernel
  std::vector<double> x;
  std::vector<Vec2> y, z;      // samples on x; y z^* reproduces the kernel
};

ResiduePair residue_pair(const FundamentalSolver& solver,
                         const BcClassification& bc, cplx lambda_n,
                         std::size_t n_grid = 129);

}  // namespace dirac
