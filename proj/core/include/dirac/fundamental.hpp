#pragma once

#include <Eigen/Core>
#include <vector>

#include "dirac/common.hpp"
#include "dirac/potential.hpp"

namespace dirac {

using Mat2 = Eigen::Matrix2cd;

struct SolveOptions {
  // Target sup-norm error of E over [0, pi], relative to max ||E||.
  double tol = 1e-10;
  // Macro step caps: H <= h_max, H <= c_lambda/(1+|lambda|),
  // H <= c_osc/(1+potential max frequency).
  double h_max = 0.35;
  double c_lambda = 1.2;
  double c_osc = 3.0;
  // Global halvings allowed when the error estimate exceeds tol.
  int max_refine = 5;
};

// E(x, lambda): the 2x2 solution of E' = M(x) E, E(0) = I, with
// M = [[i lambda, -i P], [i Q, -i lambda]].  trace M = 0, so det E == 1.
struct FundamentalMatrix {
  cplx lambda{0.0, 0.0};
  std::vector<double> x;    // uniform grid, x.front() = 0, x.back() = pi
  std::vector<Mat2> E;      // E[i] = E(x[i])
  std::vector<Mat2> Elam;   // dE/dlambda, filled only by solve_with_dlambda
  double est_error = 0.0;   // accumulated per-step extrapolation estimate
  std::size_t n_macro = 0;
  int refinements = 0;

  const Mat2& end() const { return E.back(); }
  const Mat2& end_dlambda() const { return Elam.back(); }
};

// Fixed-order Gragg-Bulirsch-Stoer integrator: modified midpoint at 2, 4,
// 6, 8 substeps per macro step, extrapolated in h^2 to order 8.  All nodes
// of all four levels live on the H/24 lattice, so the potential is sampled
// once per macro step.  Instances are immutable after construction and safe
// to share across threads.
class FundamentalSolver {
 public:
  explicit FundamentalSolver(Potential V, SolveOptions opt = {});

  // E at n_out uniform output points (n_out >= 2 gets endpoints only...
  // n_out = 2 records x = 0 and x = pi).  Output nodes align with macro
  // boundaries, so no interpolation is involved.
  FundamentalMatrix solve(cplx lambda, std::size_t n_out = 2) const;

  // Also integrates the variational system d/dx Elam = M Elam + dM/dlambda E
  // with dM/dlambda = diag(i, -i).
  FundamentalMatrix solve_with_dlambda(cplx lambda, std::size_t n_out = 2) const;

  const Potential& potential() const { return V_; }
  const SolveOptions& options() const { return opt_; }

 private:
  template <int NC>
  FundamentalMatrix run(cplx lambda, std::size_t n_out) const;

  Potential V_;
  SolveOptions opt_;
};

}  // namespace dirac
