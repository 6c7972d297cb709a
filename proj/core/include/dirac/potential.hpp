#pragma once

#include <string>
#include <vector>

#include "dirac/common.hpp"

namespace dirac {

// One term coeff * exp(i (k + shift) x).  k carries the large integer part
// exactly in int64; shift holds any small (possibly complex) remainder, so
// frequencies near 1e10 keep full relative precision.
struct TrigMode {
  long long k = 0;
  cplx shift{0.0, 0.0};
  cplx coeff{0.0, 0.0};
};

// c0 + c1*x + sum of modes.  The affine slot exists so antiderivatives of
// constants stay in the class; most potentials keep c1 = 0, but a corrected
// potential stores its endpoint-fixing ramp there.
struct TrigAffine {
  std::vector<TrigMode> modes;
  cplx c0{0.0, 0.0};
  cplx c1{0.0, 0.0};

  cplx eval(double x) const;
  cplx deriv(double x) const;

  // Integral from 0 to x as a TrigAffine in x.  Requires c1 == 0.
  TrigAffine antiderivative() const;

  // Combines duplicate (k, shift) modes and drops |coeff| <= drop_tol.
  void merge_modes(double drop_tol = 0.0);

  // max |k + shift| over modes; 0 when there are none.
  double max_frequency() const;

  bool is_zero() const;
};

// Pointwise product.  Requires c1 == 0 on both factors.
TrigAffine trig_product(const TrigAffine& a, const TrigAffine& b);

// Values on a uniform grid over [0, pi].  cubic is a Hermite interpolant
// with finite-difference tangents (C^1); linear is C^0 only.
struct SampledFunction {
  enum class Interp { cubic, linear };

  std::vector<double> x;
  std::vector<cplx> v;
  Interp interp = Interp::cubic;

  cplx eval(double t) const;
  cplx deriv(double t) const;
};

enum class Smoothness { smooth, c1, c0 };

// V = [[0, P],[Q, 0]] on [0, pi].  Trig-polynomial potentials keep exact
// mode lists (the asymptotic machinery integrates them in closed form);
// sampled potentials interpolate.
struct Potential {
  enum class Kind { trig, samples };

  Kind kind = Kind::trig;
  std::string name = "zero";
  Smoothness smoothness = Smoothness::smooth;

  TrigAffine P, Q;               // kind == trig
  SampledFunction Ps, Qs;        // kind == samples

  cplx p(double x) const;
  cplx q(double x) const;
  cplx dp(double x) const;
  cplx dq(double x) const;

  // Step-control hint: largest oscillation rate present in P or Q.
  double max_frequency() const;

  bool is_zero() const;
};

Potential zero_potential();
Potential constant_potential(cplx c1, cplx c2);

// P = p_pi sin^2(x/2), Q = q_pi sin^2(x/2) + q2 sin^2(x).  Both components
// vanish at 0; P(pi) = p_pi, Q(pi) = q_pi.
Potential endpoint_smooth_potential(double p_pi = 0.6, double q_pi = 0.45,
                                    double q2 = 0.3);

// Modes exp(2 i m x), m = -M..M; coefficient vectors have odd length 2M+1
// ordered by m.
Potential fourier_potential(const std::vector<cplx>& p_coeffs,
                            const std::vector<cplx>& q_coeffs);

Potential sampled_potential(SampledFunction P, SampledFunction Q);

}  // namespace dirac
