#pragma once

#include <utility>
#include <vector>

#include "dirac/boundary.hpp"
#include "dirac/fundamental.hpp"

namespace dirac {

// lambda = frac + 2n with the integer part held exactly, so phases like
// e^{i pi lambda} = e^{i pi frac} lose nothing even at n ~ 1e10.
struct PhasedLambda {
  long long n = 0;
  cplx frac{0.0, 0.0};

  cplx value() const { return frac + 2.0 * double(n); }
  cplx exp_i_pi() const;  // e^{i pi lambda}
};

// omega = k + rest with k exact.
struct SplitFreq {
  long long k = 0;
  cplx rest{0.0, 0.0};

  cplx value() const { return double(k) + rest; }
};

cplx cis_pi(const SplitFreq& w);   // e^{i pi omega}
cplx phi_pi(const SplitFreq& b);   // integral of e^{i b t} over [0, pi]

struct AsymptoticEntries {
  cplx e11, e12, e21, e22;
};

// First-order large-|lambda| model of the fundamental matrix:
//   e11 ~ e^{ i lambda x} (1 - i b1(x)/(2 lambda)),   b1(x) = int_0^x P Q,
//   e22 ~ e^{-i lambda x} (1 + i b1(x)/(2 lambda)),
//   e12 ~ (2 i lambda)^{-1} [e^{-i lambda x}(s1p(x) + st_p(-lambda, x))
//                            - e^{ i lambda x} s1p(0)],
//   e21 ~ (2 i lambda)^{-1} [e^{ i lambda x}(s1m(x) + st_m( lambda, x))
//                            - e^{-i lambda x} s1m(0)],
// with s1p = iP, s1m = iQ, s2p = -iP', s2m = -iQ', and
// st(lambda, x) = int_0^x s2(x - t) e^{-2 i lambda t} dt.  The error is
// O(lambda^-2) for differentiable potentials; the relevant resonances
// (potential mode frequency meeting 2 lambda) are kept exactly.
class AsymptoticModel {
 public:
  explicit AsymptoticModel(const Potential& V);

  // Half-sum / half-difference coordinates: P = p + i r, Q = p - i r.
  cplx p(double x) const;
  cplx r(double x) const;

  // b1 = int_0^x P Q = int_0^x (p^2 + r^2); shared by both diagonal dressings.
  cplx b1(double x) const;
  cplx sigma1_plus(double x) const;   // i P(x)
  cplx sigma1_minus(double x) const;  // i Q(x)
  cplx sigma2_plus(double x) const;   // -i P'(x)
  cplx sigma2_minus(double x) const;  // -i Q'(x)
  cplx sigma_tilde_plus(cplx lambda, double x) const;
  cplx sigma_tilde_minus(cplx lambda, double x) const;

  // 1 + b1(x)/(2 i lambda); multiplies the diagonal phases.
  cplx u_fn(cplx lambda, double x) const;
  // 1 + (sigma1 + sigma_tilde)/(2 i lambda).
  cplx sigma_plus(cplx lambda, double x) const;
  cplx sigma_minus(cplx lambda, double x) const;
  // 2 (1 + sigma_plus(-lambda, 0) sigma_minus(lambda, 0)); tends to 4.
  cplx w(cplx lambda) const;

  AsymptoticEntries entries(double x, cplx lambda) const;
  // x = pi with split-phase arithmetic (exact mode-frequency cancellation).
  AsymptoticEntries entries_end(const PhasedLambda& lambda) const;

  // Endpoint off-diagonal laws: |e12| ~ |P(pi)| / (2 |lambda|) when
  // P(0) = 0, and symmetrically for e21 with Q.
  cplx e12_asym(cplx lambda) const { return entries(pi, lambda).e12; }
  cplx e21_asym(cplx lambda) const { return entries(pi, lambda).e21; }

  const Potential& potential() const { return V_; }

 private:
  Potential V_;
  TrigAffine b1_;        // antiderivative of P Q (trig potentials)
  std::vector<double> b1_grid_;  // cumulative integral (sampled potentials)
  std::vector<cplx> b1_vals_;
};

// Fundamental matrix in the conjugated frame y = T^{-1} E T,
// T = [[1, i], [1, -i]]; E = Y(x) Y(0)^{-1} inverts it.
Mat2 conjugated_frame(const Mat2& E);
Mat2 from_conjugated_frame(const Mat2& y);

// w(lambda)-scaled conjugated-frame entries of the asymptotic model.
Mat2 scaled_conjugated_entries(const AsymptoticModel& model, double x,
                               cplx lambda);

// Recombine scaled conjugated-frame entries into E:
//   E = (1/2) [[y11+y22+i(y21-y12), y11-y22+i(y12+y21)],
//              [y11-y22-i(y12+y21), y11+y22-i(y21-y12)]],  y = yhat / w.
// Inverse of scaled_conjugated_entries up to the model's truncation.
Mat2 y_to_E(const Mat2& yhat, cplx w);

struct OrderFit {
  std::vector<cplx> lambdas;
  std::vector<double> errors;   // sup over the x grid and entries
  double fitted_order = 0.0;    // least-squares slope of -ln err vs ln |lambda|
};

// Error of the asymptotic model against direct integration along the
// phase-locked family lambda = base + 2n.
OrderFit compare_asymptotics(const FundamentalSolver& solver,
                             const AsymptoticModel& model, cplx base,
                             const std::vector<long long>& ns,
                             std::size_t n_x = 65);

struct AsymptoticEigenvalue {
  PhasedLambda lambda;
  int j = 1;            // 1, 2 ordered by (Re, Im)
  cplx sqrtD{0.0, 0.0}; // branch value sqrt(-e12 e21) at the root
  int iterations = 0;
  bool converged = false;
};

struct AsymptoticPairOptions {
  int max_iter = 60;
  double tol_eps = 1e-12;
  double eps_seed = 1e-3;
};

// The two eigenvalues near center0 + 2n for a one-parameter endpoint
// condition [[1,0,a,0],[0,a,0,1]], from the branch equations
//   e11(pi, lambda) + 1/a = -+ sqrt(D)/a,   D = -e12 e21,
// solved by secant iteration in eps = lambda - (center0 + 2n) with the
// asymptotic entries.  No ODE integration is involved, so n can be huge.
std::pair<AsymptoticEigenvalue, AsymptoticEigenvalue> locate_pair_asymptotic(
    const AsymptoticModel& model, const BcClassification& bc, long long n,
    const AsymptoticPairOptions& opt = {});

}  // namespace dirac
