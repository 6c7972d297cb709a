#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dirac/asymptotic.hpp"
#include "dirac/basis.hpp"
#include "dirac/boundary.hpp"
#include "dirac/common.hpp"
#include "dirac/potential.hpp"

// Dense-set constructions on both sides of the basis dichotomy.  The
// positive side bends an arbitrary integrable target into a C^1 potential
// that vanishes at 0 and not at pi, which keeps the coefficient ratio in a
// band.  The negative side corrects the first component by a sparse sum of
// high modes e^{i(2 w0 + 4 a_k) x} / sqrt(a_k) with a_{k+1} = C a_k; at the
// resonant eigenvalues lambda_{a_k,1} the corrected entry decays like
// a_k^{-3/2} while the companion entry only decays like 1/a_k, so the ratio
// escapes every band and the family cannot be a Riesz basis.

namespace dirac {

// C^1 endpoint shaping of an integrable target: g(0) = 0 exactly,
// g(pi) != 0, and ||f - g||_L1 < eps / 2.  The input is mollified, ramped
// to zero over a collar [0, delta], and given a boundary bump at pi when
// the smoothed value there is too small to certify g(pi) != 0.  delta
// halves until the L1 bound holds; the construction cannot fail.
struct SmoothEndpoint {
  SampledFunction g;        // dense cubic-interpolated nodes
  double closeness = 0.0;   // measured ||f - g||_L1
  double delta = 0.0;       // collar width that met the bound
  cplx end_value{0.0, 0.0}; // g(pi)
};
SmoothEndpoint smooth_endpoint_potential(const std::function<cplx(double)>& f,
                                         double eps,
                                         std::size_t n_grid = 2049);

// First target component windowed so the value and derivative vanish at
// both ends; the period-pi Fourier tail of the result decays fast enough
// to truncate.  Keeps ||f1 - S||_L1 < eps / 10.
struct ShapedSource {
  std::function<cplx(double)> f1;  // original target
  std::function<cplx(double)> S;   // windowed version
  double closeness = 0.0;          // measured ||f1 - S||_L1
  double delta = 0.0;              // window width
};
ShapedSource shape_source(const std::function<cplx(double)>& f1, double eps,
                          std::size_t n_grid = 4097);

// Truncated expansion S_N = sum_{m=0..N} alpha_m e^{2imx}
//                         + sum_{m=1..N} beta_m e^{-2imx},
// N minimal with the grid-measured sup |S - S_N| below eps / 10.
struct TruncatedSource {
  std::vector<cplx> alpha;      // m = 0 .. N
  std::vector<cplx> beta;       // m = 1 .. N
  long long N = 0;
  double remainder_sup = 0.0;   // measured sup |S - S_N|
  double end0 = 0.0;            // |S_N(0)|
  double endpi = 0.0;           // |S_N(pi)|
  ShapedSource src;             // upstream provenance

  TrigAffine fn() const;        // S_N as modes
  TrigAffine dfn() const;       // 2i sum m (alpha_m e^{2imx} - beta_m e^{-2imx})
};
// Stock smooth source 0.45 sin^2(x/2): the default input of the assembled
// corrected-potential pipeline.
cplx stock_source(double x);

TruncatedSource fourier_truncate(const ShapedSource& src, double eps,
                                 long long n_cap = 64);

// Certificates attached to a plan.  Every bound is always measured; it is
// enforced only when the gap ratio is the computed one (desk_scale false).
struct PlanCert {
  double recip_sqrt_sum = 0.0;    // sum over correction indices of a_k^{-1/2}
  double recip_sqrt_bound = 0.0;  // eps / (10 pi)
  bool recip_ok = false;
  std::vector<double> gap_scaled; // a_k^{2/3} sum_{j != k} 1 / |a_j - a_k|
  bool gap_ok = false;            // all gap_scaled < 1
  double theta_sup = 0.0;         // grid-measured max |theta|
  bool theta_ok = false;          // theta_sup < recip_sqrt_bound
};

// Sparse correction plan.  a_seq[0] = N seeds the recursion and does not
// contribute a mode; theta sums over a_seq[1..].  A K-element request
// yields a_seq of size K, so the single-resonance edge case is K = 2.
struct LacunaryPlan {
  long long N = 0;
  double epsilon = 0.0;
  cplx w0{0.0, 0.0};              // modulation frequency, matched to the
                                  // endpoint phase center downstream
  long long C = 0;                // gap ratio, exact integer
  bool desk_scale = false;        // C overridden below the computed value
  std::vector<long long> a_seq;   // a_0 = N, a_{k+1} = C a_k
  std::vector<cplx> alpha, beta;  // source coefficients, filled by the build
  PlanCert cert;
};

// Gap ratio floor(e^{2 |w0| pi} + 100) * N^2 * floor(1 / eps^2 + 1).
long long plan_gap_ratio(long long N, double eps, cplx w0);

LacunaryPlan lacunary_plan(long long N, double eps, cplx w0, int K,
                           std::optional<long long> C_override = {});

// theta(x) = e^{2 i w0 x} sum_k e^{4 i a_k x} / sqrt(a_k), modes exact.
cplx theta(double x, const LacunaryPlan& plan);
TrigAffine theta_modes(const LacunaryPlan& plan);

// The corrected component and its companion.  F = S_N + int_0^x theta,
// F0 the linear interpolant of F at the ends, P = F - F0, so P(0) and
// P(pi) cancel exactly; the ramp lives in P_tilde.c1.
struct BuiltPotential {
  TrigAffine P_tilde;
  TrigAffine Q_hat;               // smooth companion, Q_hat(pi) != 0
  LacunaryPlan plan;              // completed with alpha / beta
  TrigAffine S_N;
  TrigAffine Theta;               // int_0^x theta, closed form
  ShapedSource src;               // f1 and S provenance
  cplx F_at_0{0.0, 0.0};
  cplx F_at_pi{0.0, 0.0};
  cplx F0_slope{0.0, 0.0};        // (F(pi) - F(0)) / pi = -P_tilde.c1
  double closeness = 0.0;         // ||f1 - P_tilde||_L1
  double closeness_S = 0.0;       // ||S - P_tilde||_L1
  double end0_abs = 0.0;          // |P_tilde(0)|, roundoff scale
  double endpi_abs = 0.0;         // |P_tilde(pi)|, roundoff scale

  cplx F(double x) const;
  cplx F0(double x) const;

  // Assembled system potential.  The corrected component sits in the slot
  // that drives E12 in this integration frame -- the report columns label
  // that entry with the transposed-coupling name e21 -- and the companion
  // drives E21 with |E21| ~ |Q_hat(pi)| / (2 |lambda|).
  Potential V() const;
};

// 0.6 sin^2(x/2): vanishes at 0, value 0.6 at pi, three modes.
TrigAffine companion_default();

BuiltPotential build_p_tilde(const TruncatedSource& SN,
                             const LacunaryPlan& plan,
                             const TrigAffine& q_hat = companion_default());

// Resonant-index integrals at a located eigenvalue lambda = frac + 2 a_k:
//   I0 = int_0^pi theta(t) e^{-2 i lambda t} dt = I1 + I2,
// I1 the k-th (resonant) term, I2 the off-resonant rest, evaluated with
// the integer frequency parts cancelled exactly.
struct IntegralEstimates {
  cplx I0{0.0, 0.0}, I1{0.0, 0.0}, I2{0.0, 0.0};
  cplx eps_used{0.0, 0.0};        // lambda - w0 - 2 a_k
  double i1_scaled = 0.0;         // |I1| sqrt(a_k), band (3, 4)
  bool i1_band_ok = false;
  double i2_scaled = 0.0;         // |I2| a_k^{2/3}
  cplx sn_integral{0.0, 0.0};     // int_0^pi S_N'(t) e^{-2 i lambda t} dt
  double sn_scaled = 0.0;         // |sn_integral| a_k^{2/3}
};
IntegralEstimates integral_estimates(const LacunaryPlan& plan, std::size_t k,
                                     const PhasedLambda& lambda);

struct DivergencePoint {
  std::size_t k = 0;
  long long a = 0;
  PhasedLambda lambda1;           // j = 1 member of the index-a pair
  bool from_ode = false;          // polished against the integrated system
  double entry_corrected = 0.0;   // |E12|, driven by the corrected component
  double entry_companion = 0.0;   // |E21|, driven by the companion
  double corrected_scaled = 0.0;  // entry_corrected * a^{3/2}
  double ratio = 0.0;             // entry_companion / entry_corrected
  double i1_scaled = 0.0;
  double i2_scaled = 0.0;
  double sn_scaled = 0.0;
  double f0_scaled = 0.0;         // |int F0' e^{-2 i lambda t} dt| * a
};

struct DivergenceOptions {
  double ode_freq_cap = 1500.0;   // polish via integration below this
  std::size_t n_theta_grid = 4096;
  AsymptoticPairOptions pair;
};

struct DivergenceReport {
  std::vector<DivergencePoint> points;
  double slope_corrected = 0.0;   // log-log fit, expected -3/2
  double slope_ratio = 0.0;       // log-log fit, expected +1/2
  double c7 = 0.0;                // max f0_scaled over the points
  bool f0_ok = false;             // c7 finite and the bound nonvacuous
  BasisVerdict verdict;           // coefficient-ratio escape, not a basis
  bool conclusive = false;        // >= 3 points and strictly growing ratio
};
DivergenceReport verify_divergence(const BuiltPotential& built,
                                   const LacunaryPlan& plan,
                                   const std::vector<std::size_t>& k_range,
                                   const DivergenceOptions& opt = {});

}  // namespace dirac
