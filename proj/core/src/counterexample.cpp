#include "dirac/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dirac/fundamental.hpp"
#include "dirac/spectrum.hpp"

namespace dirac {

namespace {

double s3(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * (3.0 - 2.0 * u);
}

// Discrete mollification with a quartic kernel (1 - u^2)^2 of half-width
// delta; the argument is clamped to [0, pi], which extends f by its
// boundary values and keeps constants fixed.
std::vector<cplx> mollify_values(const std::function<cplx(double)>& f,
                                 const std::vector<double>& xs,
                                 double delta) {
  const int M = 64;
  std::vector<double> w(M + 1);
  double tot = 0.0;
  for (int i = 0; i <= M; ++i) {
    const double u = -1.0 + 2.0 * double(i) / M;
    double wi = (1.0 - u * u) * (1.0 - u * u);
    if (i == 0 || i == M) wi *= 0.5;
    w[i] = wi;
    tot += wi;
  }
  for (double& wi : w) wi /= tot;
  std::vector<cplx> out(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    cplx s = 0.0;
    for (int i = 0; i <= M; ++i) {
      const double t = xs[j] + delta * (-1.0 + 2.0 * double(i) / M);
      s += w[i] * f(std::clamp(t, 0.0, pi));
    }
    out[j] = s;
  }
  return out;
}

double l1_distance(const std::function<cplx(double)>& f,
                   const std::function<cplx(double)>& g, std::size_t n) {
  n |= 1;
  if (n < 3) n = 3;
  const std::vector<double> xs = linspace(0.0, pi, n);
  const std::vector<double> w = simpson_weights(n, pi / double(n - 1));
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::abs(f(xs[i]) - g(xs[i]));
  return s;
}

std::string chain_failure(const char* what, double value, double bound) {
  std::ostringstream os;
  os << "construction bound failed: " << what << " = " << value
     << " is not below " << bound;
  return os.str();
}

// Least squares slope of ln(y) against ln(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = double(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = std::log(x[i]);
    const double v = std::log(std::max(y[i], 1e-300));
    sx += u;
    sy += v;
    sxx += u * u;
    sxy += u * v;
  }
  const double den = m * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (m * sxy - sx * sy) / den;
}

}  // namespace

SmoothEndpoint smooth_endpoint_potential(const std::function<cplx(double)>& f,
                                         double eps, std::size_t n_grid) {
  if (eps <= 0.0)
    throw PreconditionError("smooth_endpoint_potential: eps must be positive");
  n_grid |= 1;
  if (n_grid < 65) n_grid = 65;
  const std::vector<double> xs = linspace(0.0, pi, n_grid);

  SmoothEndpoint best;
  double best_close = -1.0;
  double delta = pi / 8.0;
  for (int it = 0; it < 22; ++it, delta *= 0.5) {
    std::vector<cplx> vals = mollify_values(f, xs, 0.5 * delta);
    for (std::size_t j = 0; j < n_grid; ++j) vals[j] *= s3(xs[j] / delta);
    const cplx vpi = vals.back();
    if (std::abs(vpi) < eps / 8.0) {
      // Too flat at the right end to certify a nonzero value; lift it by a
      // one-sided bump of height eps/8 in the phase already present.
      const cplx amp =
          (eps / 8.0) * (vpi == 0.0 ? cplx(1.0, 0.0) : vpi / std::abs(vpi));
      for (std::size_t j = 0; j < n_grid; ++j)
        vals[j] += amp * s3((xs[j] - (pi - delta)) / delta);
    }
    SmoothEndpoint cand;
    cand.g = SampledFunction{xs, vals, SampledFunction::Interp::cubic};
    cand.delta = delta;
    cand.end_value = vals.back();
    cand.closeness =
        l1_distance(f, [&cand](double x) { return cand.g.eval(x); }, n_grid);
    if (best_close < 0.0 || cand.closeness < best_close) {
      best_close = cand.closeness;
      best = cand;
    }
    if (cand.closeness < eps / 2.0) return cand;
  }
  return best;
}

ShapedSource shape_source(const std::function<cplx(double)>& f1, double eps,
                          std::size_t n_grid) {
  if (eps <= 0.0) throw PreconditionError("shape_source: eps must be positive");
  n_grid |= 1;
  if (n_grid < 129) n_grid = 129;
  const std::vector<double> xs = linspace(0.0, pi, n_grid);

  ShapedSource best;
  double best_close = -1.0;
  double delta = pi / 8.0;
  for (int it = 0; it < 22; ++it, delta *= 0.5) {
    std::vector<cplx> vals = mollify_values(f1, xs, 0.25 * delta);
    SampledFunction ms{xs, vals, SampledFunction::Interp::cubic};
    const double d = delta;
    std::function<cplx(double)> S = [ms = std::move(ms), d](double x) {
      return s3(x / d) * s3((pi - x) / d) * ms.eval(x);
    };
    ShapedSource cand;
    cand.f1 = f1;
    cand.S = std::move(S);
    cand.delta = d;
    cand.closeness = l1_distance(f1, cand.S, n_grid);
    if (best_close < 0.0 || cand.closeness < best_close) {
      best_close = cand.closeness;
      best = cand;
    }
    if (cand.closeness < eps / 10.0) return cand;
  }
  return best;
}

TrigAffine TruncatedSource::fn() const {
  TrigAffine f;
  if (!alpha.empty()) f.c0 = alpha[0];
  for (long long m = 1; m <= N; ++m) {
    f.modes.push_back({2 * m, 0.0, alpha[std::size_t(m)]});
    f.modes.push_back({-2 * m, 0.0, beta[std::size_t(m - 1)]});
  }
  return f;
}

TrigAffine TruncatedSource::dfn() const {
  TrigAffine f;
  for (long long m = 1; m <= N; ++m) {
    const cplx im2 = cplx(0.0, 2.0 * double(m));
    f.modes.push_back({2 * m, 0.0, im2 * alpha[std::size_t(m)]});
    f.modes.push_back({-2 * m, 0.0, -im2 * beta[std::size_t(m - 1)]});
  }
  return f;
}

cplx stock_source(double x) {
  const double s = std::sin(0.5 * x);
  return 0.45 * s * s;
}

TruncatedSource fourier_truncate(const ShapedSource& src, double eps,
                                 long long n_cap) {
  if (eps <= 0.0)
    throw PreconditionError("fourier_truncate: eps must be positive");
  if (n_cap < 0) throw PreconditionError("fourier_truncate: cap must be >= 0");
  const std::size_t M = 4096;
  std::vector<cplx> Sv(M);
  for (std::size_t j = 0; j < M; ++j) Sv[j] = src.S(pi * double(j) / double(M));

  // Coefficient of e^{2imx} over the period-pi expansion; the shaped source
  // vanishes with its derivative at both ends, so the periodic trapezoid
  // sum converges fast.
  auto coeff = [&](long long m) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      const double ph = -2.0 * double(m) * pi * double(j) / double(M);
      s += Sv[j] * std::polar(1.0, ph);
    }
    return s / double(M);
  };

  TruncatedSource out;
  out.src = src;
  std::vector<cplx> res = Sv;
  const cplx c0 = coeff(0);
  for (std::size_t j = 0; j < M; ++j) res[j] -= c0;
  out.alpha.push_back(c0);
  auto sup = [&res]() {
    double s = 0.0;
    for (const cplx& r : res) s = std::max(s, std::abs(r));
    return s;
  };
  double rem = sup();
  long long N = 0;
  while (rem >= eps / 10.0) {
    if (N == n_cap)
      throw NumericalError(
          "fourier_truncate: remainder still " + std::to_string(rem) +
          " at the mode cap; the source is not smooth enough");
    ++N;
    const cplx cp = coeff(N), cm = coeff(-N);
    for (std::size_t j = 0; j < M; ++j) {
      const double ph = 2.0 * double(N) * pi * double(j) / double(M);
      res[j] -= cp * std::polar(1.0, ph) + cm * std::polar(1.0, -ph);
    }
    out.alpha.push_back(cp);
    out.beta.push_back(cm);
    rem = sup();
  }
  out.N = N;
  out.remainder_sup = rem;
  const TrigAffine f = out.fn();
  out.end0 = std::abs(f.eval(0.0));
  out.endpi = std::abs(f.eval(pi));
  if (out.end0 >= eps / 10.0)
    throw NumericalError(chain_failure("|S_N(0)|", out.end0, eps / 10.0));
  if (out.endpi >= eps / 10.0)
    throw NumericalError(chain_failure("|S_N(pi)|", out.endpi, eps / 10.0));
  return out;
}

long long plan_gap_ratio(long long N, double eps, cplx w0) {
  const double e2 = std::floor(std::exp(2.0 * std::abs(w0) * pi) + 100.0);
  const double inv = std::floor(1.0 / (eps * eps) + 1.0);
  const __int128 c =
      __int128(e2) * __int128(N) * __int128(N) * __int128(inv);
  if (e2 > 9.0e18 || inv > 9.0e18 ||
      c > __int128(std::numeric_limits<long long>::max()))
    throw PreconditionError("plan_gap_ratio: ratio overflows the index range");
  return (long long)c;
}

LacunaryPlan lacunary_plan(long long N, double eps, cplx w0, int K,
                           std::optional<long long> C_override) {
  if (N < 1) throw PreconditionError("lacunary_plan: N must be >= 1");
  if (!(eps > 0.0 && eps < 1.0))
    throw PreconditionError("lacunary_plan: eps must lie in (0, 1)");
  if (K < 1) throw PreconditionError("lacunary_plan: K must be >= 1");

  LacunaryPlan plan;
  plan.N = N;
  plan.epsilon = eps;
  plan.w0 = w0;
  const long long C_full = plan_gap_ratio(N, eps, w0);
  plan.C = C_override.value_or(C_full);
  if (plan.C < 2) throw PreconditionError("lacunary_plan: ratio must be >= 2");
  plan.desk_scale = C_override.has_value() && *C_override < C_full;

  plan.a_seq.push_back(N);
  for (int k = 1; k < K; ++k) {
    const __int128 next = __int128(plan.a_seq.back()) * plan.C;
    if (next > __int128(std::numeric_limits<long long>::max())) {
      std::ostringstream os;
      os << "lacunary_plan: a_" << k << " overflows the 64-bit index range; "
         << "reduce K to " << k;
      throw PreconditionError(os.str());
    }
    plan.a_seq.push_back((long long)next);
  }

  PlanCert& cert = plan.cert;
  cert.recip_sqrt_bound = eps / (10.0 * pi);
  for (std::size_t k = 1; k < plan.a_seq.size(); ++k)
    cert.recip_sqrt_sum += 1.0 / std::sqrt(double(plan.a_seq[k]));
  cert.recip_ok = cert.recip_sqrt_sum < cert.recip_sqrt_bound;

  cert.gap_ok = true;
  for (std::size_t k = 1; k < plan.a_seq.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j < plan.a_seq.size(); ++j) {
      if (j == k) continue;
      s += 1.0 / std::abs(double(plan.a_seq[j] - plan.a_seq[k]));
    }
    const double scaled = s * std::pow(double(plan.a_seq[k]), 2.0 / 3.0);
    cert.gap_scaled.push_back(scaled);
    if (!(scaled < 1.0)) cert.gap_ok = false;
  }

  const std::size_t n_theta = 4097;
  for (std::size_t i = 0; i < n_theta; ++i)
    cert.theta_sup = std::max(
        cert.theta_sup, std::abs(theta(pi * double(i) / double(n_theta - 1), plan)));
  cert.theta_ok = cert.theta_sup < cert.recip_sqrt_bound;

  if (!plan.desk_scale) {
    if (!cert.recip_ok)
      throw NumericalError(chain_failure("sum a_k^{-1/2}", cert.recip_sqrt_sum,
                                         cert.recip_sqrt_bound));
    if (!cert.gap_ok)
      throw NumericalError(
          "lacunary_plan: gap-sum certificate exceeded its constant");
    if (!cert.theta_ok)
      throw NumericalError(chain_failure("max |theta|", cert.theta_sup,
                                         cert.recip_sqrt_bound));
  }
  return plan;
}

TrigAffine theta_modes(const LacunaryPlan& plan) {
  TrigAffine f;
  for (std::size_t k = 1; k < plan.a_seq.size(); ++k)
    f.modes.push_back({4 * plan.a_seq[k], 2.0 * plan.w0,
                       cplx(1.0 / std::sqrt(double(plan.a_seq[k])), 0.0)});
  return f;
}

cplx theta(double x, const LacunaryPlan& plan) {
  return theta_modes(plan).eval(x);
}

TrigAffine companion_default() {
  TrigAffine f;
  f.c0 = 0.3;
  f.modes.push_back({1, 0.0, cplx(-0.15, 0.0)});
  f.modes.push_back({-1, 0.0, cplx(-0.15, 0.0)});
  return f;
}

cplx BuiltPotential::F(double x) const { return S_N.eval(x) + Theta.eval(x); }

cplx BuiltPotential::F0(double x) const { return F0_slope * x + F_at_0; }

Potential BuiltPotential::V() const {
  Potential V;
  V.kind = Potential::Kind::trig;
  V.name = "lacunary_corrected";
  V.P = P_tilde;
  V.Q = Q_hat;
  return V;
}

BuiltPotential build_p_tilde(const TruncatedSource& SN,
                             const LacunaryPlan& plan,
                             const TrigAffine& q_hat) {
  for (std::size_t k = 1; k < plan.a_seq.size(); ++k)
    if (std::abs(4.0 * double(plan.a_seq[k]) + 2.0 * plan.w0) < 1e-9)
      throw PreconditionError(
          "build_p_tilde: a correction frequency vanishes; the closed-form "
          "antiderivative degenerates");

  BuiltPotential b;
  b.plan = plan;
  b.plan.alpha = SN.alpha;
  b.plan.beta = SN.beta;
  b.S_N = SN.fn();
  b.Theta = theta_modes(plan).antiderivative();
  b.src = SN.src;
  b.Q_hat = q_hat;

  b.F_at_0 = b.S_N.eval(0.0) + b.Theta.eval(0.0);
  b.F_at_pi = b.S_N.eval(pi) + b.Theta.eval(pi);
  b.F0_slope = (b.F_at_pi - b.F_at_0) / pi;

  b.P_tilde = b.S_N;
  for (const TrigMode& m : b.Theta.modes) b.P_tilde.modes.push_back(m);
  b.P_tilde.c0 += b.Theta.c0 - b.F_at_0;
  b.P_tilde.c1 = -b.F0_slope;
  b.P_tilde.merge_modes();

  b.end0_abs = std::abs(b.P_tilde.eval(0.0));
  b.endpi_abs = std::abs(b.P_tilde.eval(pi));

  const double eps = plan.epsilon;
  const std::size_t n_l1 = 8193;
  auto P = [&b](double x) { return b.P_tilde.eval(x); };
  b.closeness_S = l1_distance(b.src.S, P, n_l1);
  b.closeness = l1_distance(b.src.f1, P, n_l1);

  if (!plan.desk_scale) {
    if (!(std::abs(b.F_at_0) < eps / 10.0))
      throw NumericalError(
          chain_failure("|F(0)|", std::abs(b.F_at_0), eps / 10.0));
    if (!(std::abs(b.F_at_pi) < eps / 5.0))
      throw NumericalError(
          chain_failure("|F(pi)|", std::abs(b.F_at_pi), eps / 5.0));
    if (!(b.closeness_S < 2.0 * eps / 5.0))
      throw NumericalError(
          chain_failure("||S - P||_L1", b.closeness_S, 2.0 * eps / 5.0));
    if (!(b.closeness < eps / 2.0))
      throw NumericalError(
          chain_failure("||f1 - P||_L1", b.closeness, eps / 2.0));
  }
  return b;
}

IntegralEstimates integral_estimates(const LacunaryPlan& plan, std::size_t k,
                                     const PhasedLambda& lambda) {
  if (k < 1 || k >= plan.a_seq.size())
    throw PreconditionError(
        "integral_estimates: k must name a correction index");
  const long long a = plan.a_seq[k];
  IntegralEstimates est;
  est.eps_used =
      (lambda.frac - plan.w0) + 2.0 * double(lambda.n - a);

  // Term j of int_0^pi theta e^{-2 i lambda t} dt, integer parts exact.
  for (std::size_t j = 1; j < plan.a_seq.size(); ++j) {
    const cplx term =
        phi_pi({4 * plan.a_seq[j] - 4 * lambda.n,
                2.0 * plan.w0 - 2.0 * lambda.frac}) /
        std::sqrt(double(plan.a_seq[j]));
    if (j == k)
      est.I1 = term;
    else
      est.I2 += term;
  }
  est.I0 = est.I1 + est.I2;
  est.i1_scaled = std::abs(est.I1) * std::sqrt(double(a));
  est.i1_band_ok = est.i1_scaled > 3.0 && est.i1_scaled < 4.0;
  est.i2_scaled = std::abs(est.I2) * std::pow(double(a), 2.0 / 3.0);

  for (std::size_t m = 1; m < plan.alpha.size(); ++m) {
    const cplx im2 = cplx(0.0, 2.0 * double(m));
    est.sn_integral +=
        im2 * plan.alpha[m] *
            phi_pi({2 * (long long)m - 4 * lambda.n, -2.0 * lambda.frac}) -
        im2 * plan.beta[m - 1] *
            phi_pi({-2 * (long long)m - 4 * lambda.n, -2.0 * lambda.frac});
  }
  est.sn_scaled = std::abs(est.sn_integral) * std::pow(double(a), 2.0 / 3.0);
  return est;
}

DivergenceReport verify_divergence(const BuiltPotential& built,
                                   const LacunaryPlan& plan,
                                   const std::vector<std::size_t>& k_range,
                                   const DivergenceOptions& opt) {
  if (built.plan.a_seq != plan.a_seq)
    throw PreconditionError(
        "verify_divergence: plan does not match the one the potential was "
        "built from");
  for (std::size_t k : k_range)
    if (k < 1 || k >= plan.a_seq.size())
      throw PreconditionError("verify_divergence: k out of the plan range");

  // The modulation frequency doubles as the endpoint phase center; recover
  // the boundary parameter from it and refuse a mismatch.
  const cplx a_bc = std::polar(std::exp(pi * plan.w0.imag()),
                               pi * (plan.w0.real() - 1.0));
  const BcClassification bc = classify(periodic_type_matrix(a_bc));
  if (std::abs(bc.center0 - plan.w0) > 1e-8)
    throw PreconditionError(
        "verify_divergence: modulation frequency must equal the endpoint "
        "phase center");

  const Potential V = built.V();
  const AsymptoticModel model(V);
  const bool use_ode = V.max_frequency() <= opt.ode_freq_cap;
  FundamentalSolver solver(V);

  DivergenceReport rep;
  rep.points.assign(k_range.size(), {});
  parallel_for(k_range.size(), [&](std::size_t i) {
    const std::size_t k = k_range[i];
    const long long n = plan.a_seq[k];
    auto pair = locate_pair_asymptotic(model, bc, n, opt.pair);
    if (!pair.first.converged || !pair.second.converged)
      throw NumericalError("verify_divergence: resonant pair search failed");

    DivergencePoint pt;
    pt.k = k;
    pt.a = n;
    pt.lambda1 = pair.first.lambda;
    if (use_ode) {
      // Newton against the integrated characteristic function, then keep
      // the (Re, Im)-smaller root as the j = 1 member.
      const CharacteristicFunction chi(&solver, bc.minors);
      auto polish = [&](cplx lam) {
        for (int it = 0; it < 8; ++it) {
          const DeltaValue d = chi.with_derivative(lam);
          if (d.ddelta == 0.0) break;
          const cplx step = d.delta / d.ddelta;
          lam -= step;
          if (std::abs(step) < 1e-11) break;
        }
        return lam;
      };
      cplx l1 = polish(pair.first.lambda.value());
      cplx l2 = polish(pair.second.lambda.value());
      if (l2.real() < l1.real() ||
          (l2.real() == l1.real() && l2.imag() < l1.imag()))
        std::swap(l1, l2);
      pt.lambda1 = PhasedLambda{n, l1 - 2.0 * double(n)};
      pt.from_ode = true;
      const Mat2 E = solver.solve(l1, 2).end();
      pt.entry_corrected = std::abs(E(0, 1));
      pt.entry_companion = std::abs(E(1, 0));
    } else {
      const AsymptoticEntries e = model.entries_end(pt.lambda1);
      pt.entry_corrected = std::abs(e.e12);
      pt.entry_companion = std::abs(e.e21);
    }

    const double af = double(n);
    pt.corrected_scaled = pt.entry_corrected * af * std::sqrt(af);
    pt.ratio = pt.entry_companion / pt.entry_corrected;
    const IntegralEstimates est = integral_estimates(built.plan, k, pt.lambda1);
    pt.i1_scaled = est.i1_scaled;
    pt.i2_scaled = est.i2_scaled;
    pt.sn_scaled = est.sn_scaled;
    // F0' is the constant ramp slope; its oscillatory integral dies like
    // 1/lambda, recorded against the 1/a_k yardstick.
    pt.f0_scaled =
        std::abs(-built.P_tilde.c1 *
                 phi_pi({-4 * pt.lambda1.n, -2.0 * pt.lambda1.frac})) *
        af;
    rep.points[i] = pt;
  });

  std::sort(rep.points.begin(), rep.points.end(),
            [](const DivergencePoint& u, const DivergencePoint& v) {
              return u.a < v.a;
            });

  std::vector<double> as, corr, rat;
  for (const DivergencePoint& p : rep.points) {
    as.push_back(double(p.a));
    corr.push_back(p.entry_corrected);
    rat.push_back(p.ratio);
    rep.c7 = std::max(rep.c7, p.f0_scaled);
  }
  rep.f0_ok = !rep.points.empty();
  if (rep.points.size() >= 2) {
    rep.slope_corrected = loglog_slope(as, corr);
    rep.slope_ratio = loglog_slope(as, rat);
  }

  bool growing = rep.points.size() >= 1;
  for (std::size_t i = 1; i < rep.points.size(); ++i)
    if (!(rep.points[i].ratio > rep.points[i - 1].ratio)) growing = false;
  rep.conclusive = rep.points.size() >= 3 && growing;

  BasisVerdict& v = rep.verdict;
  v.mode = BasisMode::lemma2;
  v.is_riesz = false;
  v.conclusive = rep.conclusive;
  for (const DivergencePoint& p : rep.points) {
    v.ratios.push_back({p.a, p.entry_corrected / p.entry_companion});
    v.witness.push_back(p.a);
  }
  if (!v.ratios.empty()) {
    v.band_lo = v.band_hi = v.ratios.front().value;
    for (const RatioPoint& r : v.ratios) {
      v.band_lo = std::min(v.band_lo, r.value);
      v.band_hi = std::max(v.band_hi, r.value);
    }
  }
  v.note = rep.conclusive
               ? "coefficient ratio escapes along the sparse resonant "
                 "indices; no band contains the tail"
               : "needs at least three resonant indices with strictly "
                 "growing ratio";
  return rep;
}

}  // namespace dirac
