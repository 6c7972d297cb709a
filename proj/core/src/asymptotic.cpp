#include "dirac/asymptotic.hpp"

#include <algorithm>
#include <cmath>

namespace dirac {

cplx PhasedLambda::exp_i_pi() const {
  // e^{2 pi i n} = 1 exactly, whatever n is.
  return std::exp(cplx(0.0, pi) * frac);
}

cplx cis_pi(const SplitFreq& w) {
  const double parity = (w.k & 1LL) ? -1.0 : 1.0;
  return parity * std::exp(cplx(0.0, pi) * w.rest);
}

cplx phi_pi(const SplitFreq& b) {
  const cplx bv = b.value();
  if (std::abs(bv) < 1e-3) {
    // pi * sum_j (i b pi)^j / (j+1)!
    const cplx z = cplx(0.0, pi) * bv;
    cplx term = 1.0, sum = 1.0;
    for (int j = 1; j <= 10; ++j) {
      term *= z / double(j + 1);
      sum += term;
    }
    return pi * sum;
  }
  return (cis_pi(b) - 1.0) / (cplx(0.0, 1.0) * bv);
}

namespace {

// int_0^x e^{i b t} dt, plain arithmetic.
cplx phi(cplx b, double x) {
  const cplx z = cplx(0.0, 1.0) * b * x;
  if (std::abs(z) < 1e-4) {
    cplx term = 1.0, sum = 1.0;
    for (int j = 1; j <= 6; ++j) {
      term *= z / double(j + 1);
      sum += term;
    }
    return x * sum;
  }
  return (std::exp(z) - 1.0) / (cplx(0.0, 1.0) * b);
}

// sum over modes of c omega e^{i omega x} Phi(-(omega + 2 mu), x);
// this is st(mu, x) for the component whose modes are given.
cplx sigma_tilde_trig(const TrigAffine& f, cplx mu, double x) {
  cplx s = 0.0;
  for (const TrigMode& m : f.modes) {
    const cplx w = double(m.k) + m.shift;
    s += m.coeff * w * std::exp(cplx(0.0, 1.0) * w * x) * phi(-(w + 2.0 * mu), x);
  }
  // A ramp c1 x differentiates to a constant under the integral.
  if (f.c1 != 0.0) s += cplx(0.0, -1.0) * f.c1 * phi(-2.0 * mu, x);
  return s;
}

// Same at x = pi with the integer parts of the frequencies cancelled
// exactly against 2 lambda = 2 frac + 4n.
cplx sigma_tilde_end(const TrigAffine& f, const PhasedLambda& L, int lam_sign) {
  cplx s = 0.0;
  for (const TrigMode& m : f.modes) {
    const cplx w = double(m.k) + m.shift;
    const SplitFreq beta{-m.k - lam_sign * 4 * L.n,
                         -m.shift - lam_sign * 2.0 * L.frac};
    s += m.coeff * w * cis_pi({m.k, m.shift}) * phi_pi(beta);
  }
  if (f.c1 != 0.0)
    s += cplx(0.0, -1.0) * f.c1 *
         phi_pi({-lam_sign * 4 * L.n, -lam_sign * 2.0 * L.frac});
  return s;
}

cplx quad_sigma_tilde(const SampledFunction& f, cplx mu, double x) {
  if (x == 0.0) return 0.0;
  const double nyq = double(f.x.size() - 1);  // pi / h
  const double rate = 2.0 * std::abs(mu) + nyq;
  int N = 2 * std::max(32, (int)std::ceil(x * rate * 8.0 / (2.0 * pi)));
  const double h = x / double(N);
  auto g = [&](double t) {
    return cplx(0.0, -1.0) * f.deriv(x - t) *
           std::exp(cplx(0.0, -2.0) * mu * t);
  };
  cplx acc = 0.0;
  for (int j = 0; j + 2 <= N; j += 2)
    acc += h / 3.0 * (g(h * j) + 4.0 * g(h * (j + 1)) + g(h * (j + 2)));
  return acc;
}

}  // namespace

AsymptoticModel::AsymptoticModel(const Potential& V) : V_(V) {
  if (V_.kind == Potential::Kind::trig) {
    // A ramp in either component pushes the product out of the mode
    // algebra; the cumulative grid below handles that case instead.
    if (V_.P.c1 == 0.0 && V_.Q.c1 == 0.0) {
      b1_ = trig_product(V_.P, V_.Q).antiderivative();
      return;
    }
  } else if (V_.smoothness == Smoothness::c0)
    throw PreconditionError(
        "AsymptoticModel: potential must be differentiable (linear "
        "interpolation is not)");
  // Cumulative integral of P Q on a fine grid, fourth order per panel.
  const std::size_t M = 4096;
  b1_grid_ = linspace(0.0, pi, M + 1);
  std::vector<cplx> f(M + 1);
  for (std::size_t i = 0; i <= M; ++i)
    f[i] = V_.p(b1_grid_[i]) * V_.q(b1_grid_[i]);
  b1_vals_.assign(M + 1, cplx(0.0, 0.0));
  const double h = pi / double(M);
  for (std::size_t j = 0; j + 2 <= M; j += 2) {
    b1_vals_[j + 1] =
        b1_vals_[j] + h / 12.0 * (5.0 * f[j] + 8.0 * f[j + 1] - f[j + 2]);
    b1_vals_[j + 2] =
        b1_vals_[j] + h / 3.0 * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
  }
}

cplx AsymptoticModel::b1(double x) const {
  if (b1_grid_.empty()) return b1_.eval(x);
  const double h = pi / double(b1_grid_.size() - 1);
  double s = x / h;
  std::size_t i = std::min<std::size_t>((std::size_t)std::max(0.0, std::floor(s)),
                                        b1_grid_.size() - 2);
  const double u = s - double(i);
  return b1_vals_[i] * (1.0 - u) + b1_vals_[i + 1] * u;
}

cplx AsymptoticModel::p(double x) const { return 0.5 * (V_.p(x) + V_.q(x)); }

cplx AsymptoticModel::r(double x) const {
  return (V_.p(x) - V_.q(x)) / cplx(0.0, 2.0);
}

cplx AsymptoticModel::sigma1_plus(double x) const {
  return cplx(0.0, 1.0) * V_.p(x);
}
cplx AsymptoticModel::sigma1_minus(double x) const {
  return cplx(0.0, 1.0) * V_.q(x);
}
cplx AsymptoticModel::sigma2_plus(double x) const {
  return cplx(0.0, -1.0) * V_.dp(x);
}
cplx AsymptoticModel::sigma2_minus(double x) const {
  return cplx(0.0, -1.0) * V_.dq(x);
}

cplx AsymptoticModel::sigma_tilde_plus(cplx lambda, double x) const {
  return V_.kind == Potential::Kind::trig
             ? sigma_tilde_trig(V_.P, lambda, x)
             : quad_sigma_tilde(V_.Ps, lambda, x);
}

cplx AsymptoticModel::sigma_tilde_minus(cplx lambda, double x) const {
  return V_.kind == Potential::Kind::trig
             ? sigma_tilde_trig(V_.Q, lambda, x)
             : quad_sigma_tilde(V_.Qs, lambda, x);
}

cplx AsymptoticModel::u_fn(cplx lambda, double x) const {
  return 1.0 + b1(x) / (cplx(0.0, 2.0) * lambda);
}

cplx AsymptoticModel::sigma_plus(cplx lambda, double x) const {
  return 1.0 + (sigma1_plus(x) + sigma_tilde_plus(lambda, x)) /
                   (cplx(0.0, 2.0) * lambda);
}

cplx AsymptoticModel::sigma_minus(cplx lambda, double x) const {
  return 1.0 + (sigma1_minus(x) + sigma_tilde_minus(lambda, x)) /
                   (cplx(0.0, 2.0) * lambda);
}

cplx AsymptoticModel::w(cplx lambda) const {
  return 2.0 * (1.0 + sigma_plus(-lambda, 0.0) * sigma_minus(lambda, 0.0));
}

AsymptoticEntries AsymptoticModel::entries(double x, cplx lambda) const {
  if (std::abs(lambda) < 1e-6)
    throw PreconditionError("asymptotic entries need |lambda| bounded away from 0");
  const cplx up = std::exp(cplx(0.0, 1.0) * lambda * x);
  const cplx dn = 1.0 / up;
  const cplx f = cplx(0.0, 1.0) * b1(x) / (2.0 * lambda);
  const cplx il2 = cplx(0.0, 2.0) * lambda;
  AsymptoticEntries a;
  a.e11 = up * (1.0 - f);
  a.e22 = dn * (1.0 + f);
  a.e12 = (dn * (sigma1_plus(x) + sigma_tilde_plus(-lambda, x)) -
           up * sigma1_plus(0.0)) /
          il2;
  a.e21 = (up * (sigma1_minus(x) + sigma_tilde_minus(lambda, x)) -
           dn * sigma1_minus(0.0)) /
          il2;
  return a;
}

AsymptoticEntries AsymptoticModel::entries_end(const PhasedLambda& L) const {
  if (V_.kind != Potential::Kind::trig) return entries(pi, L.value());
  const cplx lambda = L.value();
  if (std::abs(lambda) < 1e-6)
    throw PreconditionError("asymptotic entries need |lambda| bounded away from 0");
  const cplx up = L.exp_i_pi();
  const cplx dn = 1.0 / up;
  const cplx f = cplx(0.0, 1.0) * b1(pi) / (2.0 * lambda);
  const cplx il2 = cplx(0.0, 2.0) * lambda;
  AsymptoticEntries a;
  a.e11 = up * (1.0 - f);
  a.e22 = dn * (1.0 + f);
  // sigma_tilde_plus at -lambda resonates P modes against +2 lambda,
  // sigma_tilde_minus at +lambda resonates Q modes against -2 lambda.
  a.e12 = (dn * (sigma1_plus(pi) + sigma_tilde_end(V_.P, L, -1)) -
           up * sigma1_plus(0.0)) /
          il2;
  a.e21 = (up * (sigma1_minus(pi) + sigma_tilde_end(V_.Q, L, +1)) -
           dn * sigma1_minus(0.0)) /
          il2;
  return a;
}

Mat2 conjugated_frame(const Mat2& E) {
  Mat2 T, Tinv;
  T << 1.0, cplx(0.0, 1.0), 1.0, cplx(0.0, -1.0);
  Tinv << 0.5, 0.5, cplx(0.0, -0.5), cplx(0.0, 0.5);
  return Tinv * E * T;
}

Mat2 from_conjugated_frame(const Mat2& y) {
  Mat2 T, Tinv;
  T << 1.0, cplx(0.0, 1.0), 1.0, cplx(0.0, -1.0);
  Tinv << 0.5, 0.5, cplx(0.0, -0.5), cplx(0.0, 0.5);
  return T * y * Tinv;
}

Mat2 scaled_conjugated_entries(const AsymptoticModel& model, double x,
                               cplx lambda) {
  const AsymptoticEntries a = model.entries(x, lambda);
  Mat2 E;
  E << a.e11, a.e12, a.e21, a.e22;
  return model.w(lambda) * conjugated_frame(E);
}

Mat2 y_to_E(const Mat2& yhat, cplx w) {
  return from_conjugated_frame(Mat2(yhat / w));
}

OrderFit compare_asymptotics(const FundamentalSolver& solver,
                             const AsymptoticModel& model, cplx base,
                             const std::vector<long long>& ns,
                             std::size_t n_x) {
  OrderFit fit;
  fit.lambdas.reserve(ns.size());
  fit.errors.assign(ns.size(), 0.0);
  for (long long n : ns) fit.lambdas.push_back(base + 2.0 * double(n));

  parallel_for(ns.size(), [&](std::size_t i) {
    const cplx lam = fit.lambdas[i];
    const FundamentalMatrix F = solver.solve(lam, n_x);
    double err = 0.0;
    for (std::size_t k = 0; k < F.x.size(); ++k) {
      const AsymptoticEntries a = model.entries(F.x[k], lam);
      err = std::max({err, std::abs(F.E[k](0, 0) - a.e11),
                      std::abs(F.E[k](0, 1) - a.e12),
                      std::abs(F.E[k](1, 0) - a.e21),
                      std::abs(F.E[k](1, 1) - a.e22)});
    }
    fit.errors[i] = err;
  });

  // least squares: ln err = const - order * ln |lambda|
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = double(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(std::abs(fit.lambdas[i]));
    const double y = std::log(std::max(fit.errors[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.fitted_order = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

std::pair<AsymptoticEigenvalue, AsymptoticEigenvalue> locate_pair_asymptotic(
    const AsymptoticModel& model, const BcClassification& bc, long long n,
    const AsymptoticPairOptions& opt) {
  if (!bc.periodic_type)
    throw PreconditionError(
        "locate_pair_asymptotic: needs the one-parameter endpoint condition");
  const cplx a = bc.periodic_a;

  // Branch s = +/-1: a e11(pi, lambda) + 1 - s sqrt(D) = 0, D = -e12 e21.
  // D can sit next to the negative real axis, where the principal square
  // root flips sign under tiny perturbations; sq_ref continues the branch
  // along the iteration path instead.
  cplx sq_ref{0.0, 0.0};
  bool sq_init = false;
  auto g = [&](double s, cplx eps, cplx* sqrtD) {
    const PhasedLambda L{n, bc.center0 + eps};
    const AsymptoticEntries e = model.entries_end(L);
    cplx sq = std::sqrt(-e.e12 * e.e21);
    if (sq_init && (std::conj(sq_ref) * sq).real() < 0.0) sq = -sq;
    sq_ref = sq;
    sq_init = true;
    if (sqrtD) *sqrtD = sq;
    return a * e.e11 + 1.0 - s * sq;
  };

  auto solve_branch = [&](double s, cplx base_seed) {
    AsymptoticEigenvalue r;
    for (const cplx step :
         {cplx(opt.eps_seed, 0.0), cplx(-opt.eps_seed, 0.0),
          cplx(0.1 * opt.eps_seed, 0.0)}) {
      sq_init = false;
      cplx e0 = base_seed, e1 = base_seed + step;
      cplx g0 = g(s, e0, nullptr), g1 = g(s, e1, nullptr);
      bool done = false;
      int it = 0;
      for (; it < opt.max_iter; ++it) {
        if (g1 == g0) break;
        const cplx e2 = e1 - g1 * (e1 - e0) / (g1 - g0);
        e0 = e1;
        g0 = g1;
        e1 = e2;
        g1 = g(s, e1, nullptr);
        if (std::abs(e1 - e0) < opt.tol_eps) {
          done = true;
          break;
        }
      }
      if (done && std::abs(e1) < 0.45) {
        r.lambda = {n, bc.center0 + e1};
        r.iterations = it;
        r.converged = true;
        g(s, e1, &r.sqrtD);
        return r;
      }
    }
    r.lambda = {n, bc.center0 + base_seed};
    return r;
  };

  AsymptoticEigenvalue r1 = solve_branch(+1.0, 0.0);
  AsymptoticEigenvalue r2 = solve_branch(-1.0, 0.0);
  // Both branches landing on one root happens when continuation migrates
  // across the other sheet; restart the second from the mirrored guess
  // eps_other = eps + 2 s sqrt(D) / (i pi).
  if (r1.converged && r2.converged) {
    const double sep = std::abs(r1.lambda.value() - r2.lambda.value());
    const double expect = 2.0 * std::abs(r1.sqrtD) / pi;
    if (sep < 0.1 * expect && std::abs(r1.sqrtD) > 50.0 * opt.tol_eps) {
      const cplx eps1 = r1.lambda.frac - bc.center0;
      const cplx mirror = eps1 + 2.0 * r1.sqrtD / cplx(0.0, pi);
      // Fresh continuation from the mirror seed lands on an arbitrary
      // sheet, so one of the two labels vanishes at the missed root.
      for (double s2 : {-1.0, +1.0}) {
        AsymptoticEigenvalue alt = solve_branch(s2, mirror);
        if (alt.converged &&
            std::abs(alt.lambda.value() - r1.lambda.value()) > 0.2 * expect) {
          r2 = alt;
          break;
        }
      }
    }
  }
  const cplx l1 = r1.lambda.value(), l2 = r2.lambda.value();
  const bool swap = (l2.real() < l1.real()) ||
                    (l2.real() == l1.real() && l2.imag() < l1.imag());
  if (swap) std::swap(r1, r2);
  r1.j = 1;
  r2.j = 2;
  return {r1, r2};
}

}  // namespace dirac
