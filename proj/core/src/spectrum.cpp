#include "dirac/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace dirac {

cplx delta_from_end(const BoundaryMinors& m, const Mat2& E_pi) {
  return m.A12 + m.A34 + m.A32() * E_pi(0, 0) + m.A13 * E_pi(0, 1) +
         m.A42() * E_pi(1, 0) + m.A14 * E_pi(1, 1);
}

cplx ddelta_from_end(const BoundaryMinors& m, const Mat2& Elam_pi) {
  return m.A32() * Elam_pi(0, 0) + m.A13 * Elam_pi(0, 1) +
         m.A42() * Elam_pi(1, 0) + m.A14 * Elam_pi(1, 1);
}

cplx delta0(const BoundaryMinors& m, cplx lambda) {
  const cplx e = std::exp(cplx(0.0, pi) * lambda);
  return m.A12 + m.A34 - m.A23 * e + m.A14 / e;
}

cplx ddelta0(const BoundaryMinors& m, cplx lambda) {
  const cplx e = std::exp(cplx(0.0, pi) * lambda);
  return cplx(0.0, -pi) * (m.A23 * e + m.A14 / e);
}

cplx CharacteristicFunction::operator()(cplx lambda) const {
  return delta_from_end(m_, solver_->solve(lambda).end());
}

DeltaValue CharacteristicFunction::with_derivative(cplx lambda) const {
  const FundamentalMatrix F = solver_->solve_with_dlambda(lambda);
  return {delta_from_end(m_, F.end()), ddelta_from_end(m_, F.end_dlambda()),
          F.est_error};
}

namespace {

struct RootRec {
  cplx lambda;
  int mult = 1;
  cplx ddelta{0.0, 0.0};
  double abs_delta = 0.0;
};

struct Contour {
  double radius = 0.0;
  int M = 0;
  std::vector<cplx> lam, delta, ddelta;
  int winding = 0;
  bool trusted = false;
};

Contour eval_contour(const CharacteristicFunction& F, cplx c, double r, int M) {
  Contour ct;
  ct.radius = r;
  ct.M = M;
  ct.lam.resize(M);
  ct.delta.resize(M);
  ct.ddelta.resize(M);
  double max_abs = 0.0, min_abs = std::numeric_limits<double>::infinity();
  for (int j = 0; j < M; ++j) {
    const double th = 2.0 * pi * double(j) / double(M);
    ct.lam[j] = c + r * std::exp(cplx(0.0, 1.0) * th);
    const DeltaValue dv = F.with_derivative(ct.lam[j]);
    ct.delta[j] = dv.delta;
    ct.ddelta[j] = dv.ddelta;
    max_abs = std::max(max_abs, std::abs(dv.delta));
    min_abs = std::min(min_abs, std::abs(dv.delta));
  }
  if (max_abs == 0.0 || min_abs < 1e-12 * max_abs) return ct;  // root on contour

  // The winding number comes from accumulated principal-branch phase
  // increments; it is reliable once every increment stays under pi/2.
  double total = 0.0;
  bool fine = true;
  for (int j = 0; j < M; ++j) {
    const double d = std::arg(ct.delta[(j + 1) % M] / ct.delta[j]);
    if (std::abs(d) > 0.5 * pi) fine = false;
    total += d;
  }
  if (!fine) return ct;
  ct.winding = (int)std::lround(total / (2.0 * pi));

  // Cross-check against the trapezoid count; disagreement means the
  // quadrature cannot be trusted for moments either.
  cplx s0 = 0.0;
  for (int j = 0; j < M; ++j)
    s0 += ct.ddelta[j] / ct.delta[j] * (ct.lam[j] - c);
  s0 /= double(M);
  if (std::abs(s0 - double(ct.winding)) > 0.25) return ct;
  ct.trusted = true;
  return ct;
}

// Power sums of (root - c) over the enclosed roots, k = 1..kmax.
std::vector<cplx> contour_moments(const Contour& ct, cplx c, int kmax) {
  std::vector<cplx> s(kmax + 1, cplx(0.0, 0.0));
  for (int j = 0; j < ct.M; ++j) {
    const cplx w = ct.ddelta[j] / ct.delta[j] * (ct.lam[j] - c);
    cplx mu = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      mu *= ct.lam[j] - c;
      s[k] += w * mu;
    }
  }
  for (int k = 1; k <= kmax; ++k) s[k] /= double(ct.M);
  return s;
}

std::vector<cplx> roots_from_moments(const std::vector<cplx>& p, int w) {
  // Newton's identities: e_k = (1/k) sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i.
  std::vector<cplx> e(w + 1, cplx(0.0, 0.0));
  e[0] = 1.0;
  for (int k = 1; k <= w; ++k) {
    cplx acc = 0.0;
    double sign = 1.0;
    for (int i = 1; i <= k; ++i, sign = -sign) acc += sign * e[k - i] * p[i];
    e[k] = acc / double(k);
  }
  // mu^w - e1 mu^{w-1} + e2 mu^{w-2} - ... ; companion matrix eigenvalues.
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(w, w);
  for (int i = 1; i < w; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < w; ++i) {
    // coefficient of mu^i is (-1)^{w-i} e_{w-i}
    const double parity = ((w - i) % 2 == 0) ? 1.0 : -1.0;
    C(i, w - 1) = -parity * e[w - i];
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C);
  std::vector<cplx> roots(w);
  for (int i = 0; i < w; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

cplx newton_polish(const CharacteristicFunction& F, cplx x, double tol,
                   double max_step, cplx* ddelta_out, double* absd_out) {
  DeltaValue dv = F.with_derivative(x);
  for (int it = 0; it < 12; ++it) {
    if (dv.ddelta == 0.0) break;
    cplx step = -dv.delta / dv.ddelta;
    if (std::abs(step) > max_step) step *= max_step / std::abs(step);
    DeltaValue dv_new = F.with_derivative(x + step);
    int halvings = 0;
    while (std::abs(dv_new.delta) > std::abs(dv.delta) && halvings < 4) {
      step *= 0.5;
      dv_new = F.with_derivative(x + step);
      ++halvings;
    }
    if (std::abs(dv_new.delta) > std::abs(dv.delta)) break;
    x += step;
    dv = dv_new;
    if (std::abs(step) < tol) break;
  }
  if (ddelta_out) *ddelta_out = dv.ddelta;
  if (absd_out) *absd_out = std::abs(dv.delta);
  return x;
}

// One disk: winding, then roots.  Simple roots go through Newton; a
// winding-2 disk is resolved through the local quadratic model at the
// moment centroid, which stays accurate whether the pair is split or is a
// genuine double (the centroid itself has no sqrt cancellation in it).
std::pair<std::vector<RootRec>, DiskReport> process_disk(
    const CharacteristicFunction& F, cplx center, long long n,
    const LocateOptions& opt) {
  DiskReport rep;
  rep.n = n;

  Contour ct;
  bool have = false;
  static constexpr double kRadiusFactor[] = {1.0, 1.07, 0.91, 1.15};
  for (double rf : kRadiusFactor) {
    const double r = opt.radius * rf;
    int M = opt.contour_points;
    for (int d = 0; d <= opt.max_doublings; ++d, M *= 2) {
      ct = eval_contour(F, center, r, M);
      if (ct.trusted) {
        have = true;
        break;
      }
      ++rep.retries;
    }
    if (have) break;
  }
  rep.radius = ct.radius;
  rep.contour_points = ct.M;
  if (!have) {
    rep.ok = false;
    rep.note = "contour sampling failed";
    return {{}, rep};
  }
  rep.winding = ct.winding;
  if (ct.winding < 0 || ct.winding > opt.max_winding) {
    rep.ok = false;
    rep.note = "unexpected winding " + std::to_string(ct.winding);
    return {{}, rep};
  }
  if (ct.winding == 0) return {{}, rep};

  const int w = ct.winding;
  const std::vector<cplx> mom = contour_moments(ct, center, w);
  const double max_step = 0.6 * ct.radius;
  std::vector<RootRec> roots;

  auto polished = [&](cplx x0) {
    RootRec r;
    r.lambda = opt.polish
                   ? newton_polish(F, x0, opt.tol_polish, max_step, &r.ddelta,
                                   &r.abs_delta)
                   : x0;
    if (!opt.polish) {
      const DeltaValue dv = F.with_derivative(x0);
      r.ddelta = dv.ddelta;
      r.abs_delta = std::abs(dv.delta);
    }
    return r;
  };

  if (w == 1) {
    roots.push_back(polished(center + mom[1]));
  } else if (w == 2) {
    const cplx centroid = center + 0.5 * mom[1];
    // Delta'' by central difference of the variational derivative.
    const double fd = 2e-3 * ct.radius;
    const DeltaValue dc = F.with_derivative(centroid);
    const DeltaValue dp = F.with_derivative(centroid + fd);
    const DeltaValue dm = F.with_derivative(centroid - fd);
    const cplx ddd = (dp.ddelta - dm.ddelta) / (2.0 * fd);
    bool split_ok = false;
    cplx r1{}, r2{};
    double split_floor = opt.tol_cluster;
    if (std::abs(ddd) > 1e-8) {
      const cplx sq = std::sqrt(dc.ddelta * dc.ddelta - 2.0 * dc.delta * ddd);
      r1 = centroid + (-dc.ddelta + sq) / ddd;
      r2 = centroid + (-dc.ddelta - sq) / ddd;
      split_ok = true;
      // A genuine double still shows a spurious split of order
      // sqrt(|Delta error| / |Delta''|); stay above that noise floor.
      double dscale = 0.0;
      for (const cplx& d : ct.delta) dscale = std::max(dscale, std::abs(d));
      const double derr = dc.est_error + 1e-13 * (1.0 + dscale);
      split_floor =
          std::max(split_floor, 10.0 * std::sqrt(derr / std::abs(ddd)));
    } else {
      // Degenerate curvature: fall back to the raw moment split.
      const cplx d2 = 0.5 * mom[2] - 0.25 * mom[1] * mom[1];
      const cplx d = std::sqrt(d2);
      r1 = centroid + d;
      r2 = centroid - d;
    }
    if (split_ok && std::abs(r1 - r2) < split_floor) {
      // Double root: refine the zero of Delta' (simple there).
      cplx x = centroid - dc.ddelta / ddd;
      for (int it = 0; it < 2; ++it) {
        const DeltaValue dv = F.with_derivative(x);
        x -= dv.ddelta / ddd;
      }
      RootRec r;
      r.lambda = x;
      const DeltaValue dv = F.with_derivative(x);
      r.ddelta = dv.ddelta;
      r.abs_delta = std::abs(dv.delta);
      r.mult = 2;
      roots.push_back(r);
    } else {
      RootRec a = polished(r1);
      RootRec b = polished(r2);
      if (std::abs(a.lambda - b.lambda) < split_floor) {
        a.mult = 2;
        a.lambda = 0.5 * (a.lambda + b.lambda);
        roots.push_back(a);
      } else {
        roots.push_back(a);
        roots.push_back(b);
      }
    }
  } else {
    for (const cplx mu : roots_from_moments(mom, w))
      roots.push_back(polished(center + mu));
    // Merge polished duplicates into multiplicity counts.
    std::vector<RootRec> merged;
    for (const RootRec& r : roots) {
      bool joined = false;
      for (RootRec& m : merged)
        if (std::abs(m.lambda - r.lambda) < opt.tol_cluster) {
          m.mult += r.mult;
          joined = true;
          break;
        }
      if (!joined) merged.push_back(r);
    }
    roots = std::move(merged);
  }
  return {roots, rep};
}

}  // namespace

SpectrumResult locate_eigenvalues(const FundamentalSolver& solver,
                                  const BcClassification& bc, long long n_min,
                                  long long n_max, const LocateOptions& opt) {
  if (!bc.coincident_roots)
    throw PreconditionError(
        "locate_eigenvalues: implemented for the coincident-root case");
  if (n_min > n_max)
    throw PreconditionError("locate_eigenvalues: empty index range");

  const CharacteristicFunction F(&solver, bc.minors);
  const std::size_t count = std::size_t(n_max - n_min + 1);
  std::vector<std::vector<RootRec>> slot_roots(count);
  std::vector<DiskReport> slot_reps(count);

  parallel_for(count, [&](std::size_t i) {
    const long long n = n_min + (long long)i;
    auto [roots, rep] = process_disk(F, bc.center0 + 2.0 * double(n), n, opt);
    slot_roots[i] = std::move(roots);
    slot_reps[i] = std::move(rep);
  });

  SpectrumResult res;
  res.center0 = bc.center0;
  res.disks.assign(slot_reps.begin(), slot_reps.end());
  res.complete = std::all_of(res.disks.begin(), res.disks.end(),
                             [](const DiskReport& d) { return d.ok; });

  // Index every root by its nearest grid point (which may differ from the
  // disk it was found in when an eigenvalue drifts past a disk boundary).
  std::map<long long, std::vector<SpectrumEntry>> by_n;
  for (const auto& roots : slot_roots)
    for (const RootRec& r : roots) {
      SpectrumEntry e;
      e.n = (long long)std::llround(0.5 * (r.lambda - bc.center0).real());
      e.lambda = r.lambda;
      e.eps = r.lambda - (bc.center0 + 2.0 * double(e.n));
      e.multiplicity = r.mult;
      e.ddelta = r.ddelta;
      e.abs_delta = r.abs_delta;
      by_n[e.n].push_back(e);
    }

  for (auto& [n, group] : by_n) {
    std::sort(group.begin(), group.end(),
              [](const SpectrumEntry& a, const SpectrumEntry& b) {
                if (a.lambda.real() != b.lambda.real())
                  return a.lambda.real() < b.lambda.real();
                return a.lambda.imag() < b.lambda.imag();
              });
    int j = 1;
    for (SpectrumEntry& e : group) {
      e.j = j;
      j += e.multiplicity;
    }
    res.entries.insert(res.entries.end(), group.begin(), group.end());
  }

  // n0: all scanned indices with |n| >= n0 must look asymptotically normal.
  std::map<long long, int> mult_at;
  std::map<long long, double> max_eps;
  for (const SpectrumEntry& e : res.entries) {
    mult_at[e.n] += e.multiplicity;
    double& me = max_eps[e.n];
    me = std::max(me, std::abs(e.eps));
  }
  const long long max_abs = std::max(std::llabs(n_min), std::llabs(n_max));
  auto normal_at = [&](long long n) {
    if (n < n_min || n > n_max) return true;  // outside the scan
    const DiskReport& d = res.disks[std::size_t(n - n_min)];
    if (!d.ok) return false;
    auto it = mult_at.find(n);
    if (it == mult_at.end() || it->second != 2) return false;
    return max_eps[n] < 0.25;
  };
  res.n0 = -1;
  for (long long t = 0; t <= max_abs; ++t) {
    bool all = true;
    for (long long n = n_min; n <= n_max && all; ++n)
      if (std::llabs(n) >= t) all = normal_at(n);
    if (all) {
      res.n0 = t;
      break;
    }
  }
  return res;
}

}  // namespace dirac
