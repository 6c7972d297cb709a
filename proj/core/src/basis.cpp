#include "dirac/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace dirac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Floor on |e12 e21| at a claimed-simple eigenvalue.  The two branch
// directions differ by a factor sqrt(e12 e21); below this the pair is
// numerically defective and no biorthogonal partner survives.
constexpr double kDefectFloor = 1e-24;

// int_0^pi e^{c x} dx, stable through c = 0.
double exp_integral(double c) {
  const double u = c * pi;
  if (std::abs(u) < 1e-9) return pi * (1.0 + 0.5 * u + u * u / 6.0);
  return (std::exp(u) - 1.0) / c;
}

std::size_t odd_grid(std::size_t n) { return n < 3 ? 3 : (n | 1); }

double weighted_norm(const std::vector<double>& w, const std::vector<Vec2>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    s += w[i] * (std::norm(y[i](0)) + std::norm(y[i](1)));
  return std::sqrt(s);
}

// int (u1 v2 + u2 v1): the bilinear pairing behind the adjoint family.
cplx bilinear(const std::vector<double>& w, const std::vector<Vec2>& u,
              const std::vector<Vec2>& v) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < w.size(); ++i)
    s += w[i] * (u[i](0) * v[i](1) + u[i](1) * v[i](0));
  return s;
}

cplx hermitian(const std::vector<double>& w, const std::vector<Vec2>& u,
               const std::vector<Vec2>& v) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < w.size(); ++i)
    s += w[i] * (u[i](0) * std::conj(v[i](0)) + u[i](1) * std::conj(v[i](1)));
  return s;
}

// Samples, norm, pairing integral and the exponential-weight windows for a
// coefficient pair laid against the fundamental columns.
void fill_samples(EigenfunctionRecord& rec, const FundamentalMatrix& F,
                  const std::vector<double>& w) {
  const std::size_t m = F.x.size();
  rec.lambda = F.lambda;
  rec.x = F.x;
  rec.y.resize(m);
  double n2 = 0.0;
  cplx i12{0.0, 0.0};
  for (std::size_t i = 0; i < m; ++i) {
    rec.y[i] = rec.alpha * F.E[i].col(0) + rec.beta * F.E[i].col(1);
    n2 += w[i] * (std::norm(rec.y[i](0)) + std::norm(rec.y[i](1)));
    i12 += w[i] * rec.y[i](0) * rec.y[i](1);
  }
  rec.norm = std::sqrt(n2);
  rec.inner12 = i12;
  const double b = F.lambda.imag();
  rec.h_int = exp_integral(-2.0 * b);
  rec.g_int = exp_integral(2.0 * b);
}

// One point of a tail series: split pairs carry the criterion value,
// merged (double) ones only mark that the pair has closed up.
struct TailPoint {
  long long n = 0;
  double value = 0.0;
  bool split = false;
};

// Indices of one sign, |n| ascending, so the last element is the window edge.
struct Branch {
  std::vector<TailPoint> pts;

  bool splits_reach_edge(int width) const {
    int seen = 0;
    for (auto it = pts.rbegin(); it != pts.rend() && seen < width; ++it, ++seen)
      if (it->split) return true;
    return false;
  }

  std::vector<TailPoint> splits() const {
    std::vector<TailPoint> s;
    for (const TailPoint& p : pts)
      if (p.split) s.push_back(p);
    return s;
  }
};

void split_branches(const std::map<long long, TailPoint>& tail, Branch& neg,
                    Branch& pos) {
  for (const auto& [n, p] : tail)
    (n < 0 ? neg : pos).pts.push_back(p);
  std::reverse(neg.pts.begin(), neg.pts.end());  // |n| ascending
}

// Distance from a band: 1 at ratio 1, symmetric in value <-> 1/value,
// +inf once a numerator or denominator has been floored away.
double spread_score(double v) {
  if (v == 0.0 || std::isinf(v)) return kInf;
  return std::max(v, 1.0 / v);
}

// Length of the strictly-increasing run ending at the series edge; a +inf
// plateau keeps extending it (the series already escaped).
int edge_run(const std::vector<double>& s) {
  if (s.empty()) return 0;
  int run = 1;
  for (std::size_t i = s.size() - 1; i > 0; --i) {
    const bool both_inf = std::isinf(s[i - 1]) && std::isinf(s[i]);
    if (both_inf || s[i - 1] < s[i])
      ++run;
    else
      break;
  }
  return run;
}

bool edge_is_max(const std::vector<double>& s) {
  if (s.empty()) return false;
  double hi = 0.0;
  for (double v : s) {
    if (std::isinf(v)) return std::isinf(s.back());
    hi = std::max(hi, v);
  }
  return !(s.back() < hi);
}

// Shared verdict assembly for the two coefficient criteria.  The decision
// tree, in order: no splits at all, splits dying out before the edge,
// a bounded band, a monotone escape, and otherwise undecided.
BasisVerdict band_verdict(BasisMode mode, const Branch& neg, const Branch& pos,
                          const BandOptions& opt) {
  BasisVerdict v;
  v.mode = mode;

  std::vector<TailPoint> all_splits;
  for (const Branch* b : {&neg, &pos})
    for (const TailPoint& p : b->pts)
      if (p.split) all_splits.push_back(p);
  std::sort(all_splits.begin(), all_splits.end(),
            [](const TailPoint& x, const TailPoint& y) { return x.n < y.n; });
  for (const TailPoint& p : all_splits) v.ratios.push_back({p.n, p.value});

  double lo = kInf, hi = 0.0;
  bool floored = false;
  for (const TailPoint& p : all_splits) {
    if (std::isinf(p.value) || p.value == 0.0) {
      floored = true;
      continue;
    }
    lo = std::min(lo, p.value);
    hi = std::max(hi, p.value);
  }
  if (hi > 0.0) {
    v.band_lo = lo;
    v.band_hi = hi;
  }

  if (all_splits.empty()) {
    v.is_riesz = true;
    v.conclusive = true;
    v.note = "no split pairs in the window; a finite exceptional set keeps the basis";
    return v;
  }

  const bool neg_edge = neg.splits_reach_edge(opt.min_witness);
  const bool pos_edge = pos.splits_reach_edge(opt.min_witness);
  if (!neg_edge && !pos_edge) {
    v.is_riesz = true;
    v.conclusive = true;
    v.note = "split pairs die out before the window edge; exceptional set looks finite";
    return v;
  }

  if (all_splits.size() < opt.min_tail) {
    v.note = "too few split pairs in the window to classify";
    return v;
  }

  if (!floored && hi > 0.0 && hi <= opt.band_factor * lo) {
    v.is_riesz = true;
    v.conclusive = true;
    v.note = "ratios stay inside a band";
    return v;
  }

  for (const Branch* b : {&pos, &neg}) {
    if (!(b == &pos ? pos_edge : neg_edge)) continue;
    const std::vector<TailPoint> s = b->splits();
    std::vector<double> score;
    for (const TailPoint& p : s) score.push_back(spread_score(p.value));
    const int run = edge_run(score);
    if (run >= opt.min_witness && edge_is_max(score)) {
      v.is_riesz = false;
      v.conclusive = true;
      v.note = "ratios escape monotonically toward the window edge";
      for (std::size_t i = s.size() - std::size_t(run); i < s.size(); ++i)
        v.witness.push_back(s[i].n);
      return v;
    }
  }

  v.note = "band exceeded without a monotone escape toward the edge";
  return v;
}

double floored_ratio(double num, double den, double floor) {
  if (den < floor) return kInf;
  return num / den;
}

}  // namespace

cplx gamma_normalization(cplx inner12, double norm, double tol_pair) {
  if (std::abs(inner12) < tol_pair * std::max(1.0, norm * norm))
    throw NumericalError(
        "gamma_normalization: pairing integral collapsed; no biorthogonal "
        "partner at this scale");
  return 0.5 / std::conj(inner12);
}

EigenfunctionRecord eigenfunction_periodic_type(const FundamentalSolver& solver,
                                                const BcClassification& bc,
                                                cplx lambda, long long n, int j,
                                                const BasisOptions& opt) {
  if (!bc.periodic_type)
    throw PreconditionError(
        "eigenfunction_periodic_type: boundary conditions are not periodic-type");
  const std::size_t m = odd_grid(opt.n_x);
  const std::vector<double> w = simpson_weights(m, pi / double(m - 1));
  const FundamentalMatrix F = solver.solve(lambda, m);
  const Mat2& Epi = F.end();
  const cplx a = bc.periodic_a;

  // Rows of C + D E(pi); the kernel direction of row (u, v) is (v, -u).
  const cplx r1u = 1.0 + a * Epi(0, 0), r1v = a * Epi(0, 1);
  const cplx r2u = Epi(1, 0), r2v = a + Epi(1, 1);
  const double n1 = std::hypot(std::abs(r1u), std::abs(r1v));
  const double n2 = std::hypot(std::abs(r2u), std::abs(r2v));
  const double wscale =
      (1.0 + std::abs(a)) * (1.0 + Epi.cwiseAbs().maxCoeff());
  if (std::max(n1, n2) < opt.tol_vector * wscale)
    throw PreconditionError(
        "eigenfunction_periodic_type: boundary matrix vanishes at this "
        "eigenvalue; the eigenspace is two-dimensional");
  if (std::abs(Epi(0, 1) * Epi(1, 0)) < kDefectFloor)
    throw NumericalError(
        "eigenfunction_periodic_type: branch discriminant e12 e21 vanished; "
        "the pair is defective");

  EigenfunctionRecord rec;
  rec.n = n;
  rec.j = j;
  if (n2 >= n1) {
    rec.alpha = r2v;
    rec.beta = -r2u;
  } else {
    rec.alpha = r1v;
    rec.beta = -r1u;
  }
  const double s = std::hypot(std::abs(rec.alpha), std::abs(rec.beta));
  rec.alpha /= s;
  rec.beta /= s;
  fill_samples(rec, F, w);

  rec.gamma = gamma_normalization(rec.inner12, rec.norm, opt.tol_pair);
  rec.z.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    rec.z[i] = rec.gamma * Vec2(std::conj(rec.y[i](1)), std::conj(rec.y[i](0)));
  // ||z|| = |gamma| ||y|| pointwise, so the product needs no second sum.
  rec.norm_product = std::abs(rec.gamma) * rec.norm * rec.norm;
  return rec;
}

BasisFamily basis_family(const FundamentalSolver& solver,
                         const BcClassification& bc,
                         const SpectrumResult& spectrum,
                         const BasisOptions& opt) {
  if (!bc.periodic_type)
    throw PreconditionError("basis_family: boundary conditions are not periodic-type");
  const std::size_t m = odd_grid(opt.n_x);
  const std::vector<double> w = simpson_weights(m, pi / double(m - 1));
  const cplx a = bc.periodic_a;

  BasisFamily fam;
  fam.bc = bc;
  for (const SpectrumEntry& e : spectrum.entries) {
    if (e.multiplicity == 1) {
      fam.records.push_back(
          eigenfunction_periodic_type(solver, bc, e.lambda, e.n, e.j, opt));
      continue;
    }

    const FundamentalMatrix F = solver.solve(e.lambda, m);
    const Mat2& Epi = F.end();
    const double resid =
        std::abs(1.0 + a * Epi(0, 0)) + std::abs(a * Epi(0, 1)) +
        std::abs(Epi(1, 0)) + std::abs(a + Epi(1, 1));
    const double wscale =
        (1.0 + std::abs(a)) * (1.0 + Epi.cwiseAbs().maxCoeff());
    if (resid > opt.tol_vector * wscale) {
      // Reported double but C + D E(pi) does not vanish: a defective
      // (Jordan) pair, not a two-dimensional eigenspace.
      fam.excluded.push_back(e.n);
      continue;
    }

    // Two-dimensional eigenspace: take the fundamental columns, with the
    // second orthogonalized against the first, as the canonical pair.
    EigenfunctionRecord r1;
    r1.n = e.n;
    r1.j = 1;
    r1.alpha = 1.0;
    r1.beta = 0.0;
    r1.from_double = true;
    fill_samples(r1, F, w);

    EigenfunctionRecord r2;
    r2.n = e.n;
    r2.j = 2;
    r2.alpha = 0.0;
    r2.beta = 1.0;
    r2.from_double = true;
    fill_samples(r2, F, w);
    const cplx proj = hermitian(w, r2.y, r1.y) / (r1.norm * r1.norm);
    r2.alpha = -proj;
    r2.beta = 1.0;
    const double s2 = std::hypot(std::abs(r2.alpha), std::abs(r2.beta));
    r2.alpha /= s2;
    r2.beta /= s2;
    fill_samples(r2, F, w);

    // Biorthogonal partners inside the subspace: with B_ic the bilinear
    // pairing of candidate i against candidate c, the partner weights g_j
    // solve B conj(g_j) = e_j, and z_j = sum_c g_jc (conj yc2, conj yc1).
    const cplx B11 = 2.0 * r1.inner12;
    const cplx B22 = 2.0 * r2.inner12;
    const cplx B12 = bilinear(w, r1.y, r2.y);
    const cplx detB = B11 * B22 - B12 * B12;
    const double pair_scale =
        std::max(1.0, r1.norm * r1.norm * r2.norm * r2.norm);
    if (std::abs(detB) < opt.tol_pair * pair_scale)
      throw NumericalError(
          "basis_family: bilinear pairing is singular on a double eigenspace");
    const cplx g11 = std::conj(B22 / detB), g12 = std::conj(-B12 / detB);
    const cplx g21 = std::conj(-B12 / detB), g22 = std::conj(B11 / detB);

    const std::size_t np = F.x.size();
    r1.z.resize(np);
    r2.z.resize(np);
    for (std::size_t i = 0; i < np; ++i) {
      const Vec2 c1(std::conj(r1.y[i](1)), std::conj(r1.y[i](0)));
      const Vec2 c2(std::conj(r2.y[i](1)), std::conj(r2.y[i](0)));
      r1.z[i] = g11 * c1 + g12 * c2;
      r2.z[i] = g21 * c1 + g22 * c2;
    }
    r1.norm_product = r1.norm * weighted_norm(w, r1.z);
    r2.norm_product = r2.norm * weighted_norm(w, r2.z);

    fam.records.push_back(std::move(r1));
    fam.records.push_back(std::move(r2));
  }

  std::stable_sort(fam.records.begin(), fam.records.end(),
                   [](const EigenfunctionRecord& u, const EigenfunctionRecord& v) {
                     return u.n != v.n ? u.n < v.n : u.j < v.j;
                   });
  if (!fam.records.empty()) {
    fam.min_norm = kInf;
    for (const EigenfunctionRecord& r : fam.records) {
      fam.min_norm = std::min(fam.min_norm, r.norm);
      fam.max_norm = std::max(fam.max_norm, r.norm);
    }
  }
  return fam;
}

BasisVerdict lemma1_criterion(const BasisFamily& family, const BandOptions& opt) {
  std::map<long long, TailPoint> tail;
  for (const EigenfunctionRecord& r : family.records) {
    if (std::llabs(r.n) < opt.n_band) continue;
    if (r.from_double) {
      tail[r.n] = {r.n, 0.0, false};
    } else if (r.j == 1) {
      tail[r.n] = {r.n,
                   floored_ratio(std::abs(r.alpha), std::abs(r.beta), opt.floor),
                   true};
    }
  }
  Branch neg, pos;
  split_branches(tail, neg, pos);
  return band_verdict(BasisMode::lemma1, neg, pos, opt);
}

BasisVerdict lemma2_criterion(const FundamentalSolver& solver,
                              const BcClassification& bc,
                              const SpectrumResult& spectrum,
                              const BandOptions& opt) {
  if (!bc.periodic_type)
    throw PreconditionError(
        "lemma2_criterion: boundary conditions are not periodic-type");
  std::map<long long, std::vector<const SpectrumEntry*>> by_n;
  for (const SpectrumEntry& e : spectrum.entries)
    if (std::llabs(e.n) >= opt.n_band) by_n[e.n].push_back(&e);

  std::map<long long, TailPoint> tail;
  for (const auto& [n, group] : by_n) {
    const bool split = group.size() == 2 && group[0]->multiplicity == 1 &&
                       group[1]->multiplicity == 1;
    if (!split) {
      tail[n] = {n, 0.0, false};
      continue;
    }
    const Mat2 Epi = solver.solve(group[0]->lambda, 2).end();
    tail[n] = {n,
               floored_ratio(std::abs(Epi(0, 1)), std::abs(Epi(1, 0)), opt.floor),
               true};
  }
  Branch neg, pos;
  split_branches(tail, neg, pos);
  return band_verdict(BasisMode::lemma2, neg, pos, opt);
}

bool verdicts_agree(const BasisVerdict& u, const BasisVerdict& v) {
  if (u.conclusive != v.conclusive) return false;
  if (!u.conclusive) return true;
  return u.is_riesz == v.is_riesz;
}

BasisVerdict theorem1_verdict(const FundamentalSolver& solver,
                              const BcClassification& bc,
                              const SpectrumResult& spectrum,
                              const BandOptions& opt, std::size_t n_grid) {
  if (bc.periodic_type)
    throw PreconditionError(
        "theorem1_verdict: periodic-type conditions keep |Delta'| of the "
        "order of the gap; use the coefficient criteria instead");
  if (!bc.coincident_roots)
    throw PreconditionError(
        "theorem1_verdict: characteristic roots must coincide");

  std::map<long long, std::vector<const SpectrumEntry*>> by_n;
  for (const SpectrumEntry& e : spectrum.entries)
    if (std::llabs(e.n) >= opt.n_band) by_n[e.n].push_back(&e);

  std::map<long long, TailPoint> tail;
  for (const auto& [n, group] : by_n) {
    const bool split = group.size() == 2 && group[0]->multiplicity == 1 &&
                       group[1]->multiplicity == 1;
    if (!split) {
      tail[n] = {n, 0.0, false};
      continue;
    }
    // Norm product of the spectral projection at the first branch; bounded
    // exactly when the expansion keeps this pair under control.
    const ResiduePair rp = residue_pair(solver, bc, group[0]->lambda, n_grid);
    tail[n] = {n, rp.frobenius, true};
  }
  Branch neg, pos;
  split_branches(tail, neg, pos);

  BasisVerdict v;
  v.mode = BasisMode::theorem1;
  std::vector<TailPoint> all_splits;
  for (const Branch* b : {&neg, &pos})
    for (const TailPoint& p : b->pts)
      if (p.split) all_splits.push_back(p);
  std::sort(all_splits.begin(), all_splits.end(),
            [](const TailPoint& x, const TailPoint& y) { return x.n < y.n; });
  for (const TailPoint& p : all_splits) v.ratios.push_back({p.n, p.value});
  for (const TailPoint& p : all_splits) {
    if (std::isinf(p.value)) continue;
    v.band_lo = v.band_lo == 0.0 ? p.value : std::min(v.band_lo, p.value);
    v.band_hi = std::max(v.band_hi, p.value);
  }

  if (all_splits.empty()) {
    v.is_riesz = true;
    v.conclusive = true;
    v.note = "tail pairs all merge; the spectrum is asymptotically multiple";
    return v;
  }
  const bool neg_edge = neg.splits_reach_edge(opt.min_witness);
  const bool pos_edge = pos.splits_reach_edge(opt.min_witness);
  if (!neg_edge && !pos_edge) {
    v.is_riesz = true;
    v.conclusive = true;
    v.note = "split pairs die out before the window edge";
    return v;
  }
  if (all_splits.size() < opt.min_tail) {
    v.note = "too few split pairs in the window to classify";
    return v;
  }
  for (const Branch* b : {&pos, &neg}) {
    if (!(b == &pos ? pos_edge : neg_edge)) continue;
    const std::vector<TailPoint> s = b->splits();
    std::vector<double> np;
    for (const TailPoint& p : s) np.push_back(p.value);
    const int run = edge_run(np);
    if (run >= opt.min_witness && edge_is_max(np)) {
      v.is_riesz = false;
      v.conclusive = true;
      v.note = "norm products grow monotonically along the surviving splits";
      for (std::size_t i = s.size() - std::size_t(run); i < s.size(); ++i)
        v.witness.push_back(s[i].n);
      return v;
    }
  }
  v.note =
      "split tail without monotone norm-product growth; the multiplicity and "
      "growth signals disagree";
  return v;
}

ExpansionReport expansion_conditioning(const std::vector<Vec2>& f,
                                       const BasisFamily& family,
                                       long long n_max) {
  if (family.records.empty())
    throw PreconditionError("expansion_conditioning: empty family");
  const std::size_t m = family.records.front().x.size();
  if (f.size() != m)
    throw PreconditionError(
        "expansion_conditioning: f is not sampled on the family grid");
  const std::vector<double> w = simpson_weights(m, pi / double(m - 1));

  ExpansionReport rep;
  double f2 = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    f2 += w[i] * (std::norm(f[i](0)) + std::norm(f[i](1)));
  rep.f_norm = std::sqrt(f2);

  std::map<long long, std::vector<const EigenfunctionRecord*>> blocks;
  for (const EigenfunctionRecord& r : family.records) {
    if (n_max >= 0 && std::llabs(r.n) > n_max) continue;
    blocks[r.n].push_back(&r);
  }
  std::vector<long long> order;
  for (const auto& [n, recs] : blocks) order.push_back(n);
  std::sort(order.begin(), order.end(), [](long long u, long long v) {
    const long long au = std::llabs(u), av = std::llabs(v);
    return au != av ? au < av : u < v;
  });

  std::vector<Vec2> S(m, Vec2::Zero());
  auto push_norms = [&](std::vector<double>& partial, std::vector<double>& err) {
    double s2 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      s2 += w[i] * (std::norm(S[i](0)) + std::norm(S[i](1)));
      const Vec2 d = S[i] - f[i];
      e2 += w[i] * (std::norm(d(0)) + std::norm(d(1)));
    }
    partial.push_back(std::sqrt(s2));
    err.push_back(std::sqrt(e2));
  };

  for (long long n : order) {
    for (const EigenfunctionRecord* r : blocks[n]) {
      cplx c{0.0, 0.0};
      for (std::size_t i = 0; i < m; ++i)
        c += w[i] * (f[i](0) * std::conj(r->z[i](0)) +
                     f[i](1) * std::conj(r->z[i](1)));
      for (std::size_t i = 0; i < m; ++i) S[i] += c * r->y[i];
      rep.terms.push_back({r->n, r->j, std::abs(c), std::abs(c) * r->norm});
      push_norms(rep.partial_plain, rep.err_plain);
    }
    push_norms(rep.partial_paired, rep.err_paired);
  }
  return rep;
}

}  // namespace dirac
