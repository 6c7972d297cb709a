#include "dirac/fundamental.hpp"

#include <algorithm>
#include <cmath>

namespace dirac {

namespace {

template <int NC>
using MatN = Eigen::Matrix<cplx, 2, NC>;

// dX = M X for the E columns; the variational columns (NC == 4) get an
// extra diag(i, -i) E term.
template <int NC>
inline void rhs(cplx ilam, cplx p, cplx q, const MatN<NC>& X, MatN<NC>& dX) {
  const cplx ip = cplx(0.0, 1.0) * p;
  const cplx iq = cplx(0.0, 1.0) * q;
  dX.row(0) = ilam * X.row(0) - ip * X.row(1);
  dX.row(1) = iq * X.row(0) - ilam * X.row(1);
  if constexpr (NC == 4) {
    dX.template block<1, 2>(0, 2) +=
        cplx(0.0, 1.0) * X.template block<1, 2>(0, 0);
    dX.template block<1, 2>(1, 2) -=
        cplx(0.0, 1.0) * X.template block<1, 2>(1, 0);
  }
}

// Fills buf[0..24] with f at x0 + j*delta.  Trig modes advance by one
// complex multiply per node, re-anchored with a fresh exp each macro step
// so roundoff cannot accumulate across the interval.
struct NodeSampler {
  const Potential* V;
  std::vector<cplx> p_mult, q_mult;  // exp(i omega delta) per mode

  NodeSampler(const Potential& pot, double delta) : V(&pot) {
    if (V->kind != Potential::Kind::trig) return;
    auto mults = [delta](const TrigAffine& f) {
      std::vector<cplx> m;
      m.reserve(f.modes.size());
      for (const TrigMode& md : f.modes) {
        const cplx w = double(md.k) + md.shift;
        m.push_back(std::exp(cplx(0.0, 1.0) * w * delta));
      }
      return m;
    };
    p_mult = mults(pot.P);
    q_mult = mults(pot.Q);
  }

  void fill(const TrigAffine& f, const std::vector<cplx>& mult, double x0,
            double delta, cplx* buf) const {
    for (int j = 0; j <= 24; ++j) buf[j] = f.c0 + f.c1 * (x0 + delta * j);
    for (std::size_t m = 0; m < f.modes.size(); ++m) {
      const TrigMode& md = f.modes[m];
      const cplx w = double(md.k) + md.shift;
      cplx v = md.coeff * std::exp(cplx(0.0, 1.0) * w * x0);
      for (int j = 0; j <= 24; ++j) {
        buf[j] += v;
        v *= mult[m];
      }
    }
  }

  void sample(double x0, double delta, cplx* pb, cplx* qb) const {
    if (V->kind == Potential::Kind::trig) {
      fill(V->P, p_mult, x0, delta, pb);
      fill(V->Q, q_mult, x0, delta, qb);
    } else {
      for (int j = 0; j <= 24; ++j) {
        const double t = std::min(x0 + delta * j, pi);
        pb[j] = V->Ps.eval(t);
        qb[j] = V->Qs.eval(t);
      }
    }
  }
};

constexpr int kLevels[4] = {2, 4, 6, 8};

// One macro step [x0, x0 + H]: four modified-midpoint passes over the
// shared 25-node lattice, then Neville extrapolation in h^2.  Returns the
// |T33 - T32| estimate; X is advanced to T33.
template <int NC>
double macro_step(cplx ilam, const cplx* pb, const cplx* qb, double H,
                  MatN<NC>& X) {
  MatN<NC> T[4][4];
  MatN<NC> d, zprev, zcur, znext;

  for (int lev = 0; lev < 4; ++lev) {
    const int n = kLevels[lev];
    const int stride = 24 / n;
    const double h = H / n;

    rhs<NC>(ilam, pb[0], qb[0], X, d);
    zprev = X;
    zcur = X + h * d;
    for (int m = 1; m < n; ++m) {
      rhs<NC>(ilam, pb[m * stride], qb[m * stride], zcur, d);
      znext = zprev + (2.0 * h) * d;
      zprev = zcur;
      zcur = znext;
    }
    rhs<NC>(ilam, pb[24], qb[24], zcur, d);
    T[lev][0] = 0.5 * (zcur + zprev + h * d);

    for (int j = 1; j <= lev; ++j) {
      const double r = double(kLevels[lev]) / double(kLevels[lev - j]);
      T[lev][j] =
          T[lev][j - 1] + (T[lev][j - 1] - T[lev - 1][j - 1]) / (r * r - 1.0);
    }
  }

  const double est = (T[3][3] - T[3][2]).norm();
  X = T[3][3];
  return est;
}

}  // namespace

FundamentalSolver::FundamentalSolver(Potential V, SolveOptions opt)
    : V_(std::move(V)), opt_(opt) {
  if (opt_.tol <= 0.0 || opt_.h_max <= 0.0 || opt_.c_lambda <= 0.0 ||
      opt_.c_osc <= 0.0)
    throw PreconditionError("FundamentalSolver: options must be positive");
}

template <int NC>
FundamentalMatrix FundamentalSolver::run(cplx lambda, std::size_t n_out) const {
  if (n_out < 2) throw PreconditionError("solve: n_out must be >= 2");

  const double H_target =
      std::min({opt_.h_max, opt_.c_lambda / (1.0 + std::abs(lambda)),
                opt_.c_osc / (1.0 + V_.max_frequency())});
  const std::size_t segs = n_out - 1;
  std::size_t per_seg =
      std::max<std::size_t>(1, (std::size_t)std::ceil(pi / (H_target * segs)));

  const cplx ilam = cplx(0.0, 1.0) * lambda;

  for (int refine = 0;; ++refine, per_seg *= 2) {
    const std::size_t n_macro = per_seg * segs;
    const double H = pi / double(n_macro);
    const double delta = H / 24.0;
    const NodeSampler sampler(V_, delta);

    FundamentalMatrix out;
    out.lambda = lambda;
    out.x = linspace(0.0, pi, n_out);
    out.E.reserve(n_out);
    if constexpr (NC == 4) out.Elam.reserve(n_out);
    out.n_macro = n_macro;
    out.refinements = refine;

    MatN<NC> X = MatN<NC>::Zero();
    X(0, 0) = 1.0;
    X(1, 1) = 1.0;

    auto record = [&](const MatN<NC>& S) {
      out.E.push_back(S.template block<2, 2>(0, 0));
      if constexpr (NC == 4)
        out.Elam.push_back(S.template block<2, 2>(0, 2));
    };
    record(X);

    cplx pb[25], qb[25];
    double est_total = 0.0;
    double max_norm = 1.0;
    bool ok = true;

    // tol is relative to the largest ||E|| seen; E can grow like
    // e^{|Im lambda| x}, and absolute accuracy at that scale is what the
    // downstream root-finding sees.
    for (std::size_t s = 0; s < n_macro; ++s) {
      sampler.sample(double(s) * H, delta, pb, qb);
      est_total += macro_step<NC>(ilam, pb, qb, H, X);
      max_norm = std::max(max_norm, X.norm());
      if (est_total > opt_.tol * max_norm) {
        ok = false;
        break;
      }
      if ((s + 1) % per_seg == 0) record(X);
    }

    if (ok) {
      out.est_error = est_total;
      return out;
    }
    if (refine >= opt_.max_refine)
      throw NumericalError(
          "fundamental solve: error estimate stayed above tol after " +
          std::to_string(opt_.max_refine) + " refinements");
  }
}

FundamentalMatrix FundamentalSolver::solve(cplx lambda, std::size_t n_out) const {
  return run<2>(lambda, n_out);
}

FundamentalMatrix FundamentalSolver::solve_with_dlambda(cplx lambda,
                                                        std::size_t n_out) const {
  return run<4>(lambda, n_out);
}

}  // namespace dirac
