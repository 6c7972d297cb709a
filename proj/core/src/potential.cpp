#include "dirac/potential.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace dirac {

namespace {

cplx mode_omega(const TrigMode& m) { return double(m.k) + m.shift; }

// exp(i omega x) with the integer part of omega reduced mod 2 against x
// expressed in units of pi would be overkill here; plain evaluation is
// accurate enough for |k x| up to ~1e8.
cplx cis_omega(const TrigMode& m, double x) {
  const cplx iwx = cplx(0.0, 1.0) * (double(m.k) * x + m.shift * x);
  return std::exp(iwx);
}

}  // namespace

cplx TrigAffine::eval(double x) const {
  cplx s = c0 + c1 * x;
  for (const TrigMode& m : modes) s += m.coeff * cis_omega(m, x);
  return s;
}

cplx TrigAffine::deriv(double x) const {
  cplx s = c1;
  for (const TrigMode& m : modes)
    s += m.coeff * cplx(0.0, 1.0) * mode_omega(m) * cis_omega(m, x);
  return s;
}

TrigAffine TrigAffine::antiderivative() const {
  if (c1 != 0.0)
    throw PreconditionError("TrigAffine::antiderivative: c1 must be 0");
  TrigAffine r;
  r.c1 = c0;
  for (const TrigMode& m : modes) {
    const cplx w = mode_omega(m);
    if (w == 0.0) {
      r.c1 += m.coeff;
      continue;
    }
    const cplx c = m.coeff / (cplx(0.0, 1.0) * w);
    r.modes.push_back({m.k, m.shift, c});
    r.c0 -= c;
  }
  return r;
}

void TrigAffine::merge_modes(double drop_tol) {
  std::sort(modes.begin(), modes.end(), [](const TrigMode& a, const TrigMode& b) {
    return std::tuple(a.k, a.shift.real(), a.shift.imag()) <
           std::tuple(b.k, b.shift.real(), b.shift.imag());
  });
  std::vector<TrigMode> out;
  for (const TrigMode& m : modes) {
    if (!out.empty() && out.back().k == m.k && out.back().shift == m.shift)
      out.back().coeff += m.coeff;
    else
      out.push_back(m);
  }
  std::erase_if(out, [drop_tol](const TrigMode& m) {
    return std::abs(m.coeff) <= drop_tol;
  });
  // Canonical form keeps no zero-frequency mode.
  std::erase_if(out, [this](const TrigMode& m) {
    if (m.k != 0 || m.shift != 0.0) return false;
    c0 += m.coeff;
    return true;
  });
  modes = std::move(out);
}

double TrigAffine::max_frequency() const {
  double f = 0.0;
  for (const TrigMode& m : modes) f = std::max(f, std::abs(mode_omega(m)));
  return f;
}

bool TrigAffine::is_zero() const {
  if (c0 != 0.0 || c1 != 0.0) return false;
  for (const TrigMode& m : modes)
    if (m.coeff != 0.0) return false;
  return true;
}

TrigAffine trig_product(const TrigAffine& a, const TrigAffine& b) {
  if (a.c1 != 0.0 || b.c1 != 0.0)
    throw PreconditionError("trig_product: factors must have c1 == 0");
  TrigAffine r;
  r.c0 = a.c0 * b.c0;
  for (const TrigMode& m : a.modes)
    r.modes.push_back({m.k, m.shift, m.coeff * b.c0});
  for (const TrigMode& m : b.modes)
    r.modes.push_back({m.k, m.shift, m.coeff * a.c0});
  for (const TrigMode& ma : a.modes)
    for (const TrigMode& mb : b.modes)
      r.modes.push_back({ma.k + mb.k, ma.shift + mb.shift, ma.coeff * mb.coeff});
  r.merge_modes();
  return r;
}

namespace {

struct Segment {
  std::size_t i;  // left node
  double u;       // local coordinate in [0, 1]
  double h;
};

Segment locate(const SampledFunction& f, double t) {
  const std::size_t n = f.x.size();
  const double h = (f.x.back() - f.x.front()) / double(n - 1);
  double s = (t - f.x.front()) / h;
  long long i = (long long)std::floor(s);
  if (i < 0) i = 0;
  if (i > (long long)n - 2) i = (long long)n - 2;
  return {std::size_t(i), s - double(i), h};
}

// Finite-difference tangent at node i (second order at the ends).
cplx tangent(const SampledFunction& f, std::size_t i, double h) {
  const std::size_t n = f.x.size();
  if (i == 0) return (-3.0 * f.v[0] + 4.0 * f.v[1] - f.v[2]) / (2.0 * h);
  if (i == n - 1)
    return (3.0 * f.v[n - 1] - 4.0 * f.v[n - 2] + f.v[n - 3]) / (2.0 * h);
  return (f.v[i + 1] - f.v[i - 1]) / (2.0 * h);
}

}  // namespace

cplx SampledFunction::eval(double t) const {
  const auto [i, u, h] = locate(*this, t);
  if (interp == Interp::linear) return v[i] * (1.0 - u) + v[i + 1] * u;
  const cplx m0 = tangent(*this, i, h);
  const cplx m1 = tangent(*this, i + 1, h);
  const double u2 = u * u, u3 = u2 * u;
  return (2.0 * u3 - 3.0 * u2 + 1.0) * v[i] + (u3 - 2.0 * u2 + u) * h * m0 +
         (-2.0 * u3 + 3.0 * u2) * v[i + 1] + (u3 - u2) * h * m1;
}

cplx SampledFunction::deriv(double t) const {
  const auto [i, u, h] = locate(*this, t);
  if (interp == Interp::linear) return (v[i + 1] - v[i]) / h;
  const cplx m0 = tangent(*this, i, h);
  const cplx m1 = tangent(*this, i + 1, h);
  const double u2 = u * u;
  return ((6.0 * u2 - 6.0 * u) * v[i] + (3.0 * u2 - 4.0 * u + 1.0) * h * m0 +
          (-6.0 * u2 + 6.0 * u) * v[i + 1] + (3.0 * u2 - 2.0 * u) * h * m1) /
         h;
}

cplx Potential::p(double x) const {
  return kind == Kind::trig ? P.eval(x) : Ps.eval(x);
}

cplx Potential::q(double x) const {
  return kind == Kind::trig ? Q.eval(x) : Qs.eval(x);
}

cplx Potential::dp(double x) const {
  return kind == Kind::trig ? P.deriv(x) : Ps.deriv(x);
}

cplx Potential::dq(double x) const {
  return kind == Kind::trig ? Q.deriv(x) : Qs.deriv(x);
}

double Potential::max_frequency() const {
  if (kind == Kind::trig)
    return std::max(P.max_frequency(), Q.max_frequency());
  // Nyquist rate of the sample grid.
  const double h = pi / double(Ps.x.size() - 1);
  return pi / h;
}

bool Potential::is_zero() const {
  return kind == Kind::trig && P.is_zero() && Q.is_zero();
}

Potential zero_potential() {
  Potential V;
  V.name = "zero";
  return V;
}

Potential constant_potential(cplx c1, cplx c2) {
  Potential V;
  V.name = "constant";
  V.P.c0 = c1;
  V.Q.c0 = c2;
  return V;
}

namespace {

// s * sin^2((w/2) x) = s/2 - (s/4) e^{iwx} - (s/4) e^{-iwx}
void add_sin2_half(TrigAffine& f, double s, long long w) {
  f.c0 += 0.5 * s;
  f.modes.push_back({w, 0.0, cplx(-0.25 * s, 0.0)});
  f.modes.push_back({-w, 0.0, cplx(-0.25 * s, 0.0)});
}

}  // namespace

Potential endpoint_smooth_potential(double p_pi, double q_pi, double q2) {
  Potential V;
  V.name = "endpoint_smooth";
  add_sin2_half(V.P, p_pi, 1);
  add_sin2_half(V.Q, q_pi, 1);
  add_sin2_half(V.Q, q2, 2);
  V.P.merge_modes();
  V.Q.merge_modes();
  return V;
}

Potential fourier_potential(const std::vector<cplx>& p_coeffs,
                            const std::vector<cplx>& q_coeffs) {
  auto build = [](const std::vector<cplx>& cs) {
    if (cs.empty() || cs.size() % 2 == 0)
      throw PreconditionError(
          "fourier_potential: coefficient list must have odd length 2M+1");
    TrigAffine f;
    const long long M = (long long)(cs.size() / 2);
    for (long long m = -M; m <= M; ++m) {
      const cplx c = cs[std::size_t(m + M)];
      if (m == 0)
        f.c0 += c;
      else if (c != 0.0)
        f.modes.push_back({2 * m, 0.0, c});
    }
    return f;
  };
  Potential V;
  V.name = "fourier";
  V.P = build(p_coeffs);
  V.Q = build(q_coeffs);
  return V;
}

Potential sampled_potential(SampledFunction P, SampledFunction Q) {
  auto validate = [](const SampledFunction& f) {
    const std::size_t n = f.x.size();
    if (n != f.v.size())
      throw PreconditionError("sampled_potential: x/value size mismatch");
    const std::size_t n_min = f.interp == SampledFunction::Interp::cubic ? 4 : 2;
    if (n < n_min) throw PreconditionError("sampled_potential: too few samples");
    if (std::abs(f.x.front()) > 1e-12 || std::abs(f.x.back() - pi) > 1e-12)
      throw PreconditionError("sampled_potential: grid must cover [0, pi]");
    const double h = (f.x.back() - f.x.front()) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(f.x[i] - double(i) * h) > 1e-9)
        throw PreconditionError("sampled_potential: grid must be uniform");
  };
  validate(P);
  validate(Q);
  if (P.interp != Q.interp)
    throw PreconditionError("sampled_potential: components disagree on interp");
  Potential V;
  V.kind = Potential::Kind::samples;
  V.name = "samples";
  V.smoothness =
      P.interp == SampledFunction::Interp::cubic ? Smoothness::c1 : Smoothness::c0;
  V.Ps = std::move(P);
  V.Qs = std::move(Q);
  return V;
}

}  // namespace dirac
