#include "doctest.h"

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "dirac/asymptotic.hpp"
#include "dirac/boundary.hpp"
#include "dirac/counterexample.hpp"
#include "dirac/fundamental.hpp"

using namespace dirac;

namespace {

cplx bump_source(double x) {
  const double s = std::sin(0.5 * x);
  return 0.45 * s * s;
}

ShapedSource shaped_default() { return shape_source(bump_source, 0.5); }

}  // namespace

TEST_CASE("endpoint bump vanishes at zero and hits its target at pi") {
  auto se = smooth_endpoint_potential([](double) { return cplx(0.0, 0.0); }, 1.0);
  CHECK(std::abs(se.g.eval(0.0)) == 0.0);
  CHECK(se.end_value.real() == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(std::abs(se.g.eval(pi) - se.end_value) < 1e-12);
  CHECK(se.closeness < 0.5);
  // the bump lives in a collar at pi, so the L1 cost is tiny
  CHECK(se.closeness == doctest::Approx(0.0245437).epsilon(1e-4));
  CHECK(se.delta == doctest::Approx(pi / 8.0).epsilon(1e-12));
}

TEST_CASE("endpoint smoothing of a constant only pays for the collar at zero") {
  auto se = smooth_endpoint_potential([](double) { return cplx(1.0, 0.0); }, 1.0);
  CHECK(std::abs(se.g.eval(0.0)) == 0.0);
  CHECK(std::abs(se.end_value - cplx(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(se.g.eval(pi / 2.0) - cplx(1.0, 0.0)) < 1e-12);
  // L1 distance of the ramped collar from the constant is delta/2
  CHECK(se.closeness == doctest::Approx(se.delta / 2.0).epsilon(1e-6));
  CHECK(se.closeness < 0.5);
}

TEST_CASE("shaping pins both endpoints at an eps/10 cost") {
  auto src = shaped_default();
  CHECK(std::abs(src.S(0.0)) == 0.0);
  CHECK(std::abs(src.S(pi)) == 0.0);
  CHECK(src.closeness < 0.05);
  CHECK(src.closeness == doctest::Approx(0.0442416).epsilon(1e-4));
  CHECK(src.S(1.0).real() == doctest::Approx(0.1034529031).epsilon(1e-6));
}

TEST_CASE("truncation stops at the first partial sum inside the budget") {
  auto src = shaped_default();
  auto tr = fourier_truncate(src, 0.5);
  CHECK(tr.N == 9);
  CHECK(tr.remainder_sup < 0.05);
  CHECK(tr.end0 < 0.05);
  CHECK(tr.endpi < 0.05);
  CHECK(tr.alpha.size() == 10);
  CHECK(tr.beta.size() == 9);
  CHECK(tr.alpha[0].real() == doctest::Approx(0.2109375).epsilon(1e-5));
  // a real source pairs its two frequency rails by conjugation
  for (std::size_t m = 1; m < tr.alpha.size(); ++m)
    CHECK(std::abs(tr.alpha[m] - std::conj(tr.beta[m - 1])) < 1e-12);
  // the packaged derivative is the mode-by-mode derivative
  TrigAffine f = tr.fn(), df = tr.dfn();
  for (int i = 1; i < 20; ++i) {
    const double x = pi * i / 20.0;
    CHECK(std::abs(f.deriv(x) - df.eval(x)) < 1e-10);
  }
  CHECK_THROWS_AS(fourier_truncate(src, 0.5, 2), NumericalError);
}

TEST_CASE("gap ratio and index sequence at full scale") {
  CHECK(plan_gap_ratio(4, 0.5, cplx(1.0, 0.0)) == 50800);
  auto plan = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 4);
  CHECK(plan.C == 50800);
  CHECK_FALSE(plan.desk_scale);
  REQUIRE(plan.a_seq.size() == 4);
  CHECK(plan.a_seq[0] == 4);
  CHECK(plan.a_seq[1] == 203200);
  CHECK(plan.a_seq[2] == 10322560000LL);
  CHECK(plan.a_seq[3] == 524386048000000LL);
  CHECK(plan.cert.recip_ok);
  CHECK(plan.cert.gap_ok);
  CHECK(plan.cert.theta_ok);
  CHECK(plan.cert.recip_sqrt_sum == doctest::Approx(0.00222828).epsilon(1e-4));
  // one more index overflows 64-bit arithmetic
  CHECK_THROWS_AS(lacunary_plan(4, 0.5, cplx(1.0, 0.0), 5), PreconditionError);
}

TEST_CASE("compressed ratio keeps the gap certificate but loses the sum bound") {
  auto plan = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 4, 40);
  CHECK(plan.C == 40);
  CHECK(plan.desk_scale);
  REQUIRE(plan.a_seq.size() == 4);
  CHECK(plan.a_seq[1] == 160);
  CHECK(plan.a_seq[2] == 6400);
  CHECK(plan.a_seq[3] == 256000);
  CHECK(plan.cert.recip_sqrt_sum == doctest::Approx(0.0935334).epsilon(1e-4));
  CHECK_FALSE(plan.cert.recip_ok);  // reported, not enforced, at this scale
  CHECK(plan.cert.gap_ok);
  for (double g : plan.cert.gap_scaled) CHECK(g < 0.06);
  CHECK_FALSE(plan.cert.theta_ok);
}

TEST_CASE("a two-index plan carries a single resonant mode") {
  auto plan = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 2, 40);
  REQUIRE(plan.a_seq.size() == 2);
  CHECK(plan.a_seq[1] == 160);
  auto modes = theta_modes(plan);
  REQUIRE(modes.modes.size() == 1);
  CHECK(modes.modes[0].k == 640);
  CHECK(std::abs(modes.modes[0].shift - cplx(2.0, 0.0)) < 1e-15);
  CHECK(std::abs(theta(0.3, plan)) ==
        doctest::Approx(1.0 / std::sqrt(160.0)).epsilon(1e-14));
}

TEST_CASE("companion factor is flat at zero and sizeable at pi") {
  auto q = companion_default();
  CHECK(std::abs(q.eval(0.0)) < 1e-15);
  CHECK(std::abs(q.eval(pi) - cplx(0.6, 0.0)) < 1e-12);
}

TEST_CASE("corrected component interpolates its own antiderivative residue") {
  auto tr = fourier_truncate(shaped_default(), 0.5);
  auto plan = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 4, 40);
  auto built = build_p_tilde(tr, plan);

  // both endpoints sit at the floating floor by construction
  CHECK(built.end0_abs < 1e-14);
  CHECK(built.endpi_abs < 1e-14);
  // the modulation has even integer frequencies, so the net drift across
  // the interval cancels and the ramp is pure roundoff
  CHECK(std::abs(built.F0_slope) < 1e-14);
  CHECK(std::abs(built.F_at_0 - built.F_at_pi) < 1e-15);
  CHECK(std::abs(built.F_at_0) == doctest::Approx(0.0243251).epsilon(1e-4));

  CHECK(built.closeness_S < 0.2);
  CHECK(built.closeness < 0.25);
  CHECK(built.closeness_S == doctest::Approx(0.0784459).epsilon(1e-4));
  CHECK(built.closeness == doctest::Approx(0.120697).epsilon(1e-4));

  // P' = S_N' + theta - slope pointwise
  for (int i = 1; i < 30; ++i) {
    const double x = pi * i / 30.0;
    const cplx expect = built.S_N.deriv(x) + theta(x, plan) - built.F0_slope;
    CHECK(std::abs(built.P_tilde.deriv(x) - expect) < 1e-12);
  }

  auto V = built.V();
  CHECK(V.kind == Potential::Kind::trig);
  CHECK(std::abs(V.q(pi) - cplx(0.6, 0.0)) < 1e-12);
  CHECK(V.max_frequency() > 1.0e6);
}

TEST_CASE("full-scale build passes its internal closeness chain") {
  auto tr = fourier_truncate(shaped_default(), 0.5);
  auto plan = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 4);
  // construction throws if any link of the chain fails at this scale
  auto built = build_p_tilde(tr, plan);
  CHECK(built.closeness_S == doctest::Approx(0.0784433).epsilon(1e-4));
  CHECK(built.closeness == doctest::Approx(0.120694).epsilon(1e-4));
  CHECK(built.endpi_abs < 1e-14);
}

TEST_CASE("ratio divergence along the compressed plan") {
  auto tr = fourier_truncate(shaped_default(), 0.5);
  auto plan = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 4, 40);
  auto built = build_p_tilde(tr, plan);
  auto rep = verify_divergence(built, built.plan, {1, 2, 3});
  REQUIRE(rep.points.size() == 3);

  const double e12[] = {3.86858105427e-4, 1.53386091395e-6, 6.06357962726e-9};
  const double e21[] = {9.34019281735e-4, 2.34355284999e-5, 5.85936390452e-7};
  const double ratio[] = {2.41437175189, 15.2787832891, 96.6320929996};
  for (int i = 0; i < 3; ++i) {
    const auto& p = rep.points[i];
    CHECK_FALSE(p.from_ode);
    CHECK(p.entry_corrected == doctest::Approx(e12[i]).epsilon(1e-8));
    CHECK(p.entry_companion == doctest::Approx(e21[i]).epsilon(1e-8));
    CHECK(p.ratio == doctest::Approx(ratio[i]).epsilon(1e-8));
    // the corrected entry decays at the three-halves rate with constant pi/4
    CHECK(p.corrected_scaled > 0.7);
    CHECK(p.corrected_scaled < 0.9);
    CHECK(p.i1_scaled > 3.0);
    CHECK(p.i1_scaled < 4.0);
    CHECK(p.i2_scaled < 1e-6);
    CHECK(p.f0_scaled < 1e-18);
  }
  CHECK(rep.points[2].corrected_scaled == doctest::Approx(pi / 4.0).epsilon(1e-4));

  CHECK(rep.slope_corrected == doctest::Approx(-1.5).epsilon(0.1));
  CHECK(rep.slope_ratio == doctest::Approx(0.5).epsilon(0.1));
  CHECK(rep.slope_corrected == doctest::Approx(-1.49958).epsilon(1e-4));
  CHECK(rep.slope_ratio == doctest::Approx(0.50008).epsilon(1e-4));
  CHECK(rep.conclusive);
  CHECK_FALSE(rep.verdict.is_riesz);
  CHECK(rep.verdict.conclusive);
  CHECK(rep.verdict.witness.size() == 3);
  CHECK(rep.c7 < 1e-18);

  // the report only accepts the plan it was built from
  auto other = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 2, 40);
  CHECK_THROWS_AS(verify_divergence(built, other, {1}), PreconditionError);
}

TEST_CASE("divergence rate survives nine decades of index growth") {
  auto tr = fourier_truncate(shaped_default(), 0.5);
  auto plan = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 4);
  auto built = build_p_tilde(tr, plan);
  auto rep = verify_divergence(built, built.plan, {1, 2, 3});
  REQUIRE(rep.points.size() == 3);
  CHECK(rep.points[2].a == 524386048000000LL);
  CHECK(rep.slope_corrected == doctest::Approx(-1.5).epsilon(1e-5));
  CHECK(rep.slope_ratio == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(rep.points[1].i1_scaled == doctest::Approx(pi).epsilon(1e-7));
  CHECK(rep.points[2].i1_scaled == doctest::Approx(pi).epsilon(1e-7));
  CHECK(rep.points[0].ratio < rep.points[1].ratio);
  CHECK(rep.points[1].ratio < rep.points[2].ratio);
  CHECK(rep.conclusive);
}

TEST_CASE("integrator route and closed forms agree on a one-mode plan") {
  auto tr = fourier_truncate(shaped_default(), 0.5);
  auto plan = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 2, 40);
  auto built = build_p_tilde(tr, plan);
  CHECK(built.V().max_frequency() < 1500.0);

  auto rep = verify_divergence(built, built.plan, {1});
  REQUIRE(rep.points.size() == 1);
  const auto& p = rep.points[0];
  CHECK(p.from_ode);
  CHECK(p.lambda1.value().real() == doctest::Approx(321.000133589).epsilon(1e-9));
  CHECK(p.entry_corrected == doctest::Approx(3.86861070825e-4).epsilon(1e-6));
  CHECK(p.entry_companion == doctest::Approx(9.35143442445e-4).epsilon(1e-6));
  CHECK(p.i2_scaled == 0.0);

  // the closed-form route lands on the same pair and entries
  auto bc = classify(periodic_type_matrix(cplx(1.0, 0.0)));
  AsymptoticModel model(built.V());
  auto pair = locate_pair_asymptotic(model, bc, plan.a_seq[1]);
  REQUIRE(pair.first.converged);
  auto e = model.entries_end(pair.first.lambda);
  CHECK(std::abs(pair.first.lambda.value().real() - p.lambda1.value().real()) <
        1e-6);
  CHECK(std::abs(e.e12) == doctest::Approx(p.entry_corrected).epsilon(1e-4));
  CHECK(std::abs(e.e21) == doctest::Approx(p.entry_companion).epsilon(5e-3));

  // fundamental matrix stays unimodular across the lacunary potential
  FundamentalSolver solver(built.V());
  auto F = solver.solve(p.lambda1.value(), 9);
  for (const auto& E : F.E)
    CHECK(std::abs(E.determinant() - 1.0) < 1e-10);
}

TEST_CASE("oscillatory integral closed form matches a frozen quadrature") {
  auto tr = fourier_truncate(shaped_default(), 0.5);
  auto plan = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 4, 40);
  auto built = build_p_tilde(tr, plan);
  auto rep = verify_divergence(built, built.plan, {1});
  REQUIRE(rep.points.size() == 1);
  auto est = integral_estimates(built.plan, 1, rep.points[0].lambda1);
  // value pinned against a 3.2M-node Simpson rule of theta e^{-2 i lambda t}
  CHECK(est.I0.real() == doctest::Approx(0.248514143203).epsilon(1e-9));
  CHECK(est.I0.imag() == doctest::Approx(-0.000104303131142).epsilon(1e-6));
  CHECK(est.i1_scaled == doctest::Approx(3.14348317536).epsilon(1e-9));
  CHECK(est.i1_band_ok);

  auto one = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 2, 40);
  CHECK_THROWS_AS(integral_estimates(one, 2, rep.points[0].lambda1),
                  PreconditionError);
}

TEST_CASE("end entries with a ramp component track the integrator") {
  auto tr = fourier_truncate(shaped_default(), 0.5);
  auto plan = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 2, 40);
  auto built = build_p_tilde(tr, plan);
  AsymptoticModel model(built.V());
  FundamentalSolver solver(built.V());
  for (long long n : {24LL, 48LL}) {
    const cplx lam = 1.0 + 2.0 * double(n);
    const Mat2 E = solver.solve(lam, 2).end();
    auto e = model.entries(pi, lam);
    const double tol = (n == 24) ? 1e-4 : 2e-5;
    CHECK(std::abs(E(0, 0) - e.e11) < tol);
    CHECK(std::abs(E(0, 1) - e.e12) < tol);
    CHECK(std::abs(E(1, 0) - e.e21) < tol);
    CHECK(std::abs(E(1, 1) - e.e22) < tol);
  }
}

TEST_CASE("argument validation refuses nonsense plans") {
  CHECK_THROWS_AS(lacunary_plan(0, 0.5, cplx(1.0, 0.0), 2), PreconditionError);
  CHECK_THROWS_AS(lacunary_plan(4, 0.0, cplx(1.0, 0.0), 2), PreconditionError);
  CHECK_THROWS_AS(lacunary_plan(4, 1.5, cplx(1.0, 0.0), 2), PreconditionError);
  CHECK_THROWS_AS(lacunary_plan(4, 0.5, cplx(1.0, 0.0), 0), PreconditionError);
  CHECK_THROWS_AS(lacunary_plan(4, 0.5, cplx(1.0, 0.0), 3, 1), PreconditionError);
  CHECK_THROWS_AS(smooth_endpoint_potential([](double) { return cplx(0.0, 0.0); }, 0.0),
                  PreconditionError);
  CHECK_THROWS_AS(shape_source(bump_source, -1.0), PreconditionError);
}
