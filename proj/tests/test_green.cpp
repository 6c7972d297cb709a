#include "dirac/green.hpp"

#include <Eigen/Dense>

#include "doctest.h"
#include "oracles.hpp"

using namespace dirac;

namespace {

Mat24 coupled_matrix() {
  Mat24 A;
  A << 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, -1.0;
  return A;
}

}  // namespace

TEST_CASE("R satisfies its determinant and trace identities") {
  Potential V = endpoint_smooth_potential();
  FundamentalSolver solver(V);
  BcClassification bc = classify(coupled_matrix());
  for (cplx lam : {cplx(3.3, 0.4), cplx(-11.0, -0.2)}) {
    const Mat2 E_pi = solver.solve(lam).end();
    const Mat2 R = green_R(bc.minors, E_pi);
    const cplx delta = delta_from_end(bc.minors, E_pi);
    CHECK(std::abs(R.determinant() - delta * bc.minors.A12) < 1e-10);
    CHECK(std::abs(R.trace() - (delta + bc.minors.A12 - bc.minors.A34)) <
          1e-10);
  }
}

TEST_CASE("kernel matches its entrywise minor expansion") {
  Potential V = endpoint_smooth_potential();
  FundamentalSolver solver(V);
  BcClassification bc = classify(coupled_matrix());
  const BoundaryMinors& m = bc.minors;
  const cplx lam(3.3, 0.4);
  GreenKernel gk(solver, bc, lam, 33);

  auto EE = [&](std::size_t it, std::size_t ix) {
    Mat2 adj;
    const Mat2& Et = gk.E(it);
    adj << Et(1, 1), -Et(0, 1), -Et(1, 0), Et(0, 0);
    return Mat2(gk.E(ix) * adj);
  };
  const std::size_t end = 32;
  for (std::size_t it : {4UL, 15UL, 27UL})
    for (std::size_t ix : {2UL, 16UL, 30UL}) {
      const Mat2 S = EE(it, ix), P = EE(end, ix);
      const Mat2& Et = gk.E(it);
      const cplx e11 = Et(0, 0), e12 = Et(0, 1), e21 = Et(1, 0),
                 e22 = Et(1, 1);
      // Row j couples through the same two brackets; the second column
      // flips the sign of the direct term.
      Mat2 h;
      for (int j = 0; j < 2; ++j) {
        const cplx b1 = m.A14 * P(j, 0) - m.A13 * P(j, 1);
        const cplx b2 = m.A24 * P(j, 0) - m.A23 * P(j, 1);
        h(j, 0) = m.A12 * S(j, 0) + b1 * e22 - b2 * e21;
        h(j, 1) = -m.A12 * S(j, 1) + b1 * e12 - b2 * e11;
      }
      CHECK((h - gk.H(it, ix)).norm() < 1e-10);
    }
}

TEST_CASE("free kernel has the closed form and vanishes on periodic grids") {
  Potential V = zero_potential();
  FundamentalSolver solver(V);
  BcClassification bc = classify(coupled_matrix());
  const cplx lam(2.7, 0.3);
  GreenKernel gk(solver, bc, lam, 17);
  for (std::size_t it : {3UL, 9UL})
    for (std::size_t ix : {5UL, 14UL}) {
      const Mat2 h0 =
          h0_kernel(bc.minors, lam, gk.grid()[it], gk.grid()[ix]);
      CHECK((h0 - gk.H(it, ix)).norm() < 1e-9);
    }

  // Periodic type: A13 = A24 = 0 makes every entry vanish at every
  // unperturbed eigenvalue, not just the determinant.
  for (cplx a : {cplx(-1.0, 0.0), cplx(2.0, 0.0)}) {
    BcClassification pt = classify(periodic_type_matrix(a));
    for (long long n : {-2LL, 0LL, 5LL}) {
      const cplx lam0 = pt.center0 + 2.0 * double(n);
      for (double t : {0.3, 1.9})
        for (double x : {0.8, 2.9})
          CHECK(h0_kernel(pt.minors, lam0, t, x).norm() < 1e-12);
    }
  }
}

TEST_CASE("resolvent output solves the equation and the conditions") {
  Potential V = endpoint_smooth_potential();
  FundamentalSolver solver(V);
  Mat24 A = coupled_matrix();
  BcClassification bc = classify(A);
  const cplx lam(3.3, 0.4);
  const std::size_t m = 129;
  GreenKernel gk(solver, bc, lam, m);
  const auto& xs = gk.grid();

  std::vector<Vec2> f(m), u(m);
  for (std::size_t i = 0; i < m; ++i) {
    f[i](0) = std::sin(xs[i]) * cplx(1.0, 0.3);
    f[i](1) = std::cos(2.0 * xs[i]);
  }
  for (std::size_t i = 0; i < m; ++i) u[i] = gk.apply(f, i);

  const Mat2 C = A.block<2, 2>(0, 0), D = A.block<2, 2>(0, 2);
  CHECK((C * u.front() + D * u.back()).norm() < 1e-12);

  const double h = xs[1] - xs[0];
  double res = 0.0;
  for (std::size_t i = 2; i + 2 < m; ++i) {
    const Vec2 du =
        (-u[i + 2] + 8.0 * u[i + 1] - 8.0 * u[i - 1] + u[i - 2]) / (12.0 * h);
    Vec2 r;
    r(0) = cplx(0.0, -1.0) * du(0) + V.p(xs[i]) * u[i](1) - lam * u[i](0) -
           f[i](0);
    r(1) = cplx(0.0, 1.0) * du(1) + V.q(xs[i]) * u[i](0) - lam * u[i](1) -
           f[i](1);
    res = std::max(res, r.norm());
  }
  CHECK(res < 1e-5);
}

TEST_CASE("the kernel is invariant under row operations on the conditions") {
  Potential V = endpoint_smooth_potential();
  FundamentalSolver solver(V);
  const cplx lam(3.3, 0.4);
  Mat24 A = coupled_matrix();
  Mat2 T;
  T << 2.0, 1.0, 0.0, 3.0;
  Mat24 TA = T * A;
  GreenKernel g1(solver, classify(A), lam, 17);
  GreenKernel g2(solver, classify(TA), lam, 17);
  for (std::size_t it : {2UL, 8UL, 15UL})
    for (std::size_t ix : {0UL, 7UL, 16UL})
      CHECK((g1.G(it, ix) - g2.G(it, ix)).norm() < 1e-10);
}

TEST_CASE("residue at a simple eigenvalue is rank one") {
  Potential V = endpoint_smooth_potential();
  FundamentalSolver solver(V);
  BcClassification bc = classify(periodic_type_matrix(cplx(-1.0, 0.0)));
  SpectrumResult sr = locate_eigenvalues(solver, bc, 2, 2);
  REQUIRE(sr.entries.size() == 2);

  for (const SpectrumEntry& e : sr.entries) {
    REQUIRE(e.multiplicity == 1);
    ResiduePair rp = residue_pair(solver, bc, e.lambda, 65);
    CHECK(rp.sigma2 / rp.sigma1 < 1e-8);
    CHECK(std::abs(rp.frobenius - rp.sigma1) / rp.sigma1 < 1e-10);

    // ||y||^2 = ||z||^2 = sigma1 under the kernel's weighted splitting.
    const std::size_t m = rp.x.size();
    const std::vector<double> w = simpson_weights(m, pi / double(m - 1));
    double ny2 = 0.0, nz2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      ny2 += w[i] * rp.y[i].squaredNorm();
      nz2 += w[i] * rp.z[i].squaredNorm();
    }
    CHECK(std::abs(ny2 - rp.sigma1) / rp.sigma1 < 1e-10);
    CHECK(std::abs(nz2 - rp.sigma1) / rp.sigma1 < 1e-10);

    // y z^* reproduces i H / Delta'.
    GreenKernel gk(solver, bc, e.lambda, 65);
    const cplx sc = cplx(0.0, 1.0) / rp.ddelta;
    double rec = 0.0;
    for (std::size_t i : {5UL, 20UL, 40UL})
      for (std::size_t l : {3UL, 33UL, 60UL}) {
        const Mat2 K = sc * gk.H(l, i);
        const Mat2 Yz = rp.y[i] * rp.z[l].adjoint();
        rec = std::max(rec, (K - Yz).norm());
      }
    CHECK(rec < 1e-9);
  }
}

TEST_CASE("coincident conditions pin the free diagonal prefactors") {
  // [I | D] with D = [[2,1],[1,2]]: double roots of the unperturbed
  // determinant at real 1 + 2n, and A12 != A34.  At such a root the
  // diagonal prefactors of the free kernel collapse to +-(A12 - A34)/2,
  // making the entry moduli constant and the L2(Omega) norms exactly
  // pi * |A12 - A34| / 2 (and pi * |A13| for the lower-left entry).
  Mat2 C = Mat2::Identity(), D;
  D << 2.0, 1.0, 1.0, 2.0;
  BcClassification bc = classify(from_endpoint_matrices(C, D));
  REQUIRE(bc.coincident_roots);
  REQUIRE_FALSE(bc.periodic_type);
  const auto& m = bc.minors;
  const cplx lam0 = bc.center0;
  CHECK(std::abs(lam0 - cplx(1.0, 0.0)) < 1e-12);

  const cplx i(0.0, 1.0);
  CHECK(std::abs(m.A12 + m.A14 * std::exp(-i * pi * lam0) -
                 0.5 * (m.A12 - m.A34)) < 1e-12);
  CHECK(std::abs(-m.A12 + m.A23 * std::exp(i * pi * lam0) -
                 0.5 * (m.A34 - m.A12)) < 1e-12);

  const std::size_t ng = 65;
  const double h = pi / double(ng - 1);
  const auto w = simpson_weights(ng, h);
  double n11 = 0.0, n21 = 0.0;
  for (std::size_t it = 0; it < ng; ++it)
    for (std::size_t ix = 0; ix < ng; ++ix) {
      const Mat2 h0 = h0_kernel(m, lam0, double(it) * h, double(ix) * h);
      n11 += w[it] * w[ix] * std::norm(h0(0, 0));
      n21 += w[it] * w[ix] * std::norm(h0(1, 0));
    }
  CHECK(std::sqrt(n11) == doctest::Approx(pi).epsilon(1e-12));
  CHECK(std::sqrt(n21) == doctest::Approx(std::abs(m.A13) * pi).epsilon(1e-12));
}

TEST_CASE("perturbed kernel approaches the free kernel along the ladder") {
  // sup |H - H0| at the unperturbed double roots decays like 1/n
  // (measured 0.139 / 0.074 / 0.037 / 0.017 at n = 4, 8, 16, 32).
  Potential V = endpoint_smooth_potential();
  FundamentalSolver solver(V);
  Mat2 C = Mat2::Identity(), D;
  D << 2.0, 1.0, 1.0, 2.0;
  BcClassification bc = classify(from_endpoint_matrices(C, D));
  const std::size_t ng = 65;
  const double h = pi / double(ng - 1);
  std::vector<double> sups;
  for (long long n : {4LL, 8LL, 16LL, 32LL}) {
    const cplx lam = bc.center0 + 2.0 * double(n);
    GreenKernel K(solver, bc, lam, ng);
    double sup = 0.0;
    for (std::size_t it = 0; it < ng; ++it)
      for (std::size_t ix = 0; ix < ng; ++ix) {
        const Mat2 d =
            K.H(it, ix) - h0_kernel(bc.minors, lam, double(it) * h,
                                    double(ix) * h);
        sup = std::max(sup, d.cwiseAbs().maxCoeff());
      }
    sups.push_back(sup);
  }
  for (std::size_t k = 1; k < sups.size(); ++k)
    CHECK(sups[k] < 0.7 * sups[k - 1]);
  CHECK(sups.back() < 0.02);
}

TEST_CASE("the resolvent refuses to evaluate at an eigenvalue") {
  Potential V = zero_potential();
  FundamentalSolver solver(V);
  BcClassification bc = classify(periodic_type_matrix(cplx(-1.0, 0.0)));
  GreenKernel K(solver, bc, cplx(2.0, 0.0), 17);  // lambda = 2 is a double
  CHECK(std::abs(K.delta()) < 1e-12);
  CHECK_THROWS_AS(K.G(3, 5), NumericalError);
  std::vector<Vec2> f(K.grid().size(), Vec2::Ones());
  CHECK_THROWS_AS(K.apply(f, 4), NumericalError);
}

TEST_CASE("grid preconditions are rejected") {
  Potential V = zero_potential();
  FundamentalSolver solver(V);
  BcClassification bc = classify(coupled_matrix());
  CHECK_THROWS_AS(GreenKernel(solver, bc, cplx(1.0, 0.0), 16),
                  PreconditionError);
  CHECK_THROWS_AS(residue_pair(solver, bc, cplx(1.0, 0.0), 1),
                  PreconditionError);
}
