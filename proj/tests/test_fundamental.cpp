#include "dirac/fundamental.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace dirac;

TEST_CASE("free system reproduces plane waves") {
  FundamentalSolver solver(zero_potential());
  for (cplx lam : {cplx(0.0, 0.0), cplx(3.0, 0.0), cplx(17.5, 0.4),
                   cplx(-60.0, -0.3)}) {
    auto F = solver.solve(lam, 9);
    for (std::size_t i = 0; i < F.x.size(); ++i) {
      const Mat2 exact = oracle::free_E(lam, F.x[i]);
      CHECK((F.E[i] - exact).norm() < 5e-11 * exact.norm());
    }
  }
}

TEST_CASE("constant potential matches the closed form") {
  const cplx c1(0.7, 0.2), c2(-0.4, 0.5);
  FundamentalSolver solver(constant_potential(c1, c2));
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> ux(0.1, pi);
  std::uniform_real_distribution<double> ul(-40.0, 40.0);
  std::uniform_real_distribution<double> ui(-0.8, 0.8);
  for (int trial = 0; trial < 10; ++trial) {
    const cplx lam(ul(rng), ui(rng));
    auto F = solver.solve(lam, 65);
    // pick the grid point nearest a random x
    const double x = ux(rng);
    std::size_t i = std::size_t(std::lround(x / pi * 64.0));
    const Mat2 exact = oracle::constant_E(lam, c1, c2, F.x[i]);
    CHECK((F.E[i] - exact).norm() < 1e-9 * std::max(1.0, exact.norm()));
  }
}

TEST_CASE("determinant stays at one") {
  auto V = endpoint_smooth_potential();
  FundamentalSolver solver(V);
  for (cplx lam : {cplx(0.3, 0.0), cplx(12.0, 0.5), cplx(-33.3, -0.2)}) {
    auto F = solver.solve(lam, 17);
    for (const Mat2& E : F.E) {
      const cplx det = E(0, 0) * E(1, 1) - E(0, 1) * E(1, 0);
      CHECK(std::abs(det - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("variational solution matches finite differences") {
  FundamentalSolver solver(endpoint_smooth_potential());
  const cplx lam(7.3, 0.21);
  const double h = 1e-5;
  auto F = solver.solve_with_dlambda(lam, 5);
  auto Fp = solver.solve(lam + h, 5);
  auto Fm = solver.solve(lam - h, 5);
  for (std::size_t i = 0; i < F.x.size(); ++i) {
    const Mat2 fd = (Fp.E[i] - Fm.E[i]) / (2.0 * h);
    CHECK((F.Elam[i] - fd).norm() < 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("sampled potential agrees with its trig original") {
  // Sample the smooth builtin finely, then compare solves.
  auto V = endpoint_smooth_potential();
  const std::size_t n = 1001;
  SampledFunction P, Q;
  P.x = linspace(0.0, pi, n);
  Q.x = P.x;
  for (double x : P.x) {
    P.v.push_back(V.p(x));
    Q.v.push_back(V.q(x));
  }
  FundamentalSolver st(V), ss(sampled_potential(P, Q));
  for (cplx lam : {cplx(2.2, 0.0), cplx(-9.0, 0.3)}) {
    const Mat2 Et = st.solve(lam).end();
    const Mat2 Es = ss.solve(lam).end();
    CHECK((Et - Es).norm() < 1e-7);
  }
}

TEST_CASE("output grid aligns with requested points") {
  FundamentalSolver solver(zero_potential());
  auto F = solver.solve(cplx(5.0, 0.0), 33);
  REQUIRE(F.x.size() == 33);
  CHECK(F.x.front() == 0.0);
  CHECK(F.x.back() == pi);
  CHECK(F.E.size() == 33);
  CHECK(F.n_macro % 32 == 0);
}

TEST_CASE("error estimate is reported and small") {
  FundamentalSolver solver(endpoint_smooth_potential());
  auto F = solver.solve(cplx(25.0, 0.0));
  CHECK(F.est_error < solver.options().tol);
  CHECK(F.est_error > 0.0);
}
