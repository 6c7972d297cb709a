#include "dirac/spectrum.hpp"

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

using namespace dirac;

namespace {

BcClassification periodic_bc(double a) {
  return classify(periodic_type_matrix(cplx(a, 0.0)));
}

}  // namespace

TEST_CASE("characteristic function against the potential-free closed form") {
  FundamentalSolver solver(zero_potential());
  auto bc = periodic_bc(-1.0);
  CharacteristicFunction F(&solver, bc.minors);
  for (cplx lam : {cplx(0.7, 0.1), cplx(4.3, -0.2), cplx(-11.0, 0.05)}) {
    CHECK(std::abs(F(lam) - delta0(bc.minors, lam)) < 1e-9);
    auto dv = F.with_derivative(lam);
    CHECK(std::abs(dv.ddelta - ddelta0(bc.minors, lam)) < 1e-8);
  }
}

TEST_CASE("free periodic case: double eigenvalues at even integers") {
  FundamentalSolver solver(zero_potential());
  auto bc = periodic_bc(-1.0);
  auto res = locate_eigenvalues(solver, bc, -3, 3);
  REQUIRE(res.complete);
  REQUIRE(res.entries.size() == 7);
  for (const auto& e : res.entries) {
    CHECK(e.multiplicity == 2);
    CHECK(std::abs(e.lambda - cplx(2.0 * double(e.n), 0.0)) < 1e-9);
    CHECK(std::abs(e.eps) < 1e-9);
  }
  CHECK(res.n0 == 0);
}

TEST_CASE("constant periodic case: the k = 0 pair splits, others stay double") {
  // P = Q = 0.3, a = -1: Delta = 2 cos(pi sqrt(lambda^2 - 0.09)) - 2.
  // Roots lambda = +/- sqrt(4k^2 + 0.09); k = 0 gives the simple pair
  // +/- 0.3, every other k a double root.
  const double c = 0.3;
  FundamentalSolver solver(constant_potential(c, c));
  auto bc = periodic_bc(-1.0);
  auto res = locate_eigenvalues(solver, bc, -2, 2);
  REQUIRE(res.complete);

  int simple = 0, dbl = 0;
  for (const auto& e : res.entries) {
    if (e.n == 0) {
      CHECK(e.multiplicity == 1);
      ++simple;
      const double expect = e.j == 1 ? -c : c;
      CHECK(std::abs(e.lambda - cplx(expect, 0.0)) < 1e-9);
    } else {
      CHECK(e.multiplicity == 2);
      ++dbl;
      const double k = double(std::llabs(e.n));
      const double expect = std::sqrt(4.0 * k * k + c * c);
      CHECK(std::abs(std::abs(e.lambda.real()) - expect) < 1e-8);
      CHECK(std::abs(e.lambda.imag()) < 1e-8);
    }
  }
  CHECK(simple == 2);
  CHECK(dbl == 4);
}

TEST_CASE("generic coincident case keeps a complex grid") {
  // a = 2: eigenvalues sit near 1 + i ln(2)/pi + 2n.
  FundamentalSolver solver(zero_potential());
  auto bc = periodic_bc(2.0);
  auto res = locate_eigenvalues(solver, bc, -1, 1);
  REQUIRE(res.complete);
  for (const auto& e : res.entries) {
    CHECK(e.multiplicity == 2);
    CHECK(std::abs(e.eps) < 1e-9);
    CHECK(e.lambda.imag() == doctest::Approx(std::log(2.0) / pi).epsilon(1e-6));
  }
}

TEST_CASE("perturbed smooth potential: winding survives, eps stays small") {
  FundamentalSolver solver(endpoint_smooth_potential());
  auto bc = periodic_bc(-1.0);
  auto res = locate_eigenvalues(solver, bc, 4, 6);
  REQUIRE(res.complete);
  int total_mult = 0;
  for (const auto& e : res.entries) {
    total_mult += e.multiplicity;
    CHECK(std::abs(e.eps) < 0.2);
    CHECK(e.abs_delta < 1e-7);
  }
  CHECK(total_mult == 6);
}

TEST_CASE("strongly regular input is rejected by the locator") {
  Mat24 A;
  A << 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0;
  auto bc = classify(A);
  FundamentalSolver solver(zero_potential());
  CHECK_THROWS_AS(locate_eigenvalues(solver, bc, 0, 1), PreconditionError);
}
