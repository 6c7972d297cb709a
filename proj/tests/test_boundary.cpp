#include "dirac/boundary.hpp"

#include <cmath>

#include "doctest.h"

using namespace dirac;

namespace {
bool close_to(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) <= tol; }
}  // namespace

TEST_CASE("minors of the canonical one-parameter matrix") {
  const cplx a(-1.0, 0.0);
  auto m = compute_minors(periodic_type_matrix(a));
  CHECK(close_to(m.A12, a));
  CHECK(close_to(m.A13, 0.0));
  CHECK(close_to(m.A14, 1.0));
  CHECK(close_to(m.A23, -a * a));
  CHECK(close_to(m.A24, 0.0));
  CHECK(close_to(m.A34, a));
  CHECK(close_to(m.A32(), a * a));
  CHECK(close_to(m.A42(), 0.0));
}

TEST_CASE("minors are scale-covariant under row operations") {
  const cplx a(0.7, 0.3);
  Mat24 A = periodic_type_matrix(a);
  Mat2 T;
  T << cplx(2.0, 1.0), cplx(0.0, -0.5), cplx(1.0, 0.0), cplx(1.0, 1.0);
  Mat24 TA = T * A;
  auto m0 = compute_minors(A);
  auto m1 = compute_minors(TA);
  const cplx d = T(0, 0) * T(1, 1) - T(0, 1) * T(1, 0);
  CHECK(close_to(m1.A12, d * m0.A12, 1e-12));
  CHECK(close_to(m1.A14, d * m0.A14, 1e-12));
  CHECK(close_to(m1.A23, d * m0.A23, 1e-12));
  CHECK(close_to(m1.A34, d * m0.A34, 1e-12));
}

TEST_CASE("rank-deficient matrices are rejected") {
  Mat24 A;
  A << 1.0, 2.0, 3.0, 4.0, 2.0, 4.0, 6.0, 8.0;
  CHECK_THROWS_AS(compute_minors(A), PreconditionError);
}

TEST_CASE("classification of the two endpoint-identification conditions") {
  // y(0) = y(pi)
  Mat2 C = Mat2::Identity(), D = -Mat2::Identity();
  auto c = classify(from_endpoint_matrices(C, D));
  CHECK(c.regular);
  CHECK_FALSE(c.strongly_regular);
  CHECK(c.coincident_roots);
  CHECK(c.periodic_type);
  CHECK(c.subtype == PeriodicSubtype::periodic);
  CHECK(close_to(c.periodic_a, -1.0));
  CHECK(close_to(c.center0, 0.0));
  CHECK(close_to(c.z1, 1.0));

  // y(0) = -y(pi)
  auto ca = classify(from_endpoint_matrices(Mat2::Identity(), Mat2::Identity()));
  CHECK(ca.periodic_type);
  CHECK(ca.subtype == PeriodicSubtype::antiperiodic);
  CHECK(close_to(ca.periodic_a, 1.0));
  CHECK(close_to(ca.center0, 1.0));
}

TEST_CASE("generic coincident-root matrix: a = 2") {
  auto c = classify(periodic_type_matrix(cplx(2.0, 0.0)));
  CHECK(c.regular);
  CHECK(c.coincident_roots);
  CHECK(c.periodic_type);
  CHECK(c.subtype == PeriodicSubtype::generic);
  CHECK(close_to(c.periodic_a, 2.0));
  CHECK(close_to(c.z1, -0.5));
  CHECK(close_to(c.center0, cplx(1.0, std::log(2.0) / pi)));
  CHECK(close_to(unperturbed_eigenvalue(c, 3), cplx(7.0, std::log(2.0) / pi)));
}

TEST_CASE("coupled condition with distinct roots is strongly regular") {
  // minors: A12 = 1, A13 = 0, A14 = -1, A23 = -1, A24 = 0, A34 = -1.
  Mat24 A;
  A << 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, -1.0;
  auto c = classify(A);
  CHECK(c.regular);
  CHECK(c.strongly_regular);
  CHECK_FALSE(c.coincident_roots);
  CHECK_FALSE(c.periodic_type);
  CHECK(close_to(c.z1 * c.z2, -c.minors.A14 / c.minors.A23, 1e-12));
  CHECK(close_to(c.z1 + c.z2, (c.minors.A12 + c.minors.A34) / c.minors.A23, 1e-12));
}

TEST_CASE("irregular condition is flagged") {
  // A14 = 0: rows pick y1(0) and y2(0).
  Mat24 A;
  A << 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0;
  auto c = classify(A);
  CHECK_FALSE(c.regular);
}

TEST_CASE("tau0 reference points") {
  CHECK(close_to(tau0(cplx(1.0, 0.0)), 1.0));
  CHECK(close_to(tau0(cplx(-1.0, 0.0)), 2.0));
  CHECK(close_to(tau0(cplx(2.0, 0.0)), cplx(1.0, std::log(2.0) / pi)));
  CHECK_THROWS_AS(tau0(cplx(0.0, 0.0)), PreconditionError);
}

TEST_CASE("tau0 agrees with the grid base point mod 2 for real a") {
  for (double a : {-3.0, -1.0, -0.4, 0.5, 1.0, 2.0, 7.5}) {
    auto c = classify(periodic_type_matrix(cplx(a, 0.0)));
    const cplx diff = tau0(cplx(a, 0.0)) - c.center0;
    const double r = diff.real() / 2.0;
    CHECK(std::abs(r - std::round(r)) < 1e-12);
    CHECK(std::abs(diff.imag()) < 1e-12);
  }
}
