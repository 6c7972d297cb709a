#include "dirac/boundary.hpp"

#include <algorithm>
#include <cmath>

namespace dirac {

namespace {

// Principal log with the tie arg = -pi moved to +pi, so the branch cut
// convention matches arg in (-pi, pi].
cplx log_principal_upper(cplx z) {
  cplx lz = std::log(z);
  if (lz.imag() == -pi) lz = cplx(lz.real(), pi);
  return lz;
}

}  // namespace

double BoundaryMinors::scale() const {
  double s = 0.0;
  for (cplx m : {A12, A13, A14, A23, A24, A34}) s = std::max(s, std::abs(m));
  return s;
}

Mat24 periodic_type_matrix(cplx a) {
  Mat24 A;
  A << 1.0, 0.0, a, 0.0,
       0.0, a, 0.0, 1.0;
  return A;
}

Mat24 from_endpoint_matrices(const Mat2& C, const Mat2& D) {
  Mat24 A;
  A << C, D;
  return A;
}

BoundaryMinors compute_minors(const Mat24& A) {
  auto minor = [&A](int i, int j) {
    return A(0, i) * A(1, j) - A(0, j) * A(1, i);
  };
  BoundaryMinors m;
  m.A12 = minor(0, 1);
  m.A13 = minor(0, 2);
  m.A14 = minor(0, 3);
  m.A23 = minor(1, 2);
  m.A24 = minor(1, 3);
  m.A34 = minor(2, 3);
  if (m.scale() == 0.0)
    throw PreconditionError("boundary matrix has rank < 2");
  return m;
}

BcClassification classify(const Mat24& A, double tol) {
  return classify(compute_minors(A), tol);
}

BcClassification classify(const BoundaryMinors& m, double tol) {
  if (tol <= 0.0) throw PreconditionError("classify: tol must be positive");
  BcClassification c;
  c.minors = m;
  const double s = m.scale();
  if (s == 0.0) throw PreconditionError("boundary matrix has rank < 2");

  c.regular = std::abs(m.A14) > tol * s && std::abs(m.A23) > tol * s;
  if (!c.regular) return c;

  const cplx trace = m.A12 + m.A34;
  const cplx disc = trace * trace + 4.0 * m.A14 * m.A23;
  c.strongly_regular = std::abs(disc) > tol * s * s;
  c.coincident_roots = !c.strongly_regular;

  if (c.coincident_roots) {
    c.z1 = c.z2 = trace / (2.0 * m.A23);
  } else {
    const cplx sq = std::sqrt(disc);
    c.z1 = (trace + sq) / (2.0 * m.A23);
    c.z2 = (trace - sq) / (2.0 * m.A23);
  }

  c.periodic_type = std::abs(m.A13) <= tol * s && std::abs(m.A24) <= tol * s &&
                    std::abs(m.A12 - m.A34) <= tol * s;
  if (c.periodic_type) {
    // Row-equivalent to [[1,0,a,0],[0,a,0,1]] whose minors are
    // (a, 0, 1, -a^2, 0, a) up to one common factor, so a = A12/A14.
    c.periodic_a = m.A12 / m.A14;
    const double tol_a = 100.0 * tol * (1.0 + std::abs(c.periodic_a));
    if (std::abs(c.periodic_a + 1.0) <= tol_a)
      c.subtype = PeriodicSubtype::periodic;
    else if (std::abs(c.periodic_a - 1.0) <= tol_a)
      c.subtype = PeriodicSubtype::antiperiodic;
    else
      c.subtype = PeriodicSubtype::generic;
  }

  if (c.coincident_roots) {
    // Unperturbed eigenvalues solve e^{i pi lambda} = z1 (double roots):
    // lambda = -(i/pi) Log z1 + 2n.  Re(center0) lands in (-1, 1].
    c.center0 = cplx(0.0, -1.0) * log_principal_upper(c.z1) / pi;
  }
  return c;
}

cplx tau0(cplx a) {
  if (a == 0.0) throw PreconditionError("tau0: a must be nonzero");
  double phi = std::arg(a);
  if (phi == -pi) phi = pi;
  return cplx((phi + pi) / pi, std::log(std::abs(a)) / pi);
}

cplx unperturbed_eigenvalue(const BcClassification& c, long long n) {
  if (!c.coincident_roots)
    throw PreconditionError(
        "unperturbed_eigenvalue: needs the coincident-root case");
  return c.center0 + 2.0 * double(n);
}

}  // namespace dirac
