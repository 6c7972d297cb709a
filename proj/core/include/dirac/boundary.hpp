#pragma once

#include <Eigen/Core>

#include "dirac/common.hpp"

namespace dirac {

using Mat2 = Eigen::Matrix2cd;
using Mat24 = Eigen::Matrix<cplx, 2, 4>;

// Two-point boundary conditions U(y) = C y(0) + D y(pi) = 0 are carried as
// the 2x4 block matrix A = [C | D].  Everything downstream depends on A only
// through its 2x2 minors, which transform by a common factor det(T) under
// row operations A -> T A, so classification is scale-invariant.
struct BoundaryMinors {
  cplx A12, A13, A14, A23, A24, A34;

  cplx A32() const { return -A23; }
  cplx A42() const { return -A24; }

  // Largest minor magnitude; the reference scale for tolerance checks.
  double scale() const;
};

enum class PeriodicSubtype { none, generic, periodic, antiperiodic };

struct BcClassification {
  BoundaryMinors minors;

  bool regular = false;           // A14 * A23 != 0
  bool strongly_regular = false;  // regular and (A12+A34)^2 + 4 A14 A23 != 0
  // Regular but not strongly regular: the two characteristic roots coincide
  // and the unperturbed spectrum is a single series of double eigenvalues.
  bool coincident_roots = false;

  // Characteristic roots of A23 z^2 - (A12+A34) z - A14 = 0.  Equal in the
  // coincident case.  Valid only when regular.
  cplx z1{0.0, 0.0}, z2{0.0, 0.0};

  // A13 = A24 = 0 and A12 = A34: row-equivalent to [[1,0,a,0],[0,a,0,1]].
  bool periodic_type = false;
  cplx periodic_a{0.0, 0.0};  // valid only when periodic_type
  PeriodicSubtype subtype = PeriodicSubtype::none;

  // Base point of the unperturbed eigenvalue grid center0 + 2n, n integer:
  // the root of the constant-coefficient characteristic function picked with
  // real part in (-1, 1].  Valid when coincident_roots.
  cplx center0{0.0, 0.0};
};

// [[1,0,a,0],[0,a,0,1]]: minors (a, 0, 1, -a^2, 0, a).  a = -1 is y(0)=y(pi),
// a = 1 is y(0)=-y(pi).
Mat24 periodic_type_matrix(cplx a);

Mat24 from_endpoint_matrices(const Mat2& C, const Mat2& D);

// Throws PreconditionError when rank(A) < 2 (all minors vanish).
BoundaryMinors compute_minors(const Mat24& A);

// tol is relative to the largest minor magnitude.
BcClassification classify(const Mat24& A, double tol = 1e-10);
BcClassification classify(const BoundaryMinors& m, double tol = 1e-10);

// Base point of the unperturbed grid for [[1,0,a,0],[0,a,0,1]], written as
// (arg a + pi)/pi + i ln|a| / pi with arg in (-pi, pi].  tau0(1) = 1,
// tau0(-1) = 2, tau0(2) = 1 + i ln(2)/pi.  For real a this agrees modulo 2
// with the characteristic-root base point; for non-real a it does not, and
// the root-based center0 is what localization uses.
cplx tau0(cplx a);

// center0 + 2n.
cplx unperturbed_eigenvalue(const BcClassification& c, long long n);

}  // namespace dirac
