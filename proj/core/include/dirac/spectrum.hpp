#pragma once

#include <string>
#include <vector>

#include "dirac/boundary.hpp"
#include "dirac/fundamental.hpp"

namespace dirac {

// Entire function whose zeros are the eigenvalues:
//   Delta(lambda) = A12 + A34 - A23 e11 + A13 e12 - A24 e21 + A14 e22,
// entries taken at x = pi.  Equals det(C + D E(pi, lambda)).
cplx delta_from_end(const BoundaryMinors& m, const Mat2& E_pi);
cplx ddelta_from_end(const BoundaryMinors& m, const Mat2& Elam_pi);

// Potential-free characteristic function and its lambda-derivative:
//   Delta0 = (A12 + A34) - A23 e^{i pi lambda} + A14 e^{-i pi lambda}.
cplx delta0(const BoundaryMinors& m, cplx lambda);
cplx ddelta0(const BoundaryMinors& m, cplx lambda);

struct DeltaValue {
  cplx delta;
  cplx ddelta;
  double est_error;
};

// Evaluates Delta (and Delta') by integrating the fundamental system.
class CharacteristicFunction {
 public:
  CharacteristicFunction(const FundamentalSolver* solver, BoundaryMinors m)
      : solver_(solver), m_(m) {}

  cplx operator()(cplx lambda) const;
  DeltaValue with_derivative(cplx lambda) const;
  const BoundaryMinors& minors() const { return m_; }

 private:
  const FundamentalSolver* solver_;
  BoundaryMinors m_;
};

struct LocateOptions {
  double radius = 0.5;
  int contour_points = 32;   // doubled until the phase increments behave
  int max_doublings = 3;
  int max_winding = 6;       // more roots than this in one disk is an error
  double tol_cluster = 1e-8; // closer roots than this merge into a double
  double tol_polish = 1e-11;
  bool polish = true;
};

struct SpectrumEntry {
  long long n = 0;      // grid index: nearest unperturbed point center0 + 2n
  int j = 1;            // branch within the disk, ordered by (Re, Im)
  int multiplicity = 1;
  cplx lambda{0.0, 0.0};
  cplx eps{0.0, 0.0};   // lambda - (center0 + 2n)
  cplx ddelta{0.0, 0.0};
  double abs_delta = 0.0;  // |Delta| at the reported lambda
};

struct DiskReport {
  long long n = 0;
  double radius = 0.0;
  int winding = 0;
  int contour_points = 0;
  int retries = 0;
  bool ok = true;
  std::string note;
};

struct SpectrumResult {
  cplx center0{0.0, 0.0};
  std::vector<SpectrumEntry> entries;  // sorted by (n, j)
  std::vector<DiskReport> disks;
  // Smallest bound such that every disk with |n| >= n0 in the scanned range
  // held exactly two roots with |eps| < 1/4.  -1 when no such bound exists
  // within the range.
  long long n0 = -1;
  bool complete = true;
};

// Scans contour disks centered at center0 + 2n for n in [n_min, n_max].
// Requires the coincident-root case (each unperturbed point carries two
// roots).  Winding numbers are established by contour phase tracking,
// roots extracted from contour moments, then Newton-polished; pairs closer
// than tol_cluster are reported as one entry of multiplicity 2.
SpectrumResult locate_eigenvalues(const FundamentalSolver& solver,
                                  const BcClassification& bc, long long n_min,
                                  long long n_max, const LocateOptions& opt = {});

}  // namespace dirac
