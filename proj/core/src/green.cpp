#include "dirac/green.hpp"

#include <Eigen/Dense>

namespace dirac {

namespace {

// G carries 1/Delta; below this the point is indistinguishable from a pole.
constexpr double kPoleTol = 1e-12;

Mat2 adj2(const Mat2& M) {
  Mat2 a;
  a << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
  return a;
}

}  // namespace

Mat2 green_R(const BoundaryMinors& m, const Mat2& E_pi) {
  const cplx e11 = E_pi(0, 0), e12 = E_pi(0, 1), e21 = E_pi(1, 0),
             e22 = E_pi(1, 1);
  Mat2 R;
  R << m.A12 + m.A13 * e12 + m.A14 * e22, m.A23 * e12 + m.A24 * e22,
      -m.A13 * e11 - m.A14 * e21, m.A12 - m.A23 * e11 - m.A24 * e21;
  return R;
}

Mat2 h0_kernel(const BoundaryMinors& m, cplx lambda, double t, double x) {
  const cplx i(0.0, 1.0);
  Mat2 h;
  h(0, 0) = std::exp(i * lambda * (x - t)) *
            (m.A12 + m.A14 * std::exp(-i * pi * lambda));
  h(0, 1) = -m.A24 * std::exp(i * lambda * (x - pi + t));
  h(1, 0) = -m.A13 * std::exp(i * lambda * (pi - x - t));
  h(1, 1) = std::exp(i * lambda * (t - x)) *
            (-m.A12 + m.A23 * std::exp(i * pi * lambda));
  return h;
}

GreenKernel::GreenKernel(const FundamentalSolver& solver,
                         const BcClassification& bc, cplx lambda,
                         std::size_t n_grid)
    : lambda_(lambda) {
  if (n_grid < 3 || n_grid % 2 == 0)
    throw PreconditionError("GreenKernel: n_grid must be odd and >= 3");
  const FundamentalMatrix F = solver.solve(lambda, n_grid);
  xs_ = F.x;
  w_ = simpson_weights(n_grid, pi / double(n_grid - 1));
  E_ = F.E;
  delta_ = delta_from_end(bc.minors, F.end());

  const Mat2 R = green_R(bc.minors, F.end());
  Mat2 J;
  J << 1.0, 0.0, 0.0, -1.0;
  left_.resize(n_grid);
  right_.resize(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) {
    left_[i] = E_[i] * R;
    right_[i] = adj2(E_[i]) * J;
  }
}

Mat2 GreenKernel::H(std::size_t it, std::size_t ix) const {
  return left_[ix] * right_[it];
}

Mat2 GreenKernel::G(std::size_t it, std::size_t ix) const {
  if (std::abs(delta_) < kPoleTol)
    throw NumericalError("GreenKernel::G: lambda is numerically an eigenvalue");
  const cplx i(0.0, 1.0);
  Mat2 g = (i / delta_) * H(it, ix);
  if (xs_[it] > xs_[ix]) g -= i * (E_[ix] * right_[it]);
  return g;
}

std::array<double, 4> GreenKernel::hjk_norms() const {
  const std::size_t m = xs_.size();
  std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
  for (std::size_t ix = 0; ix < m; ++ix)
    for (std::size_t it = 0; it < m; ++it) {
      const Mat2 h = H(it, ix);
      const double w = w_[ix] * w_[it];
      acc[0] += w * std::norm(h(0, 0));
      acc[1] += w * std::norm(h(0, 1));
      acc[2] += w * std::norm(h(1, 0));
      acc[3] += w * std::norm(h(1, 1));
    }
  for (double& a : acc) a = std::sqrt(a);
  return acc;
}

namespace {

// Quadrature weights for the range [x_{i0}, x_{m-1}] of a uniform grid:
// Simpson when the interval count is even, otherwise a 3/8 opening panel.
// A single remaining interval integrates the cubic through the four nodes
// ending at it, which reaches two nodes left of i0; callers must supply an
// integrand that is smooth on the whole grid, not just on the range.
std::vector<double> tail_weights(std::size_t m, std::size_t i0, double h) {
  std::vector<double> w(m, 0.0);
  const std::size_t nint = m - 1 - i0;
  if (nint == 0) return w;
  if (nint == 1) {
    if (i0 >= 2) {
      w[i0 - 2] = h / 24.0;
      w[i0 - 1] = -5.0 * h / 24.0;
      w[i0] = 19.0 * h / 24.0;
      w[i0 + 1] = 9.0 * h / 24.0;
    } else {
      w[i0] = w[i0 + 1] = h / 2.0;
    }
    return w;
  }
  std::size_t s = i0;
  if (nint % 2 == 1) {
    w[s] += 3.0 * h / 8.0;
    w[s + 1] += 9.0 * h / 8.0;
    w[s + 2] += 9.0 * h / 8.0;
    w[s + 3] += 3.0 * h / 8.0;
    s += 3;
  }
  for (; s + 2 <= m - 1; s += 2) {
    w[s] += h / 3.0;
    w[s + 1] += 4.0 * h / 3.0;
    w[s + 2] += h / 3.0;
  }
  return w;
}

}  // namespace

Vec2 GreenKernel::apply(const std::vector<Vec2>& f, std::size_t ix) const {
  if (f.size() != xs_.size())
    throw PreconditionError("GreenKernel::apply: f must live on grid()");
  if (std::abs(delta_) < kPoleTol)
    throw NumericalError(
        "GreenKernel::apply: lambda is numerically an eigenvalue");
  const cplx i(0.0, 1.0);
  // i H / Delta is smooth over the whole square; the jump part
  // -i E(x) E(t)^{-1} J lives on t >= x and is integrated separately so the
  // discontinuity never crosses a quadrature panel.
  Vec2 u = Vec2::Zero();
  for (std::size_t it = 0; it < xs_.size(); ++it)
    u += (w_[it] * i / delta_) * (H(it, ix) * f[it]);
  const std::vector<double> tw =
      tail_weights(xs_.size(), ix, xs_[1] - xs_[0]);
  for (std::size_t it = 0; it < xs_.size(); ++it)
    if (tw[it] != 0.0) u -= (tw[it] * i) * (E_[ix] * (right_[it] * f[it]));
  return u;
}

ResiduePair residue_pair(const FundamentalSolver& solver,
                         const BcClassification& bc, cplx lambda_n,
                         std::size_t n_grid) {
  if (n_grid < 3 || n_grid % 2 == 0)
    throw PreconditionError("residue_pair: n_grid must be odd and >= 3");
  const FundamentalMatrix F = solver.solve_with_dlambda(lambda_n, n_grid);
  const Mat2 R = green_R(bc.minors, F.end());
  const cplx dd = ddelta_from_end(bc.minors, F.end_dlambda());

  Mat2 J;
  J << 1.0, 0.0, 0.0, -1.0;
  const std::size_t m = n_grid;
  const std::vector<double> w = simpson_weights(m, pi / double(m - 1));
  std::vector<Mat2> left(m), right(m);
  for (std::size_t i = 0; i < m; ++i) {
    left[i] = F.E[i] * R;
    right[i] = adj2(F.E[i]) * J;
  }

  // M[(j,i),(k,l)] = sqrt(w_i w_l) * i H_{jk}(t_l, x_i) / Delta', so the
  // Euclidean structure of M matches the L2 structure of the kernel.
  Eigen::MatrixXcd M(2 * m, 2 * m);
  const cplx scale = cplx(0.0, 1.0) / dd;
  for (std::size_t i = 0; i < m; ++i) {
    const double swi = std::sqrt(w[i]);
    for (std::size_t l = 0; l < m; ++l) {
      const Mat2 h = left[i] * right[l];
      const double s = swi * std::sqrt(w[l]);
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          M(j * m + i, k * m + l) = s * scale * h(j, k);
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      M, Eigen::ComputeThinU | Eigen::ComputeThinV);

  ResiduePair r;
  r.lambda = lambda_n;
  r.ddelta = dd;
  r.sigma1 = svd.singularValues()(0);
  r.sigma2 = svd.singularValues()(1);
  r.frobenius = M.norm();
  r.x = F.x;
  r.y.resize(m);
  r.z.resize(m);
  const double s1 = std::sqrt(r.sigma1);
  for (std::size_t i = 0; i < m; ++i) {
    const double swi = std::sqrt(w[i]);
    for (int j = 0; j < 2; ++j) {
      r.y[i](j) = s1 * svd.matrixU()(j * m + i, 0) / swi;
      r.z[i](j) = s1 * svd.matrixV()(j * m + i, 0) / swi;
    }
  }
  // Fix the common phase: largest y component real positive.  The outer
  // product y z^* is unchanged when both rotate together.
  std::size_t ibig = 0;
  int jbig = 0;
  double big = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (int j = 0; j < 2; ++j)
      if (std::abs(r.y[i](j)) > big) {
        big = std::abs(r.y[i](j));
        ibig = i;
        jbig = j;
      }
  if (big > 0.0) {
    const cplx c = std::conj(r.y[ibig](jbig)) / big;
    for (std::size_t i = 0; i < m; ++i) {
      r.y[i] *= c;
      r.z[i] *= c;
    }
  }
  return r;
}

}  // namespace dirac
