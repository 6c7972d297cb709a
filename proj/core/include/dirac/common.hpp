#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirac {

using cplx = std::complex<double>;
using namespace std::complex_literals;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Error hierarchy maps onto process exit codes: parse -> 2,
// precondition -> 3, numerical -> 4.  Anything else escaping main is a bug.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// n evenly spaced points, a and b included.  n >= 2.
std::vector<double> linspace(double a, double b, std::size_t n);

// Composite Simpson weights on a uniform grid of n points (n odd, n >= 3).
// sum_i w_i f(x_i) approximates the integral over [a, a + (n-1)h].
std::vector<double> simpson_weights(std::size_t n, double h);

// Worker count for parallel_for: DIRAC_SPECTRA_THREADS if set (0 means
// "auto"), otherwise hardware_concurrency, clamped to [1, 16].
unsigned worker_count();

// Runs fn(i) for i in [0, n) on worker_count() threads.  fn must be safe to
// call concurrently for distinct i; iteration order is unspecified.  The
// first exception thrown by any fn is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dirac
