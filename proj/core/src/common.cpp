#include "dirac/common.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace dirac {

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n < 2) throw PreconditionError("linspace: need at least 2 points");
  std::vector<double> xs(n);
  const double h = (b - a) / double(n - 1);
  for (std::size_t i = 0; i < n; ++i) xs[i] = a + h * double(i);
  xs.back() = b;
  return xs;
}

std::vector<double> simpson_weights(std::size_t n, double h) {
  if (n < 3 || n % 2 == 0)
    throw PreconditionError("simpson_weights: n must be odd and >= 3");
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 2 < n; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  return w;
}

unsigned worker_count() {
  unsigned n = 0;
  if (const char* env = std::getenv("DIRAC_SPECTRA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = unsigned(v);
  }
  if (n == 0) n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (n > 16) n = 16;
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        // Keep draining indices so the pool finishes promptly.
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dirac
