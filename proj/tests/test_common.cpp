#include "dirac/common.hpp"

#include <atomic>
#include <cmath>

#include "doctest.h"

using namespace dirac;

TEST_CASE("linspace endpoints and spacing") {
  auto xs = linspace(0.0, pi, 129);
  CHECK(xs.size() == 129);
  CHECK(xs.front() == 0.0);
  CHECK(xs.back() == pi);
  for (std::size_t i = 1; i < xs.size(); ++i)
    CHECK(xs[i] - xs[i - 1] == doctest::Approx(pi / 128).epsilon(1e-14));
  CHECK_THROWS_AS(linspace(0.0, 1.0, 1), PreconditionError);
}

TEST_CASE("simpson weights integrate cubics exactly") {
  const std::size_t n = 9;
  const double h = 0.25;
  auto w = simpson_weights(n, h);
  double sum = 0.0, integral = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = h * double(i);
    sum += w[i] * (x * x * x - 2.0 * x + 1.0);
  }
  const double b = h * double(n - 1);
  integral = b * b * b * b / 4.0 - b * b + b;
  CHECK(sum == doctest::Approx(integral).epsilon(1e-13));
  CHECK_THROWS_AS(simpson_weights(4, h), PreconditionError);
}

TEST_CASE("simpson weights converge at fourth order") {
  auto integrate = [](std::size_t n) {
    auto w = simpson_weights(n, pi / double(n - 1));
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += w[i] * std::sin(pi * double(i) / double(n - 1));
    return s;
  };
  const double e1 = std::abs(integrate(33) - 2.0);
  const double e2 = std::abs(integrate(65) - 2.0);
  CHECK(e1 / e2 > 12.0);  // ~16 for order 4
}

TEST_CASE("parallel_for covers every index once and propagates errors") {
  const std::size_t n = 1000;
  std::vector<std::atomic<int>> hits(n);
  parallel_for(n, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (auto& h : hits) CHECK(h.load() == 1);

  CHECK_THROWS_AS(parallel_for(64,
                               [](std::size_t i) {
                                 if (i == 17)
                                   throw NumericalError("boom");
                               }),
                  NumericalError);
}
