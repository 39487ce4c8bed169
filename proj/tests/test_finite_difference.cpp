#include <catch2/catch_amalgamated.hpp>

#include "svmm/error.hpp"
#include "svmm/finite_difference.hpp"
#include "svmm/parallel.hpp"

#include <cmath>
#include <vector>

using namespace svmm;

TEST_CASE("three-point stencils are exact on quadratics") {
  const double hm = 0.3;
  const double hp = 0.7;
  auto f = [](double x) { return 2.0 + 3.0 * x - 1.5 * x * x; };
  const double x = 1.2;
  const auto d1 = fd::central_first(hm, hp);
  const auto d2 = fd::central_second(hm, hp);
  const double first = d1.lower * f(x - hm) + d1.centre * f(x) + d1.upper * f(x + hp);
  const double second = d2.lower * f(x - hm) + d2.centre * f(x) + d2.upper * f(x + hp);
  CHECK(first == Catch::Approx(3.0 - 3.0 * x).epsilon(1e-12));
  CHECK(second == Catch::Approx(-3.0).epsilon(1e-12));
  CHECK(d1.lower + d1.centre + d1.upper == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("grid helpers") {
  const auto g = fd::uniform_grid(-1.0, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 1.0);
  CHECK(g[2] == Catch::Approx(0.0).margin(1e-15));

  std::size_t cell = 0;
  double frac = 0.0;
  REQUIRE(fd::locate(g, 0.25, cell, frac));
  CHECK(cell == 2);
  CHECK(frac == Catch::Approx(0.5));
  REQUIRE(fd::locate(g, 1.0, cell, frac));
  CHECK(cell == 3);
  CHECK(frac == Catch::Approx(1.0));
  CHECK_FALSE(fd::locate(g, 1.0001, cell, frac));
  CHECK_FALSE(fd::locate(g, -2.0, cell, frac));

  const std::vector<double> bad{0.0, 1.0, 1.0};
  CHECK_THROWS_AS(fd::require_grid(bad, 2, "test"), ConfigError);
  CHECK_THROWS_AS(fd::require_grid(g, 6, "test"), ConfigError);
}

TEST_CASE("tridiagonal solve matches a dense product") {
  const std::vector<double> lower{0.0, -1.0, -0.5, -2.0};
  const std::vector<double> diag{4.0, 5.0, 3.0, 6.0};
  const std::vector<double> upper{-1.0, 0.5, -1.0, 0.0};
  const std::vector<double> x{1.0, -2.0, 0.5, 3.0};
  std::vector<double> rhs(4);
  for (std::size_t i = 0; i < 4; ++i) {
    rhs[i] = diag[i] * x[i];
    if (i > 0) rhs[i] += lower[i] * x[i - 1];
    if (i + 1 < 4) rhs[i] += upper[i] * x[i + 1];
  }
  std::vector<double> scratch;
  fd::solve_tridiagonal(lower, diag, upper, rhs, scratch);
  for (std::size_t i = 0; i < 4; ++i) CHECK(rhs[i] == Catch::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  for (unsigned threads : {1u, 3u, 8u}) {
    std::vector<int> hits(101, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 4,
                               [](std::size_t i) {
                                 if (i == 7) throw NumericalError("boom");
                               }),
                  NumericalError);
}
