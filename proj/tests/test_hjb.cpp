#include <catch2/catch_amalgamated.hpp>

#include "svmm/error.hpp"
#include "svmm/finite_difference.hpp"
#include "svmm/hjb.hpp"
#include "svmm/quotes.hpp"

#include <cmath>

using namespace svmm;

namespace {

hjb::HjbConfig small_config() {
  hjb::HjbConfig c;
  c.q_min = -8;
  c.q_max = 8;
  c.nu_grid = fd::uniform_grid(0.0, 12.0, 25);
  c.n_time = 2000;
  c.n_slices = 5;
  return c;
}

}  // namespace

TEST_CASE("configuration validation") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate());
  c.q_min = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.n_time = 2001;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.nu_grid = {-1.0, 0.0, 1.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("terminal slice is zero and values are finite") {
  const auto c = small_config();
  const auto g = hjb::solve_stock_hjb(c);
  const std::size_t last = g.times().size() - 1;
  CHECK(g.times()[last] == Catch::Approx(1.0));
  for (int q = c.q_min; q <= c.q_max; ++q) {
    for (std::size_t i = 0; i < g.nu().size(); ++i) {
      CHECK(g.value(last, q, i) == 0.0);
      for (std::size_t k = 0; k < g.times().size(); ++k) REQUIRE(std::isfinite(g.value(k, q, i)));
    }
  }
  SECTION("dropped sides carry no quote") {
    CHECK(std::isinf(g.quote_b(0, c.q_max, 3)));
    CHECK(std::isinf(g.quote_a(0, c.q_min, 3)));
    CHECK(std::isfinite(g.quote_a(0, c.q_max, 3)));
  }
  CHECK(g.max_source >= 0.0);
}

TEST_CASE("risk-neutral dealer: value is linear in time and flat in (q, nu)") {
  auto c = small_config();
  c.q_min = -40;
  c.q_max = 40;
  c.risk.gamma = 0.0;
  const auto g = hjb::solve_stock_hjb(c);
  const double v = 140.0 * std::exp(-1.0) / 1.5 * (std::exp(0.045) + std::exp(-0.045));
  const auto ctx = c.quote_context();
  for (int q = -5; q <= 5; ++q) {
    for (std::size_t i = 0; i < g.nu().size(); ++i) {
      CHECK(g.value(0, q, i) == Catch::Approx(v).epsilon(0.01));
      CHECK(g.value(2, q, i) == Catch::Approx(0.5 * v).epsilon(0.01));
      const auto approx = quotes::inventory_quotes(q, g.nu()[i], 0.0, ctx);
      CHECK(g.quote_a(0, q, i) == Catch::Approx(approx.delta_a).margin(1e-3));
      CHECK(g.quote_b(0, q, i) == Catch::Approx(approx.delta_b).margin(1e-3));
    }
  }
}

TEST_CASE("without order flow the value is the frozen closed form") {
  auto c = small_config();
  c.arrival.A = 0.0;
  const auto g = hjb::solve_stock_hjb(c);
  const auto ctx = c.quote_context();
  for (int q : {-6, -1, 0, 3, 8}) {
    for (std::size_t i = 0; i < g.nu().size(); ++i) {
      for (std::size_t k = 0; k < g.times().size(); ++k) {
        const double frozen = quotes::closed_form_values(q, g.nu()[i], g.times()[k], ctx).frozen;
        CHECK(g.value(k, q, i) == Catch::Approx(frozen).margin(1e-3 * (1.0 + std::abs(frozen))));
      }
    }
  }
  SECTION("sandwich is tight at the lower edge") {
    const double tol = hjb::refinement_tolerance(c, g);
    const auto r = hjb::compare_exact_vs_approx(g, c, tol);
    CHECK(r.c_emp == 0.0);
    CHECK(r.sandwich_ok);
    CHECK(std::abs(r.min_excess) <= tol + 1e-12);
  }
}

TEST_CASE("default parameters: the active dealer dominates the frozen one") {
  const auto c = small_config();
  const auto g = hjb::solve_stock_hjb(c);
  const double tol = hjb::refinement_tolerance(c, g);
  CHECK(tol >= 0.0);
  const auto r = hjb::compare_exact_vs_approx(g, c, tol);
  CHECK(r.sandwich_ok);
  CHECK(r.sandwich_violations == 0);
  CHECK(r.min_excess >= -tol);
  CHECK(r.c_emp > 0.0);
  CHECK(r.max_quote_gap_a >= 0.0);
  CHECK(r.max_quote_gap_b >= 0.0);
}

TEST_CASE("symmetry without clearing fee") {
  auto c = small_config();
  c.risk.beta = 0.0;
  const auto g = hjb::solve_stock_hjb(c);
  for (int q = 1; q <= c.q_max; ++q) {
    for (std::size_t i = 0; i < g.nu().size(); i += 4) {
      CHECK(g.value(0, q, i) == Catch::Approx(g.value(0, -q, i)).epsilon(1e-9));
      if (q < c.q_max) CHECK(g.quote_a(0, q, i) == Catch::Approx(g.quote_b(0, -q, i)).epsilon(1e-9));
    }
  }
}

TEST_CASE("grid refinement converges at first order") {
  auto coarse = small_config();
  const auto gc = hjb::solve_stock_hjb(coarse);
  const double tol = hjb::refinement_tolerance(coarse, gc);

  auto fine = coarse;
  fine.nu_grid = fd::uniform_grid(0.0, 12.0, 49);
  fine.n_time = 4000;
  const auto gf = hjb::solve_stock_hjb(fine);
  double change = 0.0;
  for (int q = coarse.q_min; q <= coarse.q_max; ++q) {
    for (std::size_t i = 0; i < gc.nu().size(); ++i) {
      change = std::max(change, std::abs(gc.value(0, q, i) - gf.value(0, q, 2 * i)));
    }
  }
  CHECK(change < 4.0 * tol);
}

TEST_CASE("stability and consistency failures are reported") {
  auto c = small_config();
  c.n_time = 8;
  c.n_slices = 5;
  CHECK_THROWS_AS(hjb::solve_stock_hjb(c), NumericalError);

  const auto base = small_config();
  const auto g = hjb::solve_stock_hjb(base);
  auto other = base;
  other.risk.gamma = 0.2;
  CHECK_THROWS_AS(hjb::compare_exact_vs_approx(g, other, 0.0), ConfigError);
  auto impact = base;
  impact.include_impact = true;
  impact.risk.eta = 0.09;
  const auto gi = hjb::solve_stock_hjb(impact);
  CHECK_THROWS_AS(hjb::compare_exact_vs_approx(gi, impact, 0.0), ConfigError);
}

TEST_CASE("threads do not change the solution") {
  auto c = small_config();
  const auto a = hjb::solve_stock_hjb(c);
  c.threads = 4;
  const auto b = hjb::solve_stock_hjb(c);
  for (int q = c.q_min; q <= c.q_max; ++q) {
    for (std::size_t i = 0; i < a.nu().size(); ++i) REQUIRE(a.value(0, q, i) == b.value(0, q, i));
  }
}
