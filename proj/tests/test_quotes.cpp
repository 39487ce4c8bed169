#include <catch2/catch_amalgamated.hpp>

#include "svmm/error.hpp"
#include "svmm/quotes.hpp"

#include <cmath>

using namespace svmm;
using namespace svmm::quotes;

namespace {

QuoteContext default_context() { return QuoteContext{}; }

// f(nu, t) written out directly.
double oracle_f(double nu, double tau, double gamma = 0.1, double theta = 0.02, double alpha = 4.0) {
  return gamma / (2.0 * theta) * (nu - alpha) * (1.0 - std::exp(-theta * tau)) + 0.5 * gamma * alpha * tau;
}

}  // namespace

TEST_CASE("inventory quotes at worked points") {
  const auto ctx = default_context();
  SECTION("terminal time, flat inventory") {
    const auto q = inventory_quotes(0, 4.0, 1.0, ctx);
    CHECK(q.delta_a == Catch::Approx(0.636667).margin(1e-6));
    CHECK(q.delta_b == Catch::Approx(0.696667).margin(1e-6));
  }
  SECTION("one unit of time to go") {
    CHECK(inventory_coefficient(4.0, 0.0, ctx) == Catch::Approx(0.2).epsilon(1e-12));
    const auto q = inventory_quotes(0, 4.0, 0.0, ctx);
    CHECK(q.delta_a == Catch::Approx(0.836667).margin(1e-6));
    CHECK(q.delta_b == Catch::Approx(0.896667).margin(1e-6));
  }
  SECTION("long inventory pushes the ask through the mid") {
    const auto q = inventory_quotes(6, 4.0, 0.0, ctx);
    CHECK(q.delta_a == Catch::Approx(-1.563333).margin(1e-6));
  }
}

TEST_CASE("inventory coefficient matches its closed form off the long-run level") {
  const auto ctx = default_context();
  for (double nu : {0.5, 2.0, 7.5}) {
    for (double t : {0.0, 0.3, 0.9}) {
      CHECK(inventory_coefficient(nu, t, ctx) == Catch::Approx(oracle_f(nu, 1.0 - t)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(inventory_coefficient(4.0, 1.0001, ctx), ConfigError);
  CHECK_THROWS_AS(inventory_coefficient(4.0, -0.1, ctx), ConfigError);
}

TEST_CASE("spread and price adjustment") {
  auto ctx = default_context();
  const auto sa = spread_and_adjustment(0, 4.0, 0.0, ctx);
  CHECK(sa.spread == Catch::Approx(1.733333).margin(1e-6));

  SECTION("identity with the quotes is exact") {
    for (int q = -5; q <= 5; ++q) {
      for (double nu : {0.0, 1.0, 4.0, 11.0}) {
        for (double t : {0.0, 0.5, 1.0}) {
          const auto d = inventory_quotes(q, nu, t, ctx);
          const auto s = spread_and_adjustment(q, nu, t, ctx);
          CHECK(s.spread == d.delta_a + d.delta_b);
          CHECK(s.m == d.delta_a - d.delta_b);
          const double f = inventory_coefficient(nu, t, ctx);
          CHECK(s.spread == Catch::Approx(2.0 / 1.5 + 2.0 * f).epsilon(1e-12));
          CHECK(s.m == Catch::Approx(-2.0 * 0.03 - 4.0 * f * q).margin(1e-12));
        }
      }
    }
  }
  SECTION("zero fee and flat inventory give no adjustment") {
    ctx.risk.beta = 0.0;
    CHECK(spread_and_adjustment(0, 6.0, 0.2, ctx).m == 0.0);
  }
  SECTION("theta -> 0 limit gives 2/k + gamma nu (T - t)") {
    ctx.heston.theta = 0.0;
    ctx.heston.xi = 0.0;
    CHECK(spread_and_adjustment(2, 3.0, 0.25, ctx).spread == Catch::Approx(2.0 / 1.5 + 0.1 * 3.0 * 0.75));
    ctx.heston.theta = 1e-8;
    CHECK(spread_and_adjustment(2, 3.0, 0.25, ctx).spread ==
          Catch::Approx(2.0 / 1.5 + 0.1 * 3.0 * 0.75).epsilon(1e-7));
  }
}

TEST_CASE("quotes are monotone in inventory and variance") {
  const auto ctx = default_context();
  const double h = 1e-4;
  for (double nu : {1.0, 4.0, 8.0}) {
    for (int q = -4; q < 4; ++q) {
      const auto a = inventory_quotes(q, nu, 0.2, ctx);
      const auto b = inventory_quotes(q + 1, nu, 0.2, ctx);
      CHECK(b.delta_a < a.delta_a);
      CHECK(b.delta_b > a.delta_b);
    }
    for (int q : {-3, -1, 1, 3}) {
      const auto lo = inventory_quotes(q, nu - h, 0.2, ctx);
      const auto hi = inventory_quotes(q, nu + h, 0.2, ctx);
      const double da = (hi.delta_a - lo.delta_a) / (2 * h);
      const double db = (hi.delta_b - lo.delta_b) / (2 * h);
      if (q > 0) {
        CHECK(da < 0.0);
        CHECK(db > 0.0);
      } else {
        CHECK(da > 0.0);
        CHECK(db < 0.0);
      }
      CHECK(hi.spread() - lo.spread() > 0.0);
    }
  }
}

TEST_CASE("market impact quotes") {
  auto ctx = default_context();
  SECTION("eta = 0 collapses both variants to the inventory quotes") {
    for (int q : {-2, 0, 3}) {
      const auto t1 = inventory_quotes(q, 5.0, 0.4, ctx);
      for (auto v : {ImpactVariant::reduced, ImpactVariant::full}) {
        const auto t2 = impact_quotes(q, 5.0, 0.4, ctx, v);
        CHECK(t2.delta_a == t1.delta_a);
        CHECK(t2.delta_b == t1.delta_b);
      }
    }
  }
  ctx.risk.eta = 0.09;
  SECTION("worked point at t = T") {
    const auto q = impact_quotes(1, 4.0, 1.0, ctx, ImpactVariant::reduced);
    CHECK(q.delta_a == Catch::Approx(0.636667).margin(1e-6));
    CHECK(q.delta_b == Catch::Approx(0.698287).margin(1e-6));
    const auto z = impact_quotes(0, 4.0, 1.0, ctx, ImpactVariant::reduced);
    const double half = 0.5 * 0.1 * 0.09 * 0.09;
    CHECK(z.delta_a == Catch::Approx(1.0 / 1.5 - 0.03 + half).epsilon(1e-12));
    CHECK(z.delta_b == Catch::Approx(1.0 / 1.5 + 0.03 + half).epsilon(1e-12));
  }
  SECTION("the full variant adds gamma A eta^2 (T - t) to the coefficient") {
    const auto a = impact_quotes(2, 4.0, 0.0, ctx, ImpactVariant::full);
    const auto b = impact_quotes(2, 4.0, 0.0, ctx, ImpactVariant::reduced);
    const double extra = 0.1 * 140.0 * 0.0081;
    CHECK(a.delta_a - b.delta_a == Catch::Approx(-extra * 3.0).epsilon(1e-10));
    CHECK(a.delta_b - b.delta_b == Catch::Approx(extra * 5.0).epsilon(1e-10));
    // Time-averaged spread of the flat book: 2/k + 2 f_C averaged over [0, 1].
    const double avg = 2.0 / 1.5 + 0.5 * 0.1 * 4.0 + 0.1 * 140.0 * 0.0081 + 0.1 * 0.0081;
    CHECK(avg == Catch::Approx(1.65).margin(0.01));
  }
}

TEST_CASE("benchmark quotes") {
  const auto ctx = default_context();
  Policy rn;
  rn.kind = PolicyKind::risk_neutral;
  const auto q = benchmark_quotes(rn, ctx);
  REQUIRE(q);
  CHECK(q->delta_a == Catch::Approx(0.636667).margin(1e-6));
  CHECK(q->delta_b == Catch::Approx(0.696667).margin(1e-6));

  Policy sym;
  sym.kind = PolicyKind::symmetric;
  CHECK_THROWS_AS(benchmark_quotes(sym, ctx), ConfigError);
  sym.avg_spread = 1.53;
  const auto s = benchmark_quotes(sym, ctx);
  REQUIRE(s);
  CHECK(s->delta_a == Catch::Approx(0.765));
  CHECK(s->delta_b == Catch::Approx(0.765));
  sym.avg_spread = -1.0;
  CHECK_THROWS_AS(benchmark_quotes(sym, ctx), ConfigError);

  Policy frozen;
  frozen.kind = PolicyKind::frozen;
  CHECK_FALSE(benchmark_quotes(frozen, ctx).has_value());
  CHECK_FALSE(policy_quotes(frozen, 6, 4.0, 0.0, ctx).has_value());

  Policy inv;
  CHECK_THROWS_AS(benchmark_quotes(inv, ctx), ConfigError);
}

TEST_CASE("closed-form values") {
  const auto ctx = default_context();
  const auto v = closed_form_values(6, 4.0, 0.0, ctx);
  CHECK(v.frozen == Catch::Approx(-7.2).epsilon(1e-12));
  CHECK(v.approx == v.frozen);
  const double rn = 140.0 * std::exp(-1.0) / 1.5 * (std::exp(0.045) + std::exp(-0.045));
  CHECK(v.risk_neutral == Catch::Approx(rn).epsilon(1e-12));
  CHECK(v.risk_neutral == Catch::Approx(68.7404).margin(1e-4));
  const auto z = closed_form_values(0, 7.0, 0.3, ctx);
  CHECK(z.frozen == 0.0);
  CHECK(z.approx == 0.0);
  for (double nu = 1.0; nu <= 8.0; nu += 0.5) {
    CHECK(closed_form_values(3, nu, 0.1, ctx).frozen <= 0.0);
  }
}

TEST_CASE("policy names round-trip") {
  for (auto k : {PolicyKind::inventory_sv, PolicyKind::market_impact, PolicyKind::symmetric, PolicyKind::frozen,
                 PolicyKind::risk_neutral}) {
    CHECK(parse_policy_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_policy_kind("greedy"), ConfigError);
  CHECK(parse_impact_variant("reduced") == ImpactVariant::reduced);
  CHECK(parse_impact_variant("full") == ImpactVariant::full);
}
