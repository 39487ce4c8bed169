#include <catch2/catch_amalgamated.hpp>

#include "svmm/error.hpp"
#include "svmm/heston.hpp"
#include "svmm/stats.hpp"

#include <cmath>
#include <vector>

using namespace svmm;
using heston::HestonParams;

namespace {

// Closed forms written out independently of the library.
double oracle_mean(double nu, double theta, double alpha, double tau) {
  return alpha + (nu - alpha) * std::exp(-theta * tau);
}

double oracle_var(double nu, double theta, double alpha, double xi, double tau) {
  const double e = std::exp(-theta * tau);
  return nu * xi * xi / theta * (e - e * e) + alpha * xi * xi / (2.0 * theta) * (1.0 - e) * (1.0 - e);
}

}  // namespace

TEST_CASE("default parameters violate the Feller condition") {
  HestonParams p;
  CHECK_FALSE(p.feller_satisfied());
  p.theta = 2.0;
  CHECK(p.feller_satisfied());
}

TEST_CASE("parameter validation") {
  HestonParams p;
  CHECK_NOTHROW(p.validate());
  p.rho = 1.01;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.rho = 0.0;
  p.xi = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.xi = 0.5;
  p.nu0 = std::nan("");
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("conditional moments match the closed forms") {
  HestonParams p;
  for (double nu : {0.0, 1.0, 4.0, 9.0}) {
    for (double tau : {0.0, 0.1, 1.0, 5.0}) {
      const auto m = heston::conditional_moments(nu, p, tau);
      CHECK(m.mean == Catch::Approx(oracle_mean(nu, p.theta, p.alpha, tau)).epsilon(1e-12));
      CHECK(m.var == Catch::Approx(oracle_var(nu, p.theta, p.alpha, p.xi, tau)).margin(1e-12));
      CHECK(m.second_moment == Catch::Approx(m.var + m.mean * m.mean).epsilon(1e-10));
    }
  }
  SECTION("at the long-run level the mean is constant") {
    const auto m = heston::conditional_moments(p.alpha, p, 1.0);
    CHECK(m.mean == Catch::Approx(4.0).epsilon(1e-14));
  }
}

TEST_CASE("theta = 0 uses the analytic limit and is continuous") {
  HestonParams p;
  p.theta = 0.0;
  const auto m0 = heston::conditional_moments(3.0, p, 2.0);
  CHECK(m0.mean == 3.0);
  CHECK(m0.var == Catch::Approx(0.25 * 3.0 * 2.0));
  CHECK(m0.second_moment == Catch::Approx(9.0 + 1.5));
  p.theta = 1e-9;
  const auto m1 = heston::conditional_moments(3.0, p, 2.0);
  CHECK(m1.mean == Catch::Approx(m0.mean).epsilon(1e-7));
  CHECK(m1.var == Catch::Approx(m0.var).epsilon(1e-6));
  CHECK(heston::integrated_mean(3.0, p, 2.0) == Catch::Approx(6.0).epsilon(1e-7));
}

TEST_CASE("integrated mean equals the quadrature of the conditional mean") {
  HestonParams p;
  p.theta = 0.7;
  const double nu = 6.0;
  const double tau = 1.5;
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) * tau / n;
    sum += oracle_mean(nu, p.theta, p.alpha, u) * tau / n;
  }
  CHECK(heston::integrated_mean(nu, p, tau) == Catch::Approx(sum).epsilon(1e-8));
}

TEST_CASE("step_state: binomial increments and truncation") {
  HestonParams p;
  const heston::MidState st{0.0, 100.0, 4.0};
  const double dt = 0.005;
  const auto up = heston::step_state(st, p, dt, {1.0, 1.0});
  CHECK(up.s - st.s == Catch::Approx(2.0 * std::sqrt(dt)));
  CHECK(up.t == Catch::Approx(dt));
  const double shock = p.rho + std::sqrt(1.0 - p.rho * p.rho);
  CHECK(up.nu == Catch::Approx(4.0 + p.xi * 2.0 * shock * std::sqrt(dt)));

  SECTION("variance never goes negative") {
    PathRng rng(11);
    heston::MidState s{0.0, 100.0, 0.01};
    for (int i = 0; i < 20000; ++i) {
      s = heston::step_state(s, p, 0.05, heston::draw(rng, heston::Scheme::gaussian));
      REQUIRE(s.nu >= 0.0);
    }
  }
  SECTION("at nu = 0 the mid-price does not move and nu drifts up") {
    const auto z = heston::step_state({0.0, 100.0, 0.0}, p, dt, {-1.0, 1.0});
    CHECK(z.s == 100.0);
    CHECK(z.nu == Catch::Approx(p.theta * p.alpha * dt));
  }
}

TEST_CASE("step_state rejects bad input") {
  HestonParams p;
  CHECK_THROWS_AS(heston::step_state({0.0, 100.0, 4.0}, p, 0.0, {1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(heston::step_state({0.0, 100.0, 4.0}, p, -0.1, {1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(heston::step_state({0.0, std::nan(""), 4.0}, p, 0.01, {1.0, 1.0}), NumericalError);
  CHECK_THROWS_AS(heston::step_state({0.0, 100.0, 4.0}, p, 0.01, {INFINITY, 1.0}), NumericalError);
}

TEST_CASE("binomial draws are signs and the mid-price is driftless") {
  PathRng rng(3);
  std::vector<double> d;
  for (int i = 0; i < 40000; ++i) {
    const auto x = heston::draw(rng, heston::Scheme::binomial);
    REQUIRE(std::abs(x.price) == 1.0);
    REQUIRE(std::abs(x.perp) == 1.0);
    d.push_back(x.price * x.perp);
  }
  const auto s = stats::summarize(d);
  CHECK(std::abs(s.mean) < 4.0 * s.se);
}

TEST_CASE("Monte Carlo moments agree with the closed form under Feller") {
  HestonParams p;
  p.theta = 2.0;
  p.xi = 0.5;
  const double T = 1.0;
  const double dt = 0.002;
  const int n_paths = 20000;
  std::vector<double> terminal(n_paths);
  for (int k = 0; k < n_paths; ++k) {
    PathRng rng(stream_seed(5, k));
    heston::MidState s{0.0, 0.0, 4.0};
    for (int i = 0; i < static_cast<int>(T / dt); ++i) {
      s = heston::step_state(s, p, dt, heston::draw(rng, heston::Scheme::gaussian));
    }
    terminal[k] = s.nu;
  }
  const auto sum = stats::summarize(terminal);
  const auto m = heston::conditional_moments(4.0, p, T);
  CHECK(std::abs(sum.mean - m.mean) < 4.0 * sum.se);
  // Standard error of the sample variance from the fourth moment of a near-gaussian sample.
  const double var_se = m.var * std::sqrt(2.0 / (n_paths - 1));
  CHECK(std::abs(sum.std * sum.std - m.var) < 4.0 * var_se + 0.01 * m.var);
}
