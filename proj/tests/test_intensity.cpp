#include <catch2/catch_amalgamated.hpp>

#include "svmm/error.hpp"
#include "svmm/intensity.hpp"
#include "svmm/rng.hpp"
#include "svmm/stats.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace svmm;
using intensity::ArrivalParams;

TEST_CASE("intensity values") {
  const ArrivalParams p;
  CHECK(intensity::intensity(0.0, p) == 140.0);
  CHECK(intensity::intensity(1.0 / 1.5, p) == Catch::Approx(140.0 / std::exp(1.0)).epsilon(1e-14));
  CHECK(intensity::intensity(1.0 / 1.5, p) == Catch::Approx(51.5031).margin(1e-4));
  CHECK(intensity::intensity(0.8667, p) == Catch::Approx(140.0 * std::exp(-1.3)).margin(0.01));
  CHECK(intensity::intensity(0.8667, p) == Catch::Approx(38.154).margin(0.01));
  CHECK(intensity::intensity(std::numeric_limits<double>::infinity(), p) == 0.0);
  CHECK(intensity::intensity(-1.0, p) > 140.0);
}

TEST_CASE("intensity is log-linear and strictly decreasing") {
  const ArrivalParams p;
  for (double d1 : {-2.0, -0.3, 0.0, 0.5, 3.0}) {
    for (double d2 : {-1.0, 0.2, 1.7}) {
      const double lhs = std::log(intensity::intensity(d1, p)) - std::log(intensity::intensity(d2, p));
      CHECK(lhs == Catch::Approx(-p.k * (d1 - d2)).margin(1e-12));
      if (d1 < d2) CHECK(intensity::intensity(d1, p) > intensity::intensity(d2, p));
    }
  }
}

TEST_CASE("intensity rejects bad input") {
  const ArrivalParams p;
  CHECK_THROWS_AS(intensity::intensity(std::nan(""), p), ConfigError);
  CHECK_THROWS_AS(intensity::intensity(-std::numeric_limits<double>::infinity(), p), ConfigError);
  ArrivalParams bad;
  bad.k = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.k = 1.5;
  bad.A = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.A = 0.0;
  CHECK_NOTHROW(bad.validate());
  CHECK_THROWS_AS(intensity::sample_fills({1.0, 1.0}, p, 0.0, 0.1, 0.1), ConfigError);
}

TEST_CASE("fill sampling edge cases") {
  ArrivalParams none;
  none.A = 0.0;
  const auto f = intensity::sample_fills({-5.0, -5.0}, none, 0.005, 0.0, 0.0);
  CHECK_FALSE(f.ask_filled);
  CHECK_FALSE(f.bid_filled);

  const ArrivalParams p;
  const double inf = std::numeric_limits<double>::infinity();
  const auto g = intensity::sample_fills({inf, inf}, p, 0.005, 0.0, 0.0);
  CHECK_FALSE(g.ask_filled);
  CHECK_FALSE(g.bid_filled);

  const auto h = intensity::sample_fills({-3.0, 0.8667}, p, 0.005, 0.999, 0.999);
  CHECK(h.ask_filled);
  CHECK_FALSE(h.bid_filled);
  CHECK(h.clipped == 1);
}

TEST_CASE("empirical fill frequency matches lambda dt") {
  const ArrivalParams p;
  const QuotePair q{0.8667, 0.8667};
  const double dt = 0.005;
  const double prob = 140.0 * std::exp(-1.5 * 0.8667) * dt;
  CHECK(prob == Catch::Approx(0.19077).margin(1e-4));

  PathRng rng(2024);
  const int n = 100000;
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    const auto f = intensity::sample_fills(q, p, dt, rng.uniform(), rng.uniform());
    a[i] = f.ask_filled;
    b[i] = f.bid_filled;
  }
  const auto sa = stats::summarize(a);
  const auto sb = stats::summarize(b);
  CHECK(std::abs(sa.mean - prob) < 3.0 * std::sqrt(prob * (1 - prob) / n));
  CHECK(std::abs(sb.mean - prob) < 3.0 * std::sqrt(prob * (1 - prob) / n));

  SECTION("ask and bid fills are uncorrelated") {
    double cov = 0.0;
    for (int i = 0; i < n; ++i) cov += (a[i] - sa.mean) * (b[i] - sb.mean);
    const double corr = cov / (n - 1) / (sa.std * sb.std);
    CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("fill counts over the horizon converge to lambda T") {
  const ArrivalParams p;
  const QuotePair q{1.0, 1.0};
  const double dt = 0.001;
  const double T = 1.0;
  const double lambda = intensity::intensity(1.0, p);
  std::vector<double> counts(10000);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    PathRng rng(stream_seed(77, k));
    int c = 0;
    for (int i = 0; i < static_cast<int>(T / dt); ++i) {
      c += intensity::sample_fills(q, p, dt, rng.uniform(), 1.0).ask_filled;
    }
    counts[k] = c;
  }
  const auto s = stats::summarize(counts);
  // Bernoulli-per-step counts have mean exactly n * lambda * dt.
  CHECK(std::abs(s.mean - lambda * T) < 3.0 * s.se);
}
