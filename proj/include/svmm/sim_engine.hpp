#pragma once

#include "svmm/heston.hpp"
#include "svmm/intensity.hpp"
#include "svmm/quotes.hpp"
#include "svmm/stats.hpp"

#include <cstdint>
#include <vector>

namespace svmm::sim {

struct SimConfig {
  double horizon = 1.0;
  double dt = 0.005;
  int q0 = 0;
  double x0 = 0.0;
  heston::HestonParams heston;
  intensity::ArrivalParams arrival;
  quotes::RiskParams risk;
  heston::Scheme scheme = heston::Scheme::binomial;
  // Permanent mid-price impact of risk.eta per fill.
  bool impact = false;
  // Include q^2 eta^2 (dN^a + dN^b) in the accumulated quadratic variation.
  bool qv_impact_term = true;
  // Snapshot every `snapshot_stride` steps (plus t = 0 and t = T).
  int snapshot_stride = 1;
  unsigned threads = 1;

  void validate() const;
  [[nodiscard]] int n_steps() const;
  [[nodiscard]] quotes::QuoteContext quote_context() const;
  // Snapshot times, identical for every path.
  [[nodiscard]] std::vector<double> snapshot_times() const;
};

struct Snapshot {
  double t = 0.0;
  double s = 0.0;
  double nu = 0.0;
  double p_a = 0.0;  // ask price, +inf without a resting order
  double p_b = 0.0;  // bid price, -inf without a resting order
  int q = 0;
  double x = 0.0;
  double z = 0.0;
};

struct PathRecord {
  std::uint64_t index = 0;
  double x = 0.0;
  int q = 0;
  double s = 0.0;
  double nu = 0.0;
  double z = 0.0;
  double qv = 0.0;
  double inventory_pnl = 0.0;  // sum of q * dS
  double profit = 0.0;         // x - x0 + q (s - beta)
  double objective = 0.0;      // z - beta q
  double avg_spread = 0.0;     // mean quoted spread over steps with two-sided quotes; 0 if none
  int quoted_steps = 0;
  int ask_fills = 0;
  int bid_fills = 0;
  int clipped = 0;
  std::vector<Snapshot> series;
};

// One path of the quote / fill / price-update loop. Randomness comes from
// stream_seed(seed, index) only. Snapshots are stored iff `record_series`.
PathRecord run_path(const quotes::Policy& policy, const SimConfig& config, std::uint64_t seed,
                    std::uint64_t index, bool record_series = true);

struct EnsembleStats {
  std::size_t n = 0;
  stats::Summary profit;
  stats::Summary q_T;
  stats::Summary z;
  stats::Summary objective;
  stats::Summary qv;
  stats::Summary inventory_pnl;
  double avg_spread = 0.0;  // mean of per-path average spreads over paths that quoted
  std::vector<double> curve_t;
  std::vector<double> curve_mean;  // E[q_t]
  std::vector<double> curve_se;
  stats::Histogram profit_histogram;
  std::vector<PathRecord> paths;  // terminal records, series omitted
};

EnsembleStats run_ensemble(const quotes::Policy& policy, const SimConfig& config, std::size_t n,
                           std::uint64_t seed, std::size_t histogram_bins = 40);

// Symmetric policy whose spread is the average spread of the inventory
// policy on the same seed (market_impact kind when config.impact).
struct Comparison {
  EnsembleStats inventory;
  EnsembleStats symmetric;
  double symmetric_spread = 0.0;
};

Comparison compare_strategies(const SimConfig& config, std::size_t n, std::uint64_t seed,
                              quotes::ImpactVariant variant = quotes::ImpactVariant::full);

struct FrontierPoint {
  double gamma = 0.0;
  double variance = 0.0;  // mean of qv
  double variance_se = 0.0;
  double objective = 0.0;  // mean of z - beta q_T
  double objective_se = 0.0;
  double profit = 0.0;
  double profit_se = 0.0;
};

// One inventory-policy ensemble per gamma, all on the same seed.
std::vector<FrontierPoint> efficient_frontier(const SimConfig& config, const std::vector<double>& gammas,
                                              std::size_t n, std::uint64_t seed);

struct TradingCurve {
  double gamma = 0.0;
  std::vector<double> t;
  std::vector<double> mean_q;
  std::vector<double> se_q;
};

TradingCurve trading_curve(const quotes::Policy& policy, const SimConfig& config, std::size_t n,
                           std::uint64_t seed);

}  // namespace svmm::sim
