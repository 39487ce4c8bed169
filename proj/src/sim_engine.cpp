#include "svmm/sim_engine.hpp"

#include "svmm/error.hpp"
#include "svmm/parallel.hpp"
#include "svmm/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace svmm::sim {

void SimConfig::validate() const {
  heston.validate();
  arrival.validate();
  risk.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("sim: T must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("sim: dt must be > 0");
  if (!std::isfinite(x0)) throw ConfigError("sim: x0 must be finite");
  const double steps = horizon / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    throw ConfigError("sim: dt must divide T");
  }
  if (snapshot_stride < 1) throw ConfigError("sim: snapshot_stride must be >= 1");
}

int SimConfig::n_steps() const { return static_cast<int>(std::llround(horizon / dt)); }

quotes::QuoteContext SimConfig::quote_context() const {
  return quotes::QuoteContext{horizon, heston, arrival, risk};
}

std::vector<double> SimConfig::snapshot_times() const {
  std::vector<double> t;
  const int n = n_steps();
  for (int step = 0; step <= n; ++step) {
    if (step % snapshot_stride == 0 || step == n) t.push_back(step * dt);
  }
  return t;
}

PathRecord run_path(const quotes::Policy& policy, const SimConfig& config, std::uint64_t seed,
                    std::uint64_t index, bool record_series) {
  const quotes::QuoteContext ctx = config.quote_context();
  const int n_steps = config.n_steps();
  const double eta = config.risk.eta;
  constexpr double inf = std::numeric_limits<double>::infinity();

  PathRng rng(stream_seed(seed, index));
  PathRecord rec;
  rec.index = index;
  heston::MidState mid{0.0, config.heston.s0, config.heston.nu0};
  int q = config.q0;
  double x = config.x0;
  double z = 0.0;
  double qv = 0.0;
  double inv_pnl = 0.0;
  double spread_sum = 0.0;

  auto snapshot = [&](const std::optional<QuotePair>& quote) {
    if (!record_series) return;
    rec.series.push_back({mid.t, mid.s, mid.nu, quote ? mid.s + quote->delta_a : inf,
                          quote ? mid.s - quote->delta_b : -inf, q, x, z});
  };

  for (int step = 0; step < n_steps; ++step) {
    mid.t = step * config.dt;
    const auto quote = quotes::policy_quotes(policy, q, mid.nu, mid.t, ctx);
    if (step % config.snapshot_stride == 0) snapshot(quote);

    // Draw all variates every step so that paths stay aligned across policies.
    const double u_ask = rng.uniform();
    const double u_bid = rng.uniform();
    const heston::Draws draws = heston::draw(rng, config.scheme);

    int dn_a = 0;
    int dn_b = 0;
    if (quote) {
      ++rec.quoted_steps;
      spread_sum += quote->spread();
      const auto fills = intensity::sample_fills(*quote, config.arrival, config.dt, u_ask, u_bid);
      rec.clipped += fills.clipped;
      if (fills.ask_filled) {
        x += mid.s + quote->delta_a;
        q -= 1;
        z += quote->delta_a;
        dn_a = 1;
      }
      if (fills.bid_filled) {
        x -= mid.s - quote->delta_b;
        q += 1;
        z += quote->delta_b;
        dn_b = 1;
      }
    }
    rec.ask_fills += dn_a;
    rec.bid_fills += dn_b;

    const double nu_pre = std::max(mid.nu, 0.0);
    heston::MidState next = heston::step_state(mid, config.heston, config.dt, draws);
    if (config.impact) next.s += eta * (dn_a - dn_b);
    const double qd = q;
    inv_pnl += qd * (next.s - mid.s);
    qv += qd * qd * nu_pre * config.dt;
    if (config.impact && config.qv_impact_term) qv += qd * qd * eta * eta * (dn_a + dn_b);
    mid = next;

    if (!std::isfinite(x) || !std::isfinite(mid.s) || !std::isfinite(mid.nu) || !std::isfinite(qv)) {
      throw NumericalError("non-finite state at step " + std::to_string(step) + " of path " +
                           std::to_string(index));
    }
  }
  mid.t = config.horizon;
  snapshot(std::nullopt);

  rec.x = x;
  rec.q = q;
  rec.s = mid.s;
  rec.nu = mid.nu;
  rec.z = z;
  rec.qv = qv;
  rec.inventory_pnl = inv_pnl;
  rec.profit = x - config.x0 + q * (mid.s - config.risk.beta);
  rec.objective = z - config.risk.beta * q;
  rec.avg_spread = rec.quoted_steps > 0 ? spread_sum / rec.quoted_steps : 0.0;
  return rec;
}

EnsembleStats run_ensemble(const quotes::Policy& policy, const SimConfig& config, std::size_t n,
                           std::uint64_t seed, std::size_t histogram_bins) {
  config.validate();
  policy.validate();
  if (n < 1) throw ConfigError("ensemble: n must be >= 1");

  const std::vector<double> times = config.snapshot_times();
  std::vector<PathRecord> paths(n);
  std::vector<std::vector<int>> curves(n);
  parallel_for(n, config.threads, [&](std::size_t p) {
    try {
      PathRecord rec = run_path(policy, config, seed, p, true);
      curves[p].reserve(rec.series.size());
      for (const auto& snap : rec.series) curves[p].push_back(snap.q);
      rec.series.clear();
      rec.series.shrink_to_fit();
      paths[p] = std::move(rec);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (seed " + std::to_string(seed) + ", path " +
                           std::to_string(p) + ")");
    }
  });

  EnsembleStats out;
  out.n = n;
  std::vector<double> buf(n);
  auto collect = [&](auto getter) {
    for (std::size_t p = 0; p < n; ++p) buf[p] = getter(paths[p]);
    return stats::summarize(buf);
  };
  out.profit = collect([](const PathRecord& r) { return r.profit; });
  out.profit_histogram = stats::histogram(buf, histogram_bins);
  out.q_T = collect([](const PathRecord& r) { return static_cast<double>(r.q); });
  out.z = collect([](const PathRecord& r) { return r.z; });
  out.objective = collect([](const PathRecord& r) { return r.objective; });
  out.qv = collect([](const PathRecord& r) { return r.qv; });
  out.inventory_pnl = collect([](const PathRecord& r) { return r.inventory_pnl; });

  double spread_sum = 0.0;
  std::size_t quoting = 0;
  for (const auto& r : paths) {
    if (r.quoted_steps > 0) {
      spread_sum += r.avg_spread;
      ++quoting;
    }
  }
  out.avg_spread = quoting > 0 ? spread_sum / static_cast<double>(quoting) : 0.0;

  out.curve_t = times;
  out.curve_mean.resize(times.size());
  out.curve_se.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t p = 0; p < n; ++p) buf[p] = curves[p][k];
    const auto s = stats::summarize(buf);
    out.curve_mean[k] = s.mean;
    out.curve_se[k] = s.se;
  }
  out.paths = std::move(paths);
  return out;
}

Comparison compare_strategies(const SimConfig& config, std::size_t n, std::uint64_t seed,
                              quotes::ImpactVariant variant) {
  quotes::Policy inventory;
  inventory.kind = config.impact ? quotes::PolicyKind::market_impact : quotes::PolicyKind::inventory_sv;
  inventory.impact_variant = variant;
  Comparison out;
  out.inventory = run_ensemble(inventory, config, n, seed);
  out.symmetric_spread = out.inventory.avg_spread;
  quotes::Policy symmetric;
  symmetric.kind = quotes::PolicyKind::symmetric;
  symmetric.avg_spread = out.symmetric_spread;
  out.symmetric = run_ensemble(symmetric, config, n, seed);
  return out;
}

std::vector<FrontierPoint> efficient_frontier(const SimConfig& config, const std::vector<double>& gammas,
                                              std::size_t n, std::uint64_t seed) {
  if (gammas.empty()) throw ConfigError("frontier: gamma list is empty");
  quotes::Policy policy;
  policy.kind = config.impact ? quotes::PolicyKind::market_impact : quotes::PolicyKind::inventory_sv;
  std::vector<FrontierPoint> out;
  out.reserve(gammas.size());
  for (double g : gammas) {
    SimConfig c = config;
    c.risk.gamma = g;
    const EnsembleStats e = run_ensemble(policy, c, n, seed);
    out.push_back({g, e.qv.mean, e.qv.se, e.objective.mean, e.objective.se, e.profit.mean, e.profit.se});
  }
  return out;
}

TradingCurve trading_curve(const quotes::Policy& policy, const SimConfig& config, std::size_t n,
                           std::uint64_t seed) {
  const EnsembleStats e = run_ensemble(policy, config, n, seed);
  return {config.risk.gamma, e.curve_t, e.curve_mean, e.curve_se};
}

}  // namespace svmm::sim
