#include "svmm/quotes.hpp"

#include "svmm/error.hpp"

#include <cmath>
#include <string>

namespace svmm::quotes {

namespace {

void check_time(double t, const QuoteContext& ctx) {
  if (!std::isfinite(t) || t < 0.0) throw ConfigError("quotes: t must be >= 0");
  if (t > ctx.horizon) throw ConfigError("quotes: t must not exceed the horizon T");
}

}  // namespace

void RiskParams::validate() const {
  if (!std::isfinite(gamma) || gamma < 0.0) throw ConfigError("risk: gamma must be >= 0");
  if (!std::isfinite(beta) || beta < 0.0) throw ConfigError("risk: beta must be >= 0");
  if (!std::isfinite(eta) || eta < 0.0) throw ConfigError("risk: eta must be >= 0");
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::inventory_sv: return "inventory";
    case PolicyKind::market_impact: return "impact";
    case PolicyKind::symmetric: return "symmetric";
    case PolicyKind::frozen: return "frozen";
    case PolicyKind::risk_neutral: return "risk_neutral";
  }
  return "?";
}

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "inventory") return PolicyKind::inventory_sv;
  if (name == "impact") return PolicyKind::market_impact;
  if (name == "symmetric") return PolicyKind::symmetric;
  if (name == "frozen") return PolicyKind::frozen;
  if (name == "risk_neutral") return PolicyKind::risk_neutral;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

std::string_view to_string(ImpactVariant v) {
  return v == ImpactVariant::reduced ? "reduced" : "full";
}

ImpactVariant parse_impact_variant(std::string_view name) {
  if (name == "reduced") return ImpactVariant::reduced;
  if (name == "full") return ImpactVariant::full;
  throw ConfigError("unknown impact variant '" + std::string(name) + "'");
}

void Policy::validate() const {
  if (kind == PolicyKind::symmetric) {
    if (!avg_spread) throw ConfigError("symmetric policy requires an average spread");
    if (!(*avg_spread > 0.0) || !std::isfinite(*avg_spread)) {
      throw ConfigError("symmetric policy requires avg_spread > 0");
    }
  }
}

double inventory_coefficient(double nu, double t, const QuoteContext& ctx) {
  check_time(t, ctx);
  const double tau = ctx.horizon - t;
  return 0.5 * ctx.risk.gamma * heston::integrated_mean(nu, ctx.heston, tau);
}

QuotePair inventory_quotes(int q, double nu, double t, const QuoteContext& ctx) {
  const double f = inventory_coefficient(nu, t, ctx);
  const double base = 1.0 / ctx.arrival.k;
  const double beta = ctx.risk.beta;
  return {base - beta - f * (2.0 * q - 1.0), base + beta + f * (2.0 * q + 1.0)};
}

SpreadAdjustment spread_and_adjustment(int q, double nu, double t, const QuoteContext& ctx) {
  const QuotePair d = inventory_quotes(q, nu, t, ctx);
  return {d.delta_a + d.delta_b, d.delta_a - d.delta_b};
}

QuotePair impact_quotes(int q, double nu, double t, const QuoteContext& ctx,
                          ImpactVariant variant) {
  double f = inventory_coefficient(nu, t, ctx);
  const double eta2 = ctx.risk.eta * ctx.risk.eta;
  if (variant == ImpactVariant::full) {
    f += ctx.risk.gamma * ctx.arrival.A * eta2 * (ctx.horizon - t);
  }
  const double half_impact = 0.5 * ctx.risk.gamma * eta2;
  const double base = 1.0 / ctx.arrival.k;
  const double beta = ctx.risk.beta;
  const double qm = q - 1.0;
  const double qp = q + 1.0;
  return {base - beta + half_impact * qm * qm - f * (2.0 * q - 1.0),
          base + beta + half_impact * qp * qp + f * (2.0 * q + 1.0)};
}

std::optional<QuotePair> benchmark_quotes(const Policy& policy, const QuoteContext& ctx) {
  policy.validate();
  switch (policy.kind) {
    case PolicyKind::risk_neutral: {
      const double base = 1.0 / ctx.arrival.k;
      return QuotePair{base - ctx.risk.beta, base + ctx.risk.beta};
    }
    case PolicyKind::symmetric:
      return QuotePair{0.5 * *policy.avg_spread, 0.5 * *policy.avg_spread};
    case PolicyKind::frozen:
      return std::nullopt;
    default:
      throw ConfigError("benchmark_quotes: not a benchmark policy");
  }
}

std::optional<QuotePair> policy_quotes(const Policy& policy, int q, double nu, double t,
                                       const QuoteContext& ctx) {
  switch (policy.kind) {
    case PolicyKind::inventory_sv: return inventory_quotes(q, nu, t, ctx);
    case PolicyKind::market_impact: return impact_quotes(q, nu, t, ctx, policy.impact_variant);
    default: return benchmark_quotes(policy, ctx);
  }
}

ClosedFormValues closed_form_values(int q, double nu, double t, const QuoteContext& ctx) {
  const double f = inventory_coefficient(nu, t, ctx);
  const double q2 = static_cast<double>(q) * q;
  const double k = ctx.arrival.k;
  const double kb = k * ctx.risk.beta;
  ClosedFormValues v;
  v.frozen = -q2 * f;
  v.approx = q2 * (-f);
  v.risk_neutral = ctx.arrival.A * std::exp(-1.0) / k * (std::exp(kb) + std::exp(-kb)) *
                   (ctx.horizon - t);
  return v;
}

}  // namespace svmm::quotes
