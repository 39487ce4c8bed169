#pragma once

#include "svmm/heston.hpp"
#include "svmm/intensity.hpp"

#include <optional>
#include <string_view>

namespace svmm::quotes {

struct RiskParams {
  double gamma = 0.1;  // risk aversion
  double beta = 0.03;  // terminal clearing fee per share
  double eta = 0.0;    // permanent impact per fill

  void validate() const;
};

// Which closed form to use for the impact-adjusted quotes. `full`
// adds gamma*A*eta^2*(T-t) to the inventory coefficient; `reduced` omits it.
enum class ImpactVariant { reduced, full };

enum class PolicyKind { inventory_sv, market_impact, symmetric, frozen, risk_neutral };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);
std::string_view to_string(ImpactVariant v);
ImpactVariant parse_impact_variant(std::string_view name);

struct Policy {
  PolicyKind kind = PolicyKind::inventory_sv;
  // Only read for `symmetric`; must be > 0 there.
  std::optional<double> avg_spread;
  ImpactVariant impact_variant = ImpactVariant::full;

  void validate() const;
};

// Everything a closed-form quote needs besides (q, nu, t).
struct QuoteContext {
  double horizon = 1.0;  // T
  heston::HestonParams heston;
  intensity::ArrivalParams arrival;
  RiskParams risk;
};

// Inventory-risk coefficient
//   f(nu, t) = (gamma/2) E_t[ int_t^T nu_u du ]
//            = (gamma/2theta)(nu-alpha)[1-e^{-theta(T-t)}] + (gamma/2) alpha (T-t).
// theta = 0 gives (gamma/2) nu (T-t).
double inventory_coefficient(double nu, double t, const QuoteContext& ctx);

// Approximate optimal quotes without impact:
//   delta_a = 1/k - beta - f (2q - 1),  delta_b = 1/k + beta + f (2q + 1).
QuotePair inventory_quotes(int q, double nu, double t, const QuoteContext& ctx);

struct SpreadAdjustment {
  double spread = 0.0;  // delta_a + delta_b
  double m = 0.0;       // delta_a - delta_b
};

SpreadAdjustment spread_and_adjustment(int q, double nu, double t, const QuoteContext& ctx);

// Approximate optimal quotes with constant permanent impact eta.
QuotePair impact_quotes(int q, double nu, double t, const QuoteContext& ctx,
                          ImpactVariant variant);

// Constant or absent quotes of the benchmark policies. Returns nullopt for
// `frozen` (no resting orders). Throws for the model-driven kinds.
std::optional<QuotePair> benchmark_quotes(const Policy& policy, const QuoteContext& ctx);

// Dispatch on the policy kind. nullopt means no quotes this step.
std::optional<QuotePair> policy_quotes(const Policy& policy, int q, double nu, double t,
                                       const QuoteContext& ctx);

struct ClosedFormValues {
  double frozen = 0.0;        // value of holding q to T without quoting
  double approx = 0.0;        // q^2 f2(nu, t) from the quadratic expansion
  double risk_neutral = 0.0;  // gamma = 0 value (A e^{-1}/k)(e^{k beta}+e^{-k beta})(T-t)
};

ClosedFormValues closed_form_values(int q, double nu, double t, const QuoteContext& ctx);

}  // namespace svmm::quotes
