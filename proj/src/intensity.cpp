#include "svmm/intensity.hpp"

#include "svmm/error.hpp"

#include <cmath>
#include <limits>

namespace svmm::intensity {

void ArrivalParams::validate() const {
  // A = 0 is accepted as the no-trading limit.
  if (!std::isfinite(A) || A < 0.0) throw ConfigError("arrival: A must be >= 0");
  if (!std::isfinite(k) || k <= 0.0) throw ConfigError("arrival: k must be > 0");
}

double intensity(double delta, const ArrivalParams& params) {
  if (!std::isfinite(delta)) {
    if (delta == std::numeric_limits<double>::infinity()) return 0.0;
    throw ConfigError("intensity: delta must be finite");
  }
  return params.A * std::exp(-params.k * delta);
}

FillOutcome sample_fills(const QuotePair& quotes, const ArrivalParams& params, double dt,
                         double u_ask, double u_bid) {
  if (!(dt > 0.0)) throw ConfigError("sample_fills: dt must be > 0");
  FillOutcome out;
  auto probability = [&](double delta) {
    const double p = intensity(delta, params) * dt;
    if (p > 1.0) {
      ++out.clipped;
      return 1.0;
    }
    return p;
  };
  const double pa = probability(quotes.delta_a);
  const double pb = probability(quotes.delta_b);
  out.ask_filled = u_ask < pa;
  out.bid_filled = u_bid < pb;
  return out;
}

}  // namespace svmm::intensity
