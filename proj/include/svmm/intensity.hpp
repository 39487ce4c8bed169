#pragma once

#include <cstdint>

namespace svmm {

// Ask/bid premiums relative to the mid: ask price = s + delta_a,
// bid price = s - delta_b. Negative premiums (quotes through the mid) are
// allowed.
struct QuotePair {
  double delta_a = 0.0;
  double delta_b = 0.0;

  [[nodiscard]] double spread() const noexcept { return delta_a + delta_b; }
};

namespace intensity {

// lambda(delta) = A exp(-k delta)
struct ArrivalParams {
  double A = 140.0;
  double k = 1.5;

  void validate() const;
};

double intensity(double delta, const ArrivalParams& params);

struct FillOutcome {
  bool ask_filled = false;
  bool bid_filled = false;
  // Number of sides (0..2) whose lambda*dt exceeded 1 and was clipped.
  int clipped = 0;
};

// At most one fill per side per step, each side an independent Bernoulli
// with probability min(lambda*dt, 1). `u_ask`, `u_bid` are uniforms in [0,1).
FillOutcome sample_fills(const QuotePair& quotes, const ArrivalParams& params, double dt,
                         double u_ask, double u_bid);

}  // namespace intensity
}  // namespace svmm
