#pragma once

#include "svmm/rng.hpp"

namespace svmm::heston {

// Arithmetic Heston model:
//   dS = sqrt(nu) dW
//   dnu = theta (alpha - nu) dt + xi sqrt(nu) dB,   d<W, B> = rho dt
struct HestonParams {
  double theta = 0.02;  // mean-reversion rate
  double alpha = 4.0;   // long-run variance
  double xi = 0.5;      // vol of vol
  double rho = 0.7;
  double s0 = 100.0;
  double nu0 = 4.0;

  // Throws ConfigError on negative rates, |rho| > 1 or non-finite fields.
  void validate() const;

  // 2 theta alpha >= xi^2. Informational only.
  [[nodiscard]] bool feller_satisfied() const noexcept {
    return 2.0 * theta * alpha >= xi * xi;
  }
};

struct MidState {
  double t = 0.0;
  double s = 0.0;
  double nu = 0.0;
};

enum class Scheme { binomial, gaussian };

// One pair of driving variates. For the binomial scheme both entries are
// +1/-1 signs, for the gaussian scheme both are standard normals. `perp` is
// independent of `price`; the variance shock is rho*price + sqrt(1-rho^2)*perp.
struct Draws {
  double price = 0.0;
  double perp = 0.0;
};

Draws draw(PathRng& rng, Scheme scheme);

// Full-truncation Euler step: sqrt is taken of max(nu, 0) and the new
// variance is clamped at zero.
MidState step_state(const MidState& state, const HestonParams& params, double dt,
                    const Draws& draws);

struct ConditionalMoments {
  double mean = 0.0;
  double var = 0.0;
  double second_moment = 0.0;
};

// Closed-form E[nu_{t+tau} | nu_t = nu], Var and E[nu^2]. theta == 0 uses the
// analytic limit (mean = nu, var = xi^2 nu tau).
ConditionalMoments conditional_moments(double nu, const HestonParams& params, double tau);

// E[ int_0^tau nu_u du | nu_0 = nu ].
double integrated_mean(double nu, const HestonParams& params, double tau);

}  // namespace svmm::heston
