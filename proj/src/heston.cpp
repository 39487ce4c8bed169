#include "svmm/heston.hpp"

#include "svmm/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace svmm::heston {

namespace {

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

// 1 - exp(-x), accurate for small x.
double one_minus_exp(double x) { return -std::expm1(-x); }

}  // namespace

void HestonParams::validate() const {
  if (!finite_all({theta, alpha, xi, rho, s0, nu0})) {
    throw ConfigError("heston: parameters must be finite");
  }
  if (theta < 0.0) throw ConfigError("heston: theta must be >= 0");
  if (alpha < 0.0) throw ConfigError("heston: alpha must be >= 0");
  if (xi < 0.0) throw ConfigError("heston: xi must be >= 0");
  if (nu0 < 0.0) throw ConfigError("heston: nu0 must be >= 0");
  if (std::abs(rho) > 1.0) throw ConfigError("heston: |rho| must be <= 1");
}

Draws draw(PathRng& rng, Scheme scheme) {
  if (scheme == Scheme::binomial) {
    const double a = rng.sign();
    const double b = rng.sign();
    return {a, b};
  }
  const double a = rng.normal();
  const double b = rng.normal();
  return {a, b};
}

MidState step_state(const MidState& state, const HestonParams& params, double dt,
                    const Draws& draws) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("step_state: dt must be positive and finite");
  }
  if (!finite_all({state.t, state.s, state.nu, draws.price, draws.perp})) {
    throw NumericalError("step_state: non-finite state at t=" + std::to_string(state.t));
  }
  if (state.nu < 0.0) throw ConfigError("step_state: nu must be >= 0");

  const double nu_plus = std::max(state.nu, 0.0);
  const double vol = std::sqrt(nu_plus);
  const double sqrt_dt = std::sqrt(dt);
  const double vol_shock =
      params.rho * draws.price + std::sqrt(1.0 - params.rho * params.rho) * draws.perp;

  MidState next;
  next.t = state.t + dt;
  next.s = state.s + vol * draws.price * sqrt_dt;
  next.nu = nu_plus + params.theta * (params.alpha - nu_plus) * dt +
            params.xi * vol * vol_shock * sqrt_dt;
  next.nu = std::max(next.nu, 0.0);
  return next;
}

ConditionalMoments conditional_moments(double nu, const HestonParams& p, double tau) {
  if (!(tau >= 0.0)) throw ConfigError("conditional_moments: tau must be >= 0");
  if (!(nu >= 0.0)) throw ConfigError("conditional_moments: nu must be >= 0");

  const double xi2 = p.xi * p.xi;
  ConditionalMoments m;
  if (p.theta == 0.0) {
    m.mean = nu;
    m.var = xi2 * nu * tau;
    m.second_moment = nu * nu + xi2 * nu * tau;
    return m;
  }

  const double e1 = std::exp(-p.theta * tau);
  const double e2 = e1 * e1;
  const double d1 = one_minus_exp(p.theta * tau);         // 1 - e^{-theta tau}
  const double d2 = one_minus_exp(2.0 * p.theta * tau);   // 1 - e^{-2 theta tau}
  const double e1_minus_e2 = e1 * d1;                      // e^{-theta tau} - e^{-2 theta tau}

  m.mean = e1 * nu + p.alpha * d1;
  m.var = xi2 / p.theta * nu * e1_minus_e2 + p.alpha * xi2 / (2.0 * p.theta) * d1 * d1;

  const double c = 2.0 * p.theta * p.alpha + xi2;
  m.second_moment = e2 * nu * nu + c / p.theta * (nu - p.alpha) * e1_minus_e2 +
                    c / (2.0 * p.theta) * p.alpha * d2;
  return m;
}

double integrated_mean(double nu, const HestonParams& p, double tau) {
  if (!(tau >= 0.0)) throw ConfigError("integrated_mean: tau must be >= 0");
  if (p.theta == 0.0) return nu * tau;
  return (nu - p.alpha) * one_minus_exp(p.theta * tau) / p.theta + p.alpha * tau;
}

}  // namespace svmm::heston
