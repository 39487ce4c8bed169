#include "svmm/option_pricing.hpp"

#include "svmm/error.hpp"
#include "svmm/finite_difference.hpp"
#include "svmm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace svmm::option {

namespace {

double vol_risk_drift(double nu, const heston::HestonParams& p, double eta_nu) {
  return p.theta * (p.alpha - nu) -
         p.xi * std::sqrt(std::max(nu, 0.0)) * std::sqrt(1.0 - p.rho * p.rho) * eta_nu;
}

// nu-direction operator 1/2 xi^2 nu d2 + b(nu) d1 at each nu node; one-sided
// first derivative and zero curvature at both ends.
std::vector<fd::Stencil> nu_operator(const std::vector<double>& nu, const heston::HestonParams& p,
                                     double eta_nu) {
  const std::size_t n = nu.size();
  std::vector<fd::Stencil> ops(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = vol_risk_drift(nu[i], p, eta_nu);
    const double diff = 0.5 * p.xi * p.xi * nu[i];
    if (i == 0) {
      const double h = nu[1] - nu[0];
      ops[i] = {0.0, -b / h, b / h};
      continue;
    }
    if (i + 1 == n) {
      const double h = nu[i] - nu[i - 1];
      ops[i] = {-b / h, b / h, 0.0};
      continue;
    }
    const double hm = nu[i] - nu[i - 1];
    const double hp = nu[i + 1] - nu[i];
    const fd::Stencil d2 = fd::central_second(hm, hp);
    fd::Stencil d1 = fd::central_first(hm, hp);
    fd::Stencil s{diff * d2.lower, diff * d2.centre, diff * d2.upper};
    if (s.lower + b * d1.lower < 0.0 || s.upper + b * d1.upper < 0.0) {
      d1 = b > 0.0 ? fd::Stencil{0.0, -1.0 / hp, 1.0 / hp} : fd::Stencil{-1.0 / hm, 1.0 / hm, 0.0};
    }
    ops[i] = {s.lower + b * d1.lower, s.centre + b * d1.centre, s.upper + b * d1.upper};
  }
  return ops;
}

class DouglasSolver {
public:
  explicit DouglasSolver(const PricingConfig& c)
      : c_(c), s_(c.s_grid), nu_(c.nu_grid), ns_(s_.size()), nn_(nu_.size()),
        nu_ops_(nu_operator(nu_, c.heston, c.eta_nu)) {
    s2_.resize(ns_);
    for (std::size_t j = 1; j + 1 < ns_; ++j) {
      s2_[j] = fd::central_second(s_[j] - s_[j - 1], s_[j + 1] - s_[j]);
    }
  }

  std::size_t at(std::size_t j, std::size_t i) const { return j * nn_ + i; }

  // Mixed term xi rho nu C_snu on interior s nodes.
  void apply_mixed(const std::vector<double>& u, std::vector<double>& out) const {
    const double coef = c_.heston.xi * c_.heston.rho;
    for (std::size_t j = 1; j + 1 < ns_; ++j) {
      const double ds = s_[j + 1] - s_[j - 1];
      for (std::size_t i = 0; i < nn_; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == nn_ ? i : i + 1;
        const double dn = nu_[hi] - nu_[lo];
        const double cross = (u[at(j + 1, hi)] - u[at(j + 1, lo)] - u[at(j - 1, hi)] + u[at(j - 1, lo)]) /
                             (ds * dn);
        out[at(j, i)] = coef * nu_[i] * cross;
      }
    }
  }

  void apply_s(const std::vector<double>& u, std::vector<double>& out) const {
    for (std::size_t j = 1; j + 1 < ns_; ++j) {
      for (std::size_t i = 0; i < nn_; ++i) {
        const double a = 0.5 * nu_[i];
        out[at(j, i)] = a * (s2_[j].lower * u[at(j - 1, i)] + s2_[j].centre * u[at(j, i)] +
                             s2_[j].upper * u[at(j + 1, i)]);
      }
    }
  }

  void apply_nu(const std::vector<double>& u, std::vector<double>& out) const {
    for (std::size_t j = 1; j + 1 < ns_; ++j) {
      for (std::size_t i = 0; i < nn_; ++i) {
        const fd::Stencil& st = nu_ops_[i];
        double v = st.centre * u[at(j, i)];
        if (i > 0) v += st.lower * u[at(j, i - 1)];
        if (i + 1 < nn_) v += st.upper * u[at(j, i + 1)];
        out[at(j, i)] = v;
      }
    }
  }

  // One Douglas step of size dtau with weight w on the implicit corrections.
  void step(std::vector<double>& u, double dtau, double w) {
    y_.assign(u.size(), 0.0);
    a0_.assign(u.size(), 0.0);
    a1_.assign(u.size(), 0.0);
    a2_.assign(u.size(), 0.0);
    apply_mixed(u, a0_);
    apply_s(u, a1_);
    apply_nu(u, a2_);
    y_ = u;
    for (std::size_t j = 1; j + 1 < ns_; ++j) {
      for (std::size_t i = 0; i < nn_; ++i) {
        const std::size_t k = at(j, i);
        y_[k] = u[k] + dtau * (a0_[k] + a1_[k] + a2_[k]);
      }
    }

    // s-direction: (I - w dtau A1) Y1 = Y0 - w dtau A1 U.
    const std::size_t m = ns_ - 2;
    lo_.resize(m);
    di_.resize(m);
    up_.resize(m);
    rhs_.resize(m);
    for (std::size_t i = 0; i < nn_; ++i) {
      const double a = 0.5 * nu_[i];
      for (std::size_t r = 0; r < m; ++r) {
        const std::size_t j = r + 1;
        lo_[r] = -w * dtau * a * s2_[j].lower;
        di_[r] = 1.0 - w * dtau * a * s2_[j].centre;
        up_[r] = -w * dtau * a * s2_[j].upper;
        rhs_[r] = y_[at(j, i)] - w * dtau * a1_[at(j, i)];
      }
      rhs_[0] -= lo_[0] * u[at(0, i)];
      rhs_[m - 1] -= up_[m - 1] * u[at(ns_ - 1, i)];
      fd::solve_tridiagonal(lo_, di_, up_, rhs_, scratch_);
      for (std::size_t r = 0; r < m; ++r) y_[at(r + 1, i)] = rhs_[r];
    }

    // nu-direction: (I - w dtau A2) Y2 = Y1 - w dtau A2 U.
    lo_.resize(nn_);
    di_.resize(nn_);
    up_.resize(nn_);
    rhs_.resize(nn_);
    for (std::size_t i = 0; i < nn_; ++i) {
      lo_[i] = -w * dtau * nu_ops_[i].lower;
      di_[i] = 1.0 - w * dtau * nu_ops_[i].centre;
      up_[i] = -w * dtau * nu_ops_[i].upper;
    }
    for (std::size_t j = 1; j + 1 < ns_; ++j) {
      for (std::size_t i = 0; i < nn_; ++i) rhs_[i] = y_[at(j, i)] - w * dtau * a2_[at(j, i)];
      fd::solve_tridiagonal(lo_, di_, up_, rhs_, scratch_);
      for (std::size_t i = 0; i < nn_; ++i) u[at(j, i)] = rhs_[i];
    }
  }

private:
  const PricingConfig& c_;
  const std::vector<double>& s_;
  const std::vector<double>& nu_;
  std::size_t ns_;
  std::size_t nn_;
  std::vector<fd::Stencil> nu_ops_;
  std::vector<fd::Stencil> s2_;
  std::vector<double> y_, a0_, a1_, a2_;
  std::vector<double> lo_, di_, up_, rhs_, scratch_;
};

}  // namespace

void PricingConfig::validate_model() const {
  heston.validate();
  if (!std::isfinite(strike) || strike < 0.0) throw ConfigError("pricing: strike must be >= 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("pricing: T must be > 0");
  if (!std::isfinite(eta_nu)) throw ConfigError("pricing: eta_nu must be finite");
}

void PricingConfig::validate() const {
  validate_model();
  if (!(strike > 0.0)) throw ConfigError("pricing: strike must be > 0");
  fd::require_grid(s_grid, 5, "pricing s_grid");
  fd::require_grid(nu_grid, 3, "pricing nu_grid");
  if (nu_grid.front() < 0.0) throw ConfigError("pricing: nu grid must start at >= 0");
  if (!(strike > s_grid.front() && strike < s_grid.back())) {
    throw ConfigError("pricing: strike lies outside the s-grid interior");
  }
  if (n_time < 2) throw ConfigError("pricing: n_time must be >= 2");
  if (n_slices < 2 || n_time % (n_slices - 1) != 0) {
    throw ConfigError("pricing: n_time must be a multiple of n_slices - 1");
  }
}

PricingConfig default_pricing_config(const heston::HestonParams& heston, double strike,
                                     double horizon, double eta_nu, std::size_t s_nodes,
                                     std::size_t nu_nodes, int n_time) {
  PricingConfig c;
  c.strike = strike;
  c.horizon = horizon;
  c.eta_nu = eta_nu;
  c.heston = heston;
  const double width = 8.0 * std::sqrt(std::max(heston.alpha, heston.nu0) * horizon);
  c.s_grid = fd::uniform_grid(heston.s0 - width, heston.s0 + width, s_nodes);
  c.nu_grid = fd::uniform_grid(0.0, std::max(4.0 * heston.alpha, 3.0 * heston.nu0), nu_nodes);
  c.n_time = n_time;
  c.n_slices = 41;
  while (c.n_time % (c.n_slices - 1) != 0 && c.n_slices > 2) --c.n_slices;
  return c;
}

PricingGrid::PricingGrid(std::vector<double> s, std::vector<double> nu, std::vector<double> times,
                         double strike)
    : s_(std::move(s)), nu_(std::move(nu)), times_(std::move(times)), strike_(strike) {
  data_.assign(kFields * times_.size() * s_.size() * nu_.size(), 0.0);
}

Greeks PricingGrid::node_greeks(std::size_t k, std::size_t j, std::size_t i) const {
  return {field(0, k, j, i), field(1, k, j, i), field(2, k, j, i), field(3, k, j, i),
          field(4, k, j, i), field(5, k, j, i), field(6, k, j, i)};
}

bool PricingGrid::contains(double s, double nu) const noexcept {
  return s >= s_.front() && s <= s_.back() && nu >= nu_.front() && nu <= nu_.back();
}

Greeks PricingGrid::interpolate(double s, double nu, double t) const {
  std::size_t js = 0, in = 0, kt = 0;
  double fs = 0.0, fn = 0.0, ft = 0.0;
  if (!fd::locate(s_, s, js, fs) || !fd::locate(nu_, nu, in, fn)) {
    std::ostringstream msg;
    msg << "pricing grid: point (s=" << s << ", nu=" << nu << ") outside the grid";
    throw ConfigError(msg.str());
  }
  if (!fd::locate(times_, t, kt, ft)) throw ConfigError("pricing grid: t outside [0, T]");

  double out[kFields] = {};
  for (std::size_t f = 0; f < kFields; ++f) {
    double acc = 0.0;
    for (std::size_t dk = 0; dk < 2; ++dk) {
      const double wt = dk ? ft : 1.0 - ft;
      if (wt == 0.0) continue;
      const std::size_t k = kt + dk;
      const double v00 = field(f, k, js, in);
      const double v10 = field(f, k, js + 1, in);
      const double v01 = field(f, k, js, in + 1);
      const double v11 = field(f, k, js + 1, in + 1);
      acc += wt * ((1.0 - fs) * ((1.0 - fn) * v00 + fn * v01) + fs * ((1.0 - fn) * v10 + fn * v11));
    }
    out[f] = acc;
  }
  return {out[0], out[1], out[2], out[3], out[4], out[5], out[6]};
}

void PricingGrid::compute_greeks(const heston::HestonParams& p, double eta_nu) {
  const std::size_t ns = s_.size();
  const std::size_t nn = nu_.size();
  auto d_ds = [&](std::size_t src, std::size_t dst, std::size_t k) {
    for (std::size_t i = 0; i < nn; ++i) {
      for (std::size_t j = 0; j < ns; ++j) {
        double d;
        if (j == 0) {
          d = (field(src, k, 1, i) - field(src, k, 0, i)) / (s_[1] - s_[0]);
        } else if (j + 1 == ns) {
          d = (field(src, k, j, i) - field(src, k, j - 1, i)) / (s_[j] - s_[j - 1]);
        } else {
          const auto st = fd::central_first(s_[j] - s_[j - 1], s_[j + 1] - s_[j]);
          d = st.lower * field(src, k, j - 1, i) + st.centre * field(src, k, j, i) +
              st.upper * field(src, k, j + 1, i);
        }
        field(dst, k, j, i) = d;
      }
    }
  };
  auto d_dnu = [&](std::size_t src, std::size_t dst, std::size_t k) {
    for (std::size_t j = 0; j < ns; ++j) {
      for (std::size_t i = 0; i < nn; ++i) {
        double d;
        if (i == 0) {
          d = (field(src, k, j, 1) - field(src, k, j, 0)) / (nu_[1] - nu_[0]);
        } else if (i + 1 == nn) {
          d = (field(src, k, j, i) - field(src, k, j, i - 1)) / (nu_[i] - nu_[i - 1]);
        } else {
          const auto st = fd::central_first(nu_[i] - nu_[i - 1], nu_[i + 1] - nu_[i]);
          d = st.lower * field(src, k, j, i - 1) + st.centre * field(src, k, j, i) +
              st.upper * field(src, k, j, i + 1);
        }
        field(dst, k, j, i) = d;
      }
    }
  };

  for (std::size_t k = 0; k < times_.size(); ++k) {
    d_ds(0, 1, k);    // delta
    d_ds(1, 2, k);    // gamma
    d_dnu(0, 3, k);   // c_nu
    d_dnu(3, 4, k);   // c_nunu
    d_ds(3, 5, k);    // c_snu
    for (std::size_t j = 0; j < ns; ++j) {
      for (std::size_t i = 0; i < nn; ++i) {
        const double nu = nu_[i];
        const double b = vol_risk_drift(nu, p, eta_nu);
        field(6, k, j, i) = -(0.5 * nu * field(2, k, j, i) + p.xi * p.rho * nu * field(5, k, j, i) +
                              0.5 * p.xi * p.xi * nu * field(4, k, j, i) + b * field(3, k, j, i));
      }
    }
  }
}

namespace {

PricingGrid solve_grid(const PricingConfig& config, bool put) {
  config.validate();
  const std::size_t ns = config.s_grid.size();
  const std::size_t nn = config.nu_grid.size();
  const std::size_t n_slices = static_cast<std::size_t>(config.n_slices);
  std::vector<double> times(n_slices);
  for (std::size_t k = 0; k < n_slices; ++k) {
    times[k] = config.horizon * static_cast<double>(k) / static_cast<double>(n_slices - 1);
  }
  PricingGrid grid(config.s_grid, config.nu_grid, times, config.strike);

  std::vector<double> u(ns * nn);
  for (std::size_t j = 0; j < ns; ++j) {
    const double intrinsic = config.s_grid[j] - config.strike;
    const double payoff = std::max(put ? -intrinsic : intrinsic, 0.0);
    for (std::size_t i = 0; i < nn; ++i) u[j * nn + i] = payoff;
  }
  // Far field: the payoff is 0 / linear there and stays so.
  for (std::size_t i = 0; i < nn; ++i) {
    u[i] = put ? config.strike - config.s_grid.front() : 0.0;
    u[(ns - 1) * nn + i] = put ? 0.0 : config.s_grid.back() - config.strike;
  }

  auto store = [&](std::size_t k) {
    for (std::size_t j = 0; j < ns; ++j) {
      for (std::size_t i = 0; i < nn; ++i) grid.call(k, j, i) = u[j * nn + i];
    }
  };
  store(n_slices - 1);

  DouglasSolver solver(config);
  const double dtau = config.horizon / config.n_time;
  const int stride = config.n_time / (config.n_slices - 1);
  constexpr int kRannacherSteps = 2;
  for (int m = 1; m <= config.n_time; ++m) {
    if (m <= kRannacherSteps) {
      solver.step(u, 0.5 * dtau, 1.0);
      solver.step(u, 0.5 * dtau, 1.0);
    } else {
      solver.step(u, dtau, 0.5);
    }
    if (m % stride == 0) {
      for (double v : u) {
        if (!std::isfinite(v)) {
          throw NumericalError("pricing: non-finite value at tau=" + std::to_string(m * dtau));
        }
      }
      store(n_slices - 1 - static_cast<std::size_t>(m / stride));
    }
  }
  grid.compute_greeks(config.heston, config.eta_nu);
  return grid;
}

}  // namespace

PricingGrid solve_call_grid(const PricingConfig& config) { return solve_grid(config, false); }

PricingGrid solve_put_grid(const PricingConfig& config) { return solve_grid(config, true); }

McPrice mc_price(const PricingConfig& config, double s, double nu, double t, std::size_t n_paths,
                 std::uint64_t seed, int n_steps) {
  config.validate_model();
  if (n_paths < 1000) throw ConfigError("mc_price: n_paths must be >= 1000");
  if (n_steps < 1) throw ConfigError("mc_price: n_steps must be >= 1");
  if (!(t >= 0.0 && t <= config.horizon)) throw ConfigError("mc_price: t outside [0, T]");
  if (!(nu >= 0.0)) throw ConfigError("mc_price: nu must be >= 0");
  const double remaining = config.horizon - t;
  if (remaining == 0.0) return {std::max(s - config.strike, 0.0), 0.0};

  const auto& p = config.heston;
  const double dt = remaining / n_steps;
  const double sqrt_dt = std::sqrt(dt);
  const double rho_perp = std::sqrt(1.0 - p.rho * p.rho);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t path = 0; path < n_paths; ++path) {
    PathRng rng(stream_seed(seed, path));
    double x = s;
    double v = nu;
    for (int n = 0; n < n_steps; ++n) {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      const double vol = std::sqrt(v);
      x += vol * z1 * sqrt_dt;
      v += vol_risk_drift(v, p, config.eta_nu) * dt + p.xi * vol * (p.rho * z1 + rho_perp * z2) * sqrt_dt;
      v = std::max(v, 0.0);
    }
    const double payoff = std::max(x - config.strike, 0.0);
    sum += payoff;
    sum_sq += payoff * payoff;
  }
  const double n = static_cast<double>(n_paths);
  const double mean = sum / n;
  const double var = std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

SimpleGreeks greeks(const PricingGrid& grid, double s, double nu, double t) {
  const Greeks g = grid.interpolate(s, nu, t);
  return {g.delta, g.gamma, g.c_nu};
}

}  // namespace svmm::option
