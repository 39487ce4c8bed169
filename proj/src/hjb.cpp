#include "svmm/hjb.hpp"

#include "svmm/error.hpp"
#include "svmm/finite_difference.hpp"
#include "svmm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace svmm::hjb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Coefficients of theta(alpha - nu) V_nu + 1/2 xi^2 nu V_nunu at one node.
struct NodeOperator {
  fd::Stencil st;
};

std::vector<NodeOperator> build_operator(const std::vector<double>& nu,
                                         const heston::HestonParams& p) {
  const std::size_t n = nu.size();
  std::vector<NodeOperator> ops(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double drift = p.theta * (p.alpha - nu[i]);
    const double diff = 0.5 * p.xi * p.xi * nu[i];
    fd::Stencil s;
    if (i == 0) {
      // One-sided first derivative, zero second derivative.
      const double h = nu[1] - nu[0];
      s = {0.0, -drift / h, drift / h};
    } else if (i + 1 == n) {
      const double h = nu[i] - nu[i - 1];
      s = {-drift / h, drift / h, 0.0};
    } else {
      const double hm = nu[i] - nu[i - 1];
      const double hp = nu[i + 1] - nu[i];
      const fd::Stencil d2 = fd::central_second(hm, hp);
      fd::Stencil d1 = fd::central_first(hm, hp);
      s = {diff * d2.lower, diff * d2.centre, diff * d2.upper};
      // Central drift only while it keeps the off-diagonals non-negative.
      if (s.lower + drift * d1.lower < 0.0 || s.upper + drift * d1.upper < 0.0) {
        d1 = drift > 0.0 ? fd::Stencil{0.0, -1.0 / hp, 1.0 / hp}
                         : fd::Stencil{-1.0 / hm, 1.0 / hm, 0.0};
      }
      s.lower += drift * d1.lower;
      s.centre += drift * d1.centre;
      s.upper += drift * d1.upper;
    }
    ops[i].st = s;
  }
  return ops;
}

struct Premiums {
  double ask = kInf;
  double bid = kInf;
};

class Stepper {
public:
  explicit Stepper(const HjbConfig& c)
      : c_(c), nq_(static_cast<std::size_t>(c.q_max - c.q_min + 1)), nn_(c.nu_grid.size()) {}

  std::size_t at(int q, std::size_t i) const {
    return static_cast<std::size_t>(q - c_.q_min) * nn_ + i;
  }

  Premiums premiums(const std::vector<double>& v, int q, std::size_t i) const {
    const double base = 1.0 / c_.arrival.k;
    const double half_impact =
        c_.include_impact ? 0.5 * c_.risk.gamma * c_.risk.eta * c_.risk.eta : 0.0;
    Premiums d;
    const double vq = v[at(q, i)];
    if (q > c_.q_min) {
      const double qm = q - 1.0;
      d.ask = base - c_.risk.beta + half_impact * qm * qm + vq - v[at(q - 1, i)];
    }
    if (q < c_.q_max) {
      const double qp = q + 1.0;
      d.bid = base + c_.risk.beta + half_impact * qp * qp + vq - v[at(q + 1, i)];
    }
    return d;
  }

  std::size_t nq() const { return nq_; }
  std::size_t nn() const { return nn_; }

private:
  const HjbConfig& c_;
  std::size_t nq_;
  std::size_t nn_;
};

std::vector<std::size_t> slice_steps(const HjbConfig& c) {
  std::vector<std::size_t> steps(static_cast<std::size_t>(c.n_slices));
  const std::size_t stride = static_cast<std::size_t>(c.n_time / (c.n_slices - 1));
  for (std::size_t j = 0; j < steps.size(); ++j) steps[j] = j * stride;
  return steps;
}

}  // namespace

void HjbConfig::validate() const {
  heston.validate();
  arrival.validate();
  risk.validate();
  if (!(q_min < 0 && 0 < q_max)) throw ConfigError("hjb: need q_min < 0 < q_max");
  fd::require_grid(nu_grid, 3, "hjb nu_grid");
  if (nu_grid.front() < 0.0) throw ConfigError("hjb: nu grid must start at >= 0");
  if (n_time < 1) throw ConfigError("hjb: n_time must be >= 1");
  if (n_slices < 2) throw ConfigError("hjb: n_slices must be >= 2");
  if (n_time % (n_slices - 1) != 0) {
    throw ConfigError("hjb: n_time must be a multiple of n_slices - 1");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("hjb: T must be > 0");
}

quotes::QuoteContext HjbConfig::quote_context() const {
  return {horizon, heston, arrival, risk};
}

ValueGrid::ValueGrid(const HjbConfig& config, std::vector<double> times)
    : q_min_(config.q_min), q_max_(config.q_max), nu_(config.nu_grid), times_(std::move(times)) {
  const std::size_t n = times_.size() * n_q() * nu_.size();
  values_.assign(n, 0.0);
  quotes_a_.assign(n, kInf);
  quotes_b_.assign(n, kInf);
}

std::vector<double> config_fingerprint(const HjbConfig& c) {
  std::vector<double> fp = {static_cast<double>(c.q_min), static_cast<double>(c.q_max),
                            static_cast<double>(c.n_time), static_cast<double>(c.n_slices),
                            c.horizon, c.include_impact ? 1.0 : 0.0,
                            c.heston.theta, c.heston.alpha, c.heston.xi, c.heston.rho,
                            c.arrival.A, c.arrival.k, c.risk.gamma, c.risk.beta, c.risk.eta};
  fp.insert(fp.end(), c.nu_grid.begin(), c.nu_grid.end());
  return fp;
}

ValueGrid solve_stock_hjb(const HjbConfig& config) {
  config.validate();
  const Stepper stepper(config);
  const auto ops = build_operator(config.nu_grid, config.heston);
  const double dt = config.horizon / config.n_time;
  const std::size_t nq = stepper.nq();
  const std::size_t nn = stepper.nn();
  const double A = config.arrival.A;
  const double k = config.arrival.k;
  const double half_gamma = 0.5 * config.risk.gamma;

  const auto steps = slice_steps(config);
  std::vector<double> times(steps.size());
  for (std::size_t j = 0; j < steps.size(); ++j) times[j] = static_cast<double>(steps[j]) * dt;
  times.back() = config.horizon;

  ValueGrid grid(config, times);
  grid.fingerprint = config_fingerprint(config);

  std::vector<double> cur(nq * nn, 0.0);
  std::vector<double> next(nq * nn, 0.0);

  auto store = [&](std::size_t slice, const std::vector<double>& v) {
    for (int q = config.q_min; q <= config.q_max; ++q) {
      for (std::size_t i = 0; i < nn; ++i) {
        const Premiums d = stepper.premiums(v, q, i);
        grid.value(slice, q, i) = v[stepper.at(q, i)];
        grid.quote_a(slice, q, i) = d.ask;
        grid.quote_b(slice, q, i) = d.bid;
      }
    }
  };
  store(steps.size() - 1, cur);

  // Per-q maxima, merged after each step so the result does not depend on
  // the worker count.
  std::vector<double> q_max_source(nq, 0.0);
  std::vector<double> q_max_rate(nq, 0.0);

  std::size_t next_slice = steps.size() - 1;
  for (int n = config.n_time; n >= 1; --n) {
    const double t = static_cast<double>(n) * dt;
    parallel_for(nq, config.threads, [&](std::size_t qi) {
      const int q = config.q_min + static_cast<int>(qi);
      const double q2 = static_cast<double>(q) * q;
      for (std::size_t i = 0; i < nn; ++i) {
        const std::size_t idx = stepper.at(q, i);
        const Premiums d = stepper.premiums(cur, q, i);
        const double rate_a = std::isfinite(d.ask) ? A * std::exp(-k * d.ask) : 0.0;
        const double rate_b = std::isfinite(d.bid) ? A * std::exp(-k * d.bid) : 0.0;
        const double source = (rate_a + rate_b) / k;

        const fd::Stencil& st = ops[i].st;
        double lv = st.centre * cur[idx];
        if (i > 0) lv += st.lower * cur[idx - 1];
        if (i + 1 < nn) lv += st.upper * cur[idx + 1];

        const double nu = config.nu_grid[i];
        const double updated = cur[idx] + dt * (lv - half_gamma * q2 * nu + source);

        // Explicit monotonicity: the weight on V(q, nu_i) must stay >= 0.
        const double stiffness = -st.centre + rate_a + rate_b;
        if (dt * stiffness > 1.0 || !std::isfinite(updated)) {
          std::ostringstream msg;
          if (!std::isfinite(updated)) {
            msg << "hjb: non-finite value at q=" << q << " nu=" << nu << " t=" << t - dt;
          } else {
            msg << "hjb: explicit stability bound exceeded at q=" << q << " nu=" << nu
                << " t=" << t << ": dt=" << dt << " but max stable dt=" << 1.0 / stiffness;
          }
          throw NumericalError(msg.str());
        }
        next[idx] = updated;
        q_max_source[qi] = std::max(q_max_source[qi], source);
        q_max_rate[qi] = std::max(q_max_rate[qi], dt * (rate_a + rate_b));
      }
    });
    std::swap(cur, next);
    if (next_slice > 0 && static_cast<std::size_t>(n - 1) == steps[next_slice - 1]) {
      --next_slice;
      store(next_slice, cur);
    }
  }

  // Source at t = 0 from the final slice.
  for (int q = config.q_min; q <= config.q_max; ++q) {
    const std::size_t qi = static_cast<std::size_t>(q - config.q_min);
    for (std::size_t i = 0; i < nn; ++i) {
      const Premiums d = stepper.premiums(cur, q, i);
      const double rate_a = std::isfinite(d.ask) ? A * std::exp(-k * d.ask) : 0.0;
      const double rate_b = std::isfinite(d.bid) ? A * std::exp(-k * d.bid) : 0.0;
      q_max_source[qi] = std::max(q_max_source[qi], (rate_a + rate_b) / k);
    }
  }
  grid.max_source = *std::max_element(q_max_source.begin(), q_max_source.end());
  grid.max_rate_dt = *std::max_element(q_max_rate.begin(), q_max_rate.end());
  return grid;
}

double refinement_tolerance(const HjbConfig& config, const ValueGrid& fine) {
  if (fine.fingerprint != config_fingerprint(config)) {
    throw ConfigError("refinement_tolerance: grid does not match config");
  }
  if (config.nu_grid.size() % 2 == 0) {
    throw ConfigError("refinement_tolerance: nu grid needs an odd node count");
  }
  if (config.n_time % (2 * (config.n_slices - 1)) != 0) {
    throw ConfigError("refinement_tolerance: n_time must be a multiple of 2 (n_slices - 1)");
  }
  HjbConfig coarse = config;
  coarse.nu_grid.clear();
  for (std::size_t i = 0; i < config.nu_grid.size(); i += 2) coarse.nu_grid.push_back(config.nu_grid[i]);
  coarse.n_time = config.n_time / 2;
  const ValueGrid cg = solve_stock_hjb(coarse);

  double tol = 0.0;
  for (std::size_t s = 0; s < fine.times().size(); ++s) {
    for (int q = config.q_min; q <= config.q_max; ++q) {
      for (std::size_t i = 0; i < coarse.nu_grid.size(); ++i) {
        tol = std::max(tol, std::abs(fine.value(s, q, 2 * i) - cg.value(s, q, i)));
      }
    }
  }
  return tol;
}

ComparisonReport compare_exact_vs_approx(const ValueGrid& grid, const HjbConfig& config, double tol,
                                         double nu_eval_lo, double nu_eval_hi) {
  if (grid.fingerprint != config_fingerprint(config)) {
    throw ConfigError("compare_exact_vs_approx: grid does not match config");
  }
  if (config.include_impact) {
    throw ConfigError("compare_exact_vs_approx: requires include_impact = false");
  }
  const auto ctx = config.quote_context();
  ComparisonReport r;
  r.c_emp = grid.max_source;
  r.tol = tol;
  r.lower_margin = kInf;
  r.upper_margin = kInf;
  r.min_excess = kInf;

  const auto& nu = grid.nu();
  for (std::size_t s = 0; s < grid.times().size(); ++s) {
    const double t = grid.times()[s];
    const double remaining = config.horizon - t;
    for (int q = grid.q_min(); q <= grid.q_max(); ++q) {
      for (std::size_t i = 0; i < nu.size(); ++i) {
        const double v = grid.value(s, q, i);
        const double approx = quotes::closed_form_values(q, nu[i], t, ctx).approx;
        const double lower = v - (approx - tol);
        const double upper = approx + r.c_emp * remaining + tol - v;
        r.lower_margin = std::min(r.lower_margin, lower);
        r.upper_margin = std::min(r.upper_margin, upper);
        r.min_excess = std::min(r.min_excess, v - approx);
        if (lower < 0.0 || upper < 0.0) ++r.sandwich_violations;

        const bool interior_q = q > grid.q_min() && q < grid.q_max();
        if (!interior_q || nu[i] < nu_eval_lo || nu[i] > nu_eval_hi) continue;
        const QuotePair approx_q = quotes::inventory_quotes(q, nu[i], t, ctx);
        const double gap_a = std::abs(grid.quote_a(s, q, i) - approx_q.delta_a);
        const double gap_b = std::abs(grid.quote_b(s, q, i) - approx_q.delta_b);
        if (gap_a > r.max_quote_gap_a) {
          r.max_quote_gap_a = gap_a;
          r.worst_a = {q, nu[i], t};
        }
        if (gap_b > r.max_quote_gap_b) {
          r.max_quote_gap_b = gap_b;
          r.worst_b = {q, nu[i], t};
        }
      }
    }
  }
  r.sandwich_ok = r.sandwich_violations == 0;
  return r;
}

}  // namespace svmm::hjb
