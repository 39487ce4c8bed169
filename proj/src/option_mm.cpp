#include "svmm/option_mm.hpp"

#include "svmm/error.hpp"
#include "svmm/finite_difference.hpp"
#include "svmm/parallel.hpp"
#include "svmm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace svmm::option_mm {

namespace {

// Greeks at (s, nu, t), clamped into the grid. Returns false if clamping was needed.
bool clamped_greeks(const option::PricingGrid& grid, double s, double nu, double t, option::Greeks& out) {
  const bool inside = grid.contains(s, nu);
  const double sc = std::clamp(s, grid.s().front(), grid.s().back());
  const double nc = std::clamp(nu, grid.nu().front(), grid.nu().back());
  out = grid.interpolate(sc, nc, std::clamp(t, grid.times().front(), grid.times().back()));
  return inside;
}

struct PathIntegrals {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  bool exited = false;
};

}  // namespace

Functionals estimate_functionals(double s, double nu, double t, double horizon,
                                 const heston::HestonParams& heston, double gamma,
                                 const option::PricingGrid& grid, const FunctionalSettings& settings) {
  heston.validate();
  if (settings.n_paths < 1000) throw ConfigError("functionals: n_paths must be >= 1000");
  if (settings.n_steps < 1) throw ConfigError("functionals: n_steps must be >= 1");
  if (!(t >= 0.0 && t <= horizon)) throw ConfigError("functionals: t outside [0, T]");
  if (!(gamma >= 0.0)) throw ConfigError("functionals: gamma must be >= 0");
  Functionals out;
  if (t == horizon || gamma == 0.0) return out;

  const double dt = (horizon - t) / settings.n_steps;
  const double sqrt_dt = std::sqrt(dt);
  const double rho = heston.rho;
  const double xi = heston.xi;
  const double rho_perp = std::sqrt(1.0 - rho * rho);

  std::vector<PathIntegrals> paths(settings.n_paths);
  parallel_for(settings.n_paths, settings.threads, [&](std::size_t p) {
    PathRng rng(stream_seed(settings.seed, p));
    PathIntegrals acc;
    double x = s;
    double v = nu;
    for (int n = 0; n < settings.n_steps; ++n) {
      const double u = t + n * dt;
      option::Greeks g;
      if (!clamped_greeks(grid, x, v, u, g)) acc.exited = true;
      const double vp = std::max(v, 0.0);
      acc.i1 += vp * (g.delta + rho * xi * g.c_nu) * dt;
      acc.i2 += vp * (g.delta * g.delta + 2.0 * rho * xi * g.delta * g.c_nu + xi * xi * g.c_nu * g.c_nu) * dt;
      acc.i3 += vp * g.c_nu * g.c_nu * dt;
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      const double vol = std::sqrt(vp);
      x += vol * z1 * sqrt_dt;
      v = std::max(v + heston.theta * (heston.alpha - vp) * dt + xi * vol * (rho * z1 + rho_perp * z2) * sqrt_dt,
                   0.0);
    }
    paths[p] = acc;
  });

  std::size_t exits = 0;
  std::vector<double> a(paths.size()), b(paths.size()), c(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    exits += paths[p].exited ? 1 : 0;
    a[p] = -gamma * paths[p].i1;
    b[p] = -0.5 * gamma * paths[p].i2;
    c[p] = -0.5 * gamma * xi * xi * paths[p].i3;
  }
  const double frac = static_cast<double>(exits) / static_cast<double>(paths.size());
  if (frac > settings.max_exit_fraction) {
    std::ostringstream msg;
    msg << "functionals: " << exits << " of " << paths.size() << " paths from (s=" << s << ", nu=" << nu
        << ", t=" << t << ") left the pricing grid";
    throw NumericalError(msg.str());
  }
  const auto sa = stats::summarize(a);
  const auto sb = stats::summarize(b);
  const auto sc = stats::summarize(c);
  return {sa.mean, sb.mean, sc.mean, sa.se, sb.se, sc.se};
}

FunctionalLattice::FunctionalLattice(std::vector<double> s, std::vector<double> nu, std::vector<double> t)
    : s_(std::move(s)), nu_(std::move(nu)), t_(std::move(t)) {
  fd::require_grid(s_, 2, "lattice s");
  fd::require_grid(nu_, 2, "lattice nu");
  fd::require_grid(t_, 2, "lattice t");
  data_.resize(s_.size() * nu_.size() * t_.size());
}

Functionals FunctionalLattice::interpolate(double s, double nu, double t) const {
  std::size_t ia = 0, ib = 0, ic = 0;
  double fa = 0.0, fb = 0.0, fc = 0.0;
  fd::locate(s_, std::clamp(s, s_.front(), s_.back()), ia, fa);
  fd::locate(nu_, std::clamp(nu, nu_.front(), nu_.back()), ib, fb);
  fd::locate(t_, std::clamp(t, t_.front(), t_.back()), ic, fc);
  Functionals out;
  for (int da = 0; da < 2; ++da) {
    for (int db = 0; db < 2; ++db) {
      for (int dc = 0; dc < 2; ++dc) {
        const double w = (da ? fa : 1.0 - fa) * (db ? fb : 1.0 - fb) * (dc ? fc : 1.0 - fc);
        if (w == 0.0) continue;
        const Functionals& f = at(ia + da, ib + db, ic + dc);
        out.H1 += w * f.H1;
        out.H2 += w * f.H2;
        out.M += w * f.M;
        out.se_H1 += w * f.se_H1;
        out.se_H2 += w * f.se_H2;
        out.se_M += w * f.se_M;
      }
    }
  }
  return out;
}

FunctionalLattice build_lattice(const heston::HestonParams& heston, double horizon, double gamma,
                                const option::PricingGrid& grid, const LatticeSpec& spec,
                                const FunctionalSettings& settings) {
  if (!(spec.nu_hi > spec.nu_lo) || spec.nu_lo < 0.0) throw ConfigError("lattice: need 0 <= nu_lo < nu_hi");
  const double w = spec.s_halfwidth_sd * std::sqrt(heston.alpha * horizon);
  FunctionalLattice lattice(fd::uniform_grid(heston.s0 - w, heston.s0 + w, spec.s_nodes),
                            fd::uniform_grid(spec.nu_lo, spec.nu_hi, spec.nu_nodes),
                            fd::uniform_grid(0.0, horizon, spec.t_nodes));
  std::uint64_t node = 0;
  for (std::size_t a = 0; a < spec.s_nodes; ++a) {
    for (std::size_t b = 0; b < spec.nu_nodes; ++b) {
      for (std::size_t c = 0; c < spec.t_nodes; ++c) {
        FunctionalSettings local = settings;
        local.seed = stream_seed(settings.seed, node++);
        lattice.at(a, b, c) = estimate_functionals(lattice.s()[a], lattice.nu()[b], lattice.t()[c], horizon,
                                                   heston, gamma, grid, local);
      }
    }
  }
  return lattice;
}

FourQuotes option_book_quotes(const OptionMMState& state, const Functionals& F,
                           const intensity::ArrivalParams& arrival, const heston::HestonParams& heston,
                           double gamma, double t, double horizon) {
  if (state.hedged) throw ConfigError("option_book_quotes: book must not be hedged");
  quotes::QuoteContext ctx;
  ctx.horizon = horizon;
  ctx.heston = heston;
  ctx.arrival = arrival;
  ctx.risk.gamma = gamma;
  ctx.risk.beta = 0.0;
  const double f = quotes::inventory_coefficient(state.mid.nu, t, ctx);
  const double base = 1.0 / arrival.k;
  const double qs = state.q_s;
  const double qo = state.q_o;
  return {base - f * (2.0 * qs - 1.0) + F.H1 * qo, base + f * (2.0 * qs + 1.0) - F.H1 * qo,
          base + F.H2 * (2.0 * qo - 1.0) + F.H1 * qs, base - F.H2 * (2.0 * qo + 1.0) - F.H1 * qs};
}

QuotePair hedged_option_quotes(const OptionMMState& state, const Functionals& F,
                          const intensity::ArrivalParams& arrival) {
  if (!state.hedged) throw ConfigError("hedged_option_quotes: book must be hedged");
  const double base = 1.0 / arrival.k;
  const double qo = state.q_o;
  return {base + F.M * (2.0 * qo - 1.0), base - F.M * (2.0 * qo + 1.0)};
}

double hedge_position(int q_o, double delta) noexcept { return -static_cast<double>(q_o) * delta; }

double approx_value(double q_s, int q_o, double f, const Functionals& F) noexcept {
  return -f * q_s * q_s + F.H1 * q_s * q_o + F.H2 * static_cast<double>(q_o) * q_o;
}

double approx_value_hedged(int q_o, const Functionals& F) noexcept {
  return F.M * static_cast<double>(q_o) * q_o;
}

void OptionBookConfig::validate() const {
  heston.validate();
  stock_arrival.validate();
  option_arrival.validate();
  if (!(horizon > 0.0) || !(dt > 0.0)) throw ConfigError("option book: T and dt must be > 0");
  const double steps = horizon / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    throw ConfigError("option book: dt must divide T");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("option book: gamma must be >= 0");
}

int OptionBookConfig::n_steps() const { return static_cast<int>(std::llround(horizon / dt)); }

OptionPathRecord run_option_path(const OptionBookConfig& config, const option::PricingGrid& grid,
                                 const FunctionalLattice& lattice, std::uint64_t seed, std::uint64_t index,
                                 bool record_trace) {
  const auto& h = config.heston;
  const double dt = config.dt;
  PathRng rng(stream_seed(seed, index));
  OptionPathRecord rec;
  OptionMMState st;
  st.hedged = config.hedged;
  st.q_o = config.q_o0;
  st.mid = {0.0, h.s0, h.nu0};
  double cash = 0.0;
  double spread_sum = 0.0;

  option::Greeks g;
  if (!clamped_greeks(grid, st.mid.s, st.mid.nu, 0.0, g)) ++rec.grid_exits;
  st.q_s = config.hedged ? hedge_position(st.q_o, g.delta) : config.q_s0;
  cash -= st.q_s * st.mid.s;

  const int n_steps = config.n_steps();
  for (int step = 0; step < n_steps; ++step) {
    const double t = step * dt;
    st.mid.t = t;
    if (!clamped_greeks(grid, st.mid.s, st.mid.nu, t, g)) ++rec.grid_exits;
    const Functionals F = lattice.interpolate(st.mid.s, st.mid.nu, t);

    const double u_ao = rng.uniform();
    const double u_bo = rng.uniform();
    const double u_as = rng.uniform();
    const double u_bs = rng.uniform();
    const heston::Draws draws = heston::draw(rng, heston::Scheme::binomial);

    const double q_s_pre = st.q_s;
    QuotePair option_quote;
    std::optional<QuotePair> stock_quotes;
    if (config.hedged) {
      option_quote = hedged_option_quotes(st, F, config.option_arrival);
    } else {
      const FourQuotes fq = option_book_quotes(st, F, config.stock_arrival, h, config.gamma, t, config.horizon);
      option_quote = {fq.a_o, fq.b_o};
      const QuotePair stock_quote{fq.a_s, fq.b_s};
      stock_quotes = stock_quote;
      const auto sf = intensity::sample_fills(stock_quote, config.stock_arrival, dt, u_as, u_bs);
      if (sf.ask_filled) {
        cash += st.mid.s + stock_quote.delta_a;
        st.q_s -= 1.0;
      }
      if (sf.bid_filled) {
        cash -= st.mid.s - stock_quote.delta_b;
        st.q_s += 1.0;
      }
    }
    if (record_trace) {
      rec.trace.push_back({t, st.mid.s, st.mid.nu, st.q_o, q_s_pre, g.price, option_quote, stock_quotes});
    }
    spread_sum += option_quote.spread();
    const auto of = intensity::sample_fills(option_quote, config.option_arrival, dt, u_ao, u_bo);
    if (of.ask_filled) {
      cash += g.price + option_quote.delta_a;
      st.q_o -= 1;
    }
    if (of.bid_filled) {
      cash -= g.price - option_quote.delta_b;
      st.q_o += 1;
    }
    if (config.hedged) {
      const double target = hedge_position(st.q_o, g.delta);
      cash -= (target - st.q_s) * st.mid.s;
      st.q_s = target;
    }

    const double nu = std::max(st.mid.nu, 0.0);
    const heston::MidState next = heston::step_state(st.mid, h, dt, draws);
    const double ds = next.s - st.mid.s;
    const double dnu = next.nu - st.mid.nu;
    const double dc = g.theta * dt + g.delta * ds + g.c_nu * dnu + 0.5 * g.gamma * ds * ds +
                      g.c_snu * ds * dnu + 0.5 * g.c_nunu * dnu * dnu;
    const double qo = st.q_o;
    const double di_option = qo * dc;
    const double di_book = di_option + st.q_s * ds;
    rec.qv_book += di_book * di_book;
    rec.qv_option_only += di_option * di_option;
    if (config.hedged) {
      rec.qv_predicted += nu * h.xi * h.xi * g.c_nu * g.c_nu * qo * qo * dt;
    } else {
      const double qs = st.q_s;
      const double mixed = g.delta + h.rho * h.xi * g.c_nu;
      const double opt = g.delta * g.delta + 2.0 * h.rho * h.xi * g.delta * g.c_nu + h.xi * h.xi * g.c_nu * g.c_nu;
      rec.qv_predicted += (qs * qs + 2.0 * qs * qo * mixed + qo * qo * opt) * nu * dt;
    }
    st.mid = next;
    if (!std::isfinite(cash) || !std::isfinite(st.mid.s) || !std::isfinite(rec.qv_book)) {
      throw NumericalError("option book: non-finite state at step " + std::to_string(step) + " of path " +
                           std::to_string(index));
    }
  }
  st.mid.t = config.horizon;
  if (!clamped_greeks(grid, st.mid.s, st.mid.nu, config.horizon, g)) ++rec.grid_exits;
  rec.wealth = cash + st.q_o * g.price + st.q_s * st.mid.s;
  rec.q_o = st.q_o;
  rec.q_s = st.q_s;
  rec.avg_option_spread = spread_sum / n_steps;
  return rec;
}

OptionBookStats run_option_book(const OptionBookConfig& config, const option::PricingGrid& grid,
                                const FunctionalLattice& lattice, std::size_t n, std::uint64_t seed) {
  config.validate();
  if (n < 1) throw ConfigError("option book: n must be >= 1");
  std::vector<OptionPathRecord> paths(n);
  parallel_for(n, config.threads, [&](std::size_t p) { paths[p] = run_option_path(config, grid, lattice, seed, p); });

  OptionBookStats out;
  out.n = n;
  std::vector<double> buf(n);
  auto collect = [&](auto getter) {
    for (std::size_t p = 0; p < n; ++p) buf[p] = getter(paths[p]);
    return stats::summarize(buf);
  };
  out.qv_book = collect([](const OptionPathRecord& r) { return r.qv_book; });
  out.qv_option_only = collect([](const OptionPathRecord& r) { return r.qv_option_only; });
  out.qv_predicted = collect([](const OptionPathRecord& r) { return r.qv_predicted; });
  out.qv_gap = collect([](const OptionPathRecord& r) { return r.qv_book - r.qv_predicted; });
  out.qv_reduction = collect([](const OptionPathRecord& r) { return r.qv_book - r.qv_option_only; });
  out.wealth = collect([](const OptionPathRecord& r) { return r.wealth; });
  out.q_o = collect([](const OptionPathRecord& r) { return static_cast<double>(r.q_o); });
  double sp = 0.0;
  for (const auto& r : paths) sp += r.avg_option_spread;
  out.avg_option_spread = sp / static_cast<double>(n);
  out.paths = std::move(paths);
  return out;
}

}  // namespace svmm::option_mm
