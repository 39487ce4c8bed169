#include "svmm/cli.hpp"

#include "svmm/config.hpp"
#include "svmm/csv.hpp"
#include "svmm/error.hpp"
#include "svmm/hjb.hpp"
#include "svmm/option_mm.hpp"
#include "svmm/option_pricing.hpp"
#include "svmm/sim_engine.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>

namespace svmm::cli {

namespace fs = std::filesystem;

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate", "compare",      "frontier", "trading-curve",
                                                 "hjb",      "price-option", "option-mm"};
  return names;
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

// Tracks every file a run creates so a failed run leaves nothing behind.
class Outputs {
public:
  Outputs(fs::path dir, std::string stem) : dir_(std::move(dir)), stem_(std::move(stem)) {}

  fs::path path(const std::string& part, const std::string& ext = ".csv") {
    fs::path p = dir_ / (stem_ + (part.empty() ? "" : "-" + part) + ext);
    files_.push_back(p);
    return p;
  }

  void discard() noexcept {
    for (const auto& f : files_) {
      std::error_code ec;
      fs::remove(f, ec);
    }
    files_.clear();
  }

  [[nodiscard]] const std::vector<fs::path>& files() const noexcept { return files_; }

private:
  fs::path dir_;
  std::string stem_;
  std::vector<fs::path> files_;
};

void write_terminal_table(csv::Writer& w, const sim::EnsembleStats& e, std::uint64_t seed) {
  for (const auto& r : e.paths) {
    w.cell(static_cast<long long>(r.index))
        .cell(std::to_string(stream_seed(seed, r.index)))
        .cell(r.profit)
        .cell(r.q)
        .cell(r.x)
        .cell(r.z)
        .cell(r.objective)
        .cell(r.qv)
        .cell(r.avg_spread)
        .cell(r.ask_fills)
        .cell(r.bid_fills);
    w.end_row();
  }
}

const std::vector<std::string> kTerminalHeader = {"path", "seed", "profit", "q_T", "x", "z", "objective",
                                                  "qv", "avg_spread", "ask_fills", "bid_fills"};

void run_simulate(const config::RunConfig& c, Outputs& out, std::ostream& log) {
  const sim::SimConfig sc = c.sim_config();
  const quotes::Policy policy = c.policy_spec();
  const sim::EnsembleStats e = sim::run_ensemble(policy, sc, c.paths, c.seed, c.histogram_bins);

  csv::Writer main(out.path(""), kTerminalHeader);
  write_terminal_table(main, e, c.seed);
  main.close();

  const sim::PathRecord first = sim::run_path(policy, sc, c.seed, 0, true);
  csv::Writer series(out.path("series"), {"t", "s", "nu", "p_a", "p_b", "q", "x", "z"});
  for (const auto& snap : first.series) {
    series.cell(snap.t).cell(snap.s).cell(snap.nu).cell(snap.p_a).cell(snap.p_b).cell(snap.q).cell(snap.x).cell(
        snap.z);
    series.end_row();
  }
  series.close();

  csv::Writer curve(out.path("curve"), {"t", "mean_q", "se_q"});
  for (std::size_t k = 0; k < e.curve_t.size(); ++k) {
    curve.cell(e.curve_t[k]).cell(e.curve_mean[k]).cell(e.curve_se[k]);
    curve.end_row();
  }
  curve.close();

  csv::Writer hist(out.path("histogram"), {"bin_lo", "bin_hi", "count"});
  for (std::size_t b = 0; b < e.profit_histogram.counts.size(); ++b) {
    hist.cell(e.profit_histogram.edges[b]).cell(e.profit_histogram.edges[b + 1]).cell(e.profit_histogram.counts[b]);
    hist.end_row();
  }
  hist.close();

  log << quotes::to_string(policy.kind) << ": profit " << e.profit.mean << " (std " << e.profit.std << "), q_T "
      << e.q_T.mean << ", avg spread " << e.avg_spread << '\n';
}

void run_compare(const config::RunConfig& c, Outputs& out, std::ostream& log) {
  const sim::Comparison cmp = sim::compare_strategies(c.sim_config(), c.paths, c.seed, c.impact_variant);
  csv::Writer w(out.path(""), {"Strategy", "Average Spread", "Profit", "Std(Profit)", "q_T", "Std(q_T)"});
  auto row = [&](const char* name, const sim::EnsembleStats& e) {
    w.cell(name).cell(e.avg_spread).cell(e.profit.mean).cell(e.profit.std).cell(e.q_T.mean).cell(e.q_T.std);
    w.end_row();
    log << name << ": spread " << e.avg_spread << ", profit " << e.profit.mean << " (std " << e.profit.std
        << "), q_T " << e.q_T.mean << " (std " << e.q_T.std << ")\n";
  };
  row("Inventory", cmp.inventory);
  row("Symmetric", cmp.symmetric);
  w.close();

  csv::Writer paths(out.path("paths"), [] {
    auto h = kTerminalHeader;
    h.insert(h.begin(), "strategy");
    return h;
  }());
  for (const auto* e : {&cmp.inventory, &cmp.symmetric}) {
    const char* name = e == &cmp.inventory ? "Inventory" : "Symmetric";
    for (const auto& r : e->paths) {
      paths.cell(name)
          .cell(static_cast<long long>(r.index))
          .cell(std::to_string(stream_seed(c.seed, r.index)))
          .cell(r.profit)
          .cell(r.q)
          .cell(r.x)
          .cell(r.z)
          .cell(r.objective)
          .cell(r.qv)
          .cell(r.avg_spread)
          .cell(r.ask_fills)
          .cell(r.bid_fills);
      paths.end_row();
    }
  }
  paths.close();
}

void run_frontier(const config::RunConfig& c, Outputs& out, std::ostream& log) {
  sim::SimConfig sc = c.sim_config();
  sc.q0 = c.frontier_q0;
  const auto points = sim::efficient_frontier(sc, c.frontier_gammas, c.paths, c.seed);
  csv::Writer w(out.path(""), {"gamma", "variance", "variance_se", "expected_objective", "objective_se",
                               "profit", "profit_se"});
  for (const auto& p : points) {
    w.cell(p.gamma).cell(p.variance).cell(p.variance_se).cell(p.objective).cell(p.objective_se).cell(p.profit).cell(
        p.profit_se);
    w.end_row();
    log << "gamma " << p.gamma << ": variance " << p.variance << ", objective " << p.objective << '\n';
  }
  w.close();
}

void run_trading_curve(const config::RunConfig& c, Outputs& out, std::ostream& log) {
  sim::SimConfig sc = c.sim_config();
  sc.q0 = c.curve_q0;
  quotes::Policy policy;
  policy.kind = sc.impact ? quotes::PolicyKind::market_impact : quotes::PolicyKind::inventory_sv;
  policy.impact_variant = c.impact_variant;
  csv::Writer w(out.path(""), {"gamma", "t", "mean_q", "se_q"});
  for (double g : c.curve_gammas) {
    sc.risk.gamma = g;
    const auto curve = sim::trading_curve(policy, sc, c.paths, c.seed);
    for (std::size_t k = 0; k < curve.t.size(); ++k) {
      w.cell(g).cell(curve.t[k]).cell(curve.mean_q[k]).cell(curve.se_q[k]);
      w.end_row();
    }
    log << "gamma " << g << ": E[q_T] " << curve.mean_q.back() << '\n';
  }
  w.close();
}

void run_hjb(const config::RunConfig& c, Outputs& out, std::ostream& log) {
  const hjb::HjbConfig hc = c.hjb_config();
  const hjb::ValueGrid grid = hjb::solve_stock_hjb(hc);
  const quotes::QuoteContext ctx = hc.quote_context();

  if (!hc.include_impact) {
    const double tol = hjb::refinement_tolerance(hc, grid);
    const auto r = hjb::compare_exact_vs_approx(grid, hc, tol, c.hjb_nu_eval_lo, c.hjb_nu_eval_hi);
    csv::Writer w(out.path(""), {"max_quote_gap_a", "max_quote_gap_b", "worst_a_q", "worst_a_nu", "worst_a_t",
                                 "worst_b_q", "worst_b_nu", "worst_b_t", "sandwich_ok", "sandwich_violations",
                                 "c_emp", "tol", "lower_margin", "upper_margin", "min_excess"});
    w.cell(r.max_quote_gap_a)
        .cell(r.max_quote_gap_b)
        .cell(r.worst_a.q)
        .cell(r.worst_a.nu)
        .cell(r.worst_a.t)
        .cell(r.worst_b.q)
        .cell(r.worst_b.nu)
        .cell(r.worst_b.t)
        .cell(r.sandwich_ok ? "true" : "false")
        .cell(r.sandwich_violations)
        .cell(r.c_emp)
        .cell(r.tol)
        .cell(r.lower_margin)
        .cell(r.upper_margin)
        .cell(r.min_excess);
    w.end_row();
    w.close();
    log << "max quote gap: ask " << r.max_quote_gap_a << ", bid " << r.max_quote_gap_b << "; sandwich "
        << (r.sandwich_ok ? "holds" : "violated") << " (tol " << tol << ")\n";
  }

  csv::Writer q(out.path(hc.include_impact ? "" : "quotes"),
                {"q", "nu", "t", "V", "delta_a_exact", "delta_b_exact", "delta_a_approx", "delta_b_approx"});
  for (std::size_t k = 0; k < grid.times().size(); ++k) {
    const double t = grid.times()[k];
    for (int inv = grid.q_min(); inv <= grid.q_max(); ++inv) {
      for (std::size_t i = 0; i < grid.nu().size(); ++i) {
        const double nu = grid.nu()[i];
        const QuotePair approx = hc.include_impact
                                     ? quotes::impact_quotes(inv, nu, t, ctx, c.impact_variant)
                                     : quotes::inventory_quotes(inv, nu, t, ctx);
        q.cell(inv).cell(nu).cell(t).cell(grid.value(k, inv, i)).cell(grid.quote_a(k, inv, i)).cell(
            grid.quote_b(k, inv, i)).cell(approx.delta_a).cell(approx.delta_b);
        q.end_row();
      }
    }
  }
  q.close();
}

void run_price_option(const config::RunConfig& c, Outputs& out, std::ostream& log) {
  const option::PricingConfig pc = c.pricing_config();
  const option::PricingGrid grid = option::solve_call_grid(pc);
  csv::Writer w(out.path(""), {"s", "nu", "t", "C", "P", "delta", "gamma", "c_nu"});
  for (double s : grid.s()) {
    for (double nu : grid.nu()) {
      const option::Greeks g = grid.interpolate(s, nu, c.pricing_t);
      w.cell(s).cell(nu).cell(c.pricing_t).cell(g.price).cell(g.price - (s - pc.strike)).cell(g.delta).cell(
          g.gamma).cell(g.c_nu);
      w.end_row();
    }
  }
  w.close();
  const option::Greeks atm = grid.interpolate(c.heston.s0, c.heston.nu0, c.pricing_t);
  log << "C(s0, nu0, t) = " << atm.price << ", delta " << atm.delta << ", c_nu " << atm.c_nu << '\n';

  if (c.pricing_mc_paths > 0) {
    csv::Writer m(out.path("mc"), {"s", "nu", "t", "pde", "mc", "mc_se"});
    const double sd = std::sqrt(c.heston.nu0 * (c.horizon - c.pricing_t));
    std::uint64_t probe = 0;
    for (double ds : {-sd, 0.0, sd}) {
      for (double fnu : {0.5, 1.0, 2.0}) {
        const double s = c.heston.s0 + ds;
        const double nu = c.heston.nu0 * fnu;
        const auto mc = option::mc_price(pc, s, nu, c.pricing_t, c.pricing_mc_paths, stream_seed(c.seed, probe++));
        m.cell(s).cell(nu).cell(c.pricing_t).cell(grid.interpolate(s, nu, c.pricing_t).price).cell(mc.price).cell(
            mc.std_error);
        m.end_row();
      }
    }
    m.close();
  }
}

void run_option_mm(const config::RunConfig& c, Outputs& out, std::ostream& log) {
  const option::PricingGrid grid = option::solve_call_grid(c.pricing_config());
  const auto lattice = option_mm::build_lattice(c.heston, c.horizon, c.risk.gamma, grid, c.lattice_spec(),
                                                c.functional_settings());
  const option_mm::OptionBookConfig bc = c.option_book_config();
  const auto book = option_mm::run_option_book(bc, grid, lattice, c.paths, c.seed);

  csv::Writer w(out.path(""), {"hedged", "paths", "qv_book", "qv_book_se", "qv_option_only", "qv_option_only_se",
                               "qv_predicted", "qv_predicted_se", "qv_gap", "qv_gap_se", "wealth", "wealth_se",
                               "q_o_mean", "q_o_std", "avg_option_spread"});
  w.cell(bc.hedged ? "true" : "false")
      .cell(book.n)
      .cell(book.qv_book.mean)
      .cell(book.qv_book.se)
      .cell(book.qv_option_only.mean)
      .cell(book.qv_option_only.se)
      .cell(book.qv_predicted.mean)
      .cell(book.qv_predicted.se)
      .cell(book.qv_gap.mean)
      .cell(book.qv_gap.se)
      .cell(book.wealth.mean)
      .cell(book.wealth.se)
      .cell(book.q_o.mean)
      .cell(book.q_o.std)
      .cell(book.avg_option_spread);
  w.end_row();
  w.close();

  csv::Writer f(out.path("functionals"), {"s", "nu", "t", "H1", "H1_se", "H2", "H2_se", "M", "M_se"});
  for (std::size_t a = 0; a < lattice.s().size(); ++a) {
    for (std::size_t b = 0; b < lattice.nu().size(); ++b) {
      for (std::size_t k = 0; k < lattice.t().size(); ++k) {
        const auto& F = lattice.at(a, b, k);
        f.cell(lattice.s()[a]).cell(lattice.nu()[b]).cell(lattice.t()[k]).cell(F.H1).cell(F.se_H1).cell(F.H2).cell(
            F.se_H2).cell(F.M).cell(F.se_M);
        f.end_row();
      }
    }
  }
  f.close();

  const auto trace = option_mm::run_option_path(bc, grid, lattice, c.seed, 0, true).trace;
  csv::Writer q(out.path("quotes"), {"t", "s", "nu", "q_o", "q_s", "option_mid", "a_o", "b_o", "a_s", "b_s"});
  for (const auto& r : trace) {
    const double nan = std::nan("");
    q.cell(r.t).cell(r.s).cell(r.nu).cell(r.q_o).cell(r.q_s).cell(r.option_mid).cell(r.option_quotes.delta_a).cell(
        r.option_quotes.delta_b).cell(r.stock_quotes ? r.stock_quotes->delta_a : nan).cell(
        r.stock_quotes ? r.stock_quotes->delta_b : nan);
    q.end_row();
  }
  q.close();

  log << (bc.hedged ? "hedged" : "unhedged") << " book: realized QV " << book.qv_book.mean << ", predicted "
      << book.qv_predicted.mean << ", option-only " << book.qv_option_only.mean << '\n';
}

}  // namespace

RunResult run(const Invocation& invocation, std::ostream& log) {
  RunResult result;
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), invocation.subcommand) == names.end()) {
    result.exit_code = 2;
    result.message = "unknown subcommand '" + invocation.subcommand + "'";
    log << "error: " << result.message << '\n';
    return result;
  }

  std::optional<Outputs> out;
  try {
    config::Settings settings;
    if (invocation.config_file) settings.load_file(*invocation.config_file);
    for (const auto& [key, value] : invocation.overrides) settings.set(key, value);
    const config::RunConfig c = settings.resolve();

    const fs::path dir = c.out;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw ConfigError("output directory " + dir.string() + " is not usable");
    out.emplace(dir, invocation.subcommand + "-" + utc_timestamp() + "-" + std::to_string(c.seed));

    {
      const fs::path manifest = out->path("", ".manifest");
      std::ofstream m(manifest, std::ios::binary | std::ios::trunc);
      m << "# subcommand: " << invocation.subcommand << '\n' << settings.to_text();
      if (!m) throw std::runtime_error("failed writing " + manifest.string());
    }

    const std::string& sub = invocation.subcommand;
    if (sub == "simulate") {
      run_simulate(c, *out, log);
    } else if (sub == "compare") {
      run_compare(c, *out, log);
    } else if (sub == "frontier") {
      run_frontier(c, *out, log);
    } else if (sub == "trading-curve") {
      run_trading_curve(c, *out, log);
    } else if (sub == "hjb") {
      run_hjb(c, *out, log);
    } else if (sub == "price-option") {
      run_price_option(c, *out, log);
    } else {
      run_option_mm(c, *out, log);
    }
    result.files = out->files();
    for (const auto& f : result.files) log << "wrote " << f.string() << '\n';
    return result;
  } catch (const ConfigError& e) {
    result.exit_code = 2;
    result.message = e.what();
  } catch (const NumericalError& e) {
    result.exit_code = 3;
    result.message = e.what();
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.message = e.what();
  }
  if (out) out->discard();
  log << "error: " << result.message << '\n';
  return result;
}

int main(int argc, const char* const* argv) {
  CLI::App app{"Market making under stochastic volatility: simulations, HJB solver, option pricing"};
  app.require_subcommand(1);

  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::size_t> paths;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
  bool hedged = false;

  std::vector<CLI::App*> subs;
  static const std::map<std::string, std::string> about = {
      {"simulate", "simulate one quoting policy; per-path results, series, trading curve, histogram"},
      {"compare", "inventory strategy vs symmetric strategy with the same average spread"},
      {"frontier", "expected objective vs inventory variance across risk aversions"},
      {"trading-curve", "mean inventory over time for several risk aversions"},
      {"hjb", "solve the inventory HJB and compare with the closed-form quotes"},
      {"price-option", "price a European call on the (s, nu, t) grid with Greeks"},
      {"option-mm", "simulate an option market maker, optionally delta-hedged"},
  };
  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("-c,--config", config_file, "config file (key = value with [section] headers)");
    sub->add_option("--set", sets, "override, section.key=value (repeatable)");
    sub->add_option("--paths", paths, "number of simulated paths");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--threads", threads, "worker threads");
    sub->add_option("--out", out_dir, "output directory (default $SVMM_OUTPUT_DIR or .)");
    if (name == "option-mm") sub->add_flag("--hedged", hedged, "delta-hedge the option book");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Invocation inv;
  for (CLI::App* sub : subs) {
    if (sub->parsed()) inv.subcommand = sub->get_name();
  }
  if (!config_file.empty()) inv.config_file = config_file;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects section.key=value, got '" << s << "'\n";
      return 2;
    }
    inv.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (paths) inv.overrides.emplace_back("run.paths", std::to_string(*paths));
  if (seed) inv.overrides.emplace_back("run.seed", std::to_string(*seed));
  if (threads) inv.overrides.emplace_back("run.threads", std::to_string(*threads));
  if (out_dir) inv.overrides.emplace_back("run.out", *out_dir);
  if (hedged) inv.overrides.emplace_back("option_mm.hedged", "true");

  return run(inv, std::cerr).exit_code;
}

}  // namespace svmm::cli
