#include "svmm/config.hpp"

#include "svmm/error.hpp"
#include "svmm/finite_difference.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace svmm::config {

namespace {

struct KeyDefault {
  const char* key;
  const char* value;
};

std::string default_out_dir() {
  const char* env = std::getenv("SVMM_OUTPUT_DIR");
  return env && *env ? env : ".";
}

// Section order here is the manifest order.
const std::vector<KeyDefault>& key_table() {
  static const std::vector<KeyDefault> table = {
      {"run.paths", "1000"},
      {"run.seed", "42"},
      {"run.threads", "1"},
      {"run.out", ""},
      {"heston.s0", "100"},
      {"heston.nu0", "4"},
      {"heston.theta", "0.02"},
      {"heston.alpha", "4"},
      {"heston.xi", "0.5"},
      {"heston.rho", "0.7"},
      {"heston.scheme", "binomial"},
      {"market.A", "140"},
      {"market.k", "1.5"},
      {"market.eta", "0.09"},
      {"market.impact", "false"},
      {"risk.gamma", "0.1"},
      {"risk.beta", "0.03"},
      {"risk.impact_variant", "full"},
      {"sim.T", "1"},
      {"sim.dt", "0.005"},
      {"sim.q0", "0"},
      {"sim.x0", "0"},
      {"sim.policy", "inventory"},
      {"sim.avg_spread", ""},
      {"sim.snapshot_stride", "1"},
      {"sim.qv_impact_term", "true"},
      {"sim.histogram_bins", "40"},
      {"hjb.q_min", "-10"},
      {"hjb.q_max", "10"},
      {"hjb.nu_max", "12"},
      {"hjb.nu_nodes", "49"},
      {"hjb.n_time", "20000"},
      {"hjb.n_slices", "11"},
      {"hjb.include_impact", "false"},
      {"hjb.nu_eval_lo", "1"},
      {"hjb.nu_eval_hi", "8"},
      {"pricing.strike", "100"},
      {"pricing.eta_nu", "0"},
      {"pricing.s_nodes", "161"},
      {"pricing.nu_nodes", "65"},
      {"pricing.n_time", "400"},
      {"pricing.t", "0"},
      {"pricing.mc_paths", "0"},
      {"option_mm.hedged", "false"},
      {"option_mm.q_o0", "0"},
      {"option_mm.q_s0", "0"},
      {"option_mm.lattice_paths", "1000"},
      {"option_mm.lattice_steps", "50"},
      {"option_mm.lattice_s_nodes", "5"},
      {"option_mm.lattice_nu_nodes", "5"},
      {"option_mm.lattice_t_nodes", "5"},
      {"frontier.gammas", "0,0.005,0.01,0.05,0.1,0.5,1"},
      {"frontier.q0", "6"},
      {"trading_curve.gammas", "0.01,0.1,1"},
      {"trading_curve.q0", "6"},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view what) {
  throw ConfigError(std::string(key) + " = '" + std::string(value) + "': " + std::string(what));
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad(key, v, "expected a number");
  if (!std::isfinite(out)) bad(key, v, "must be finite");
  return out;
}

long long to_int(std::string_view key, std::string_view v) {
  long long out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad(key, v, "expected an integer");
  return out;
}

std::size_t to_count(std::string_view key, std::string_view v) {
  const long long n = to_int(key, v);
  if (n < 0) bad(key, v, "must be >= 0");
  return static_cast<std::size_t>(n);
}

int to_int32(std::string_view key, std::string_view v) {
  const long long n = to_int(key, v);
  if (n < -1'000'000'000 || n > 1'000'000'000) bad(key, v, "out of range");
  return static_cast<int>(n);
}

std::uint64_t to_seed(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad(key, v, "expected an unsigned integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "expected true/false");
}

std::vector<double> to_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = v.find(',', pos);
    const auto item = trim(v.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (item.empty()) bad(key, v, "empty list entry");
    out.push_back(to_double(key, item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

Settings::Settings() {
  for (const auto& kd : key_table()) values_.emplace(kd.key, kd.value);
  values_["run.out"] = default_out_dir();
}

std::vector<std::string> Settings::keys() {
  std::vector<std::string> out;
  for (const auto& kd : key_table()) out.emplace_back(kd.key);
  return out;
}

bool Settings::has(std::string_view key) const { return values_.find(key) != values_.end(); }

void Settings::set(std::string_view key, std::string_view value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second = std::string(trim(value));
}

const std::string& Settings::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

void Settings::load_text(std::string_view text, std::string_view source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string(source) + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, keys] : tree) {
    if (keys.empty()) throw ConfigError(std::string(source) + ": key '" + section + "' outside of a section");
    for (const auto& [key, value] : keys) {
      try {
        set(section + "." + key, value.data());
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(source) + ": [" + section + "] " + e.what());
      }
    }
  }
}

void Settings::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path.string());
}

std::string Settings::to_text() const {
  std::ostringstream out;
  std::string section;
  for (const auto& kd : key_table()) {
    const std::string_view key = kd.key;
    const auto dot = key.find('.');
    const std::string sec(key.substr(0, dot));
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << key.substr(dot + 1) << " = " << get(key) << '\n';
  }
  return out.str();
}

RunConfig Settings::resolve() const {
  RunConfig c;
  auto v = [&](const char* key) -> std::string_view { return get(key); };
  auto num = [&](const char* key) { return to_double(key, v(key)); };
  auto cnt = [&](const char* key) { return to_count(key, v(key)); };
  auto i32 = [&](const char* key) { return to_int32(key, v(key)); };
  auto flag = [&](const char* key) { return to_bool(key, v(key)); };

  c.paths = cnt("run.paths");
  if (c.paths < 1) throw ConfigError("run.paths must be >= 1");
  c.seed = to_seed("run.seed", v("run.seed"));
  const std::size_t threads = cnt("run.threads");
  if (threads < 1 || threads > 1024) throw ConfigError("run.threads must be in [1, 1024]");
  c.threads = static_cast<unsigned>(threads);
  c.out = std::string(v("run.out"));
  if (c.out.empty()) c.out = ".";

  c.heston.s0 = num("heston.s0");
  c.heston.nu0 = num("heston.nu0");
  c.heston.theta = num("heston.theta");
  c.heston.alpha = num("heston.alpha");
  c.heston.xi = num("heston.xi");
  c.heston.rho = num("heston.rho");
  const auto scheme = v("heston.scheme");
  if (scheme == "binomial") {
    c.scheme = heston::Scheme::binomial;
  } else if (scheme == "gaussian") {
    c.scheme = heston::Scheme::gaussian;
  } else {
    bad("heston.scheme", scheme, "expected binomial or gaussian");
  }

  c.arrival.A = num("market.A");
  c.arrival.k = num("market.k");
  c.risk.eta = num("market.eta");
  c.impact = flag("market.impact");
  c.risk.gamma = num("risk.gamma");
  c.risk.beta = num("risk.beta");
  c.impact_variant = quotes::parse_impact_variant(v("risk.impact_variant"));

  c.horizon = num("sim.T");
  c.dt = num("sim.dt");
  c.q0 = i32("sim.q0");
  c.x0 = num("sim.x0");
  c.policy = quotes::parse_policy_kind(v("sim.policy"));
  if (!v("sim.avg_spread").empty()) c.avg_spread = num("sim.avg_spread");
  c.snapshot_stride = i32("sim.snapshot_stride");
  c.qv_impact_term = flag("sim.qv_impact_term");
  c.histogram_bins = cnt("sim.histogram_bins");
  if (c.histogram_bins < 1) throw ConfigError("sim.histogram_bins must be >= 1");

  c.hjb_q_min = i32("hjb.q_min");
  c.hjb_q_max = i32("hjb.q_max");
  c.hjb_nu_max = num("hjb.nu_max");
  c.hjb_nu_nodes = cnt("hjb.nu_nodes");
  c.hjb_n_time = i32("hjb.n_time");
  c.hjb_n_slices = i32("hjb.n_slices");
  c.hjb_include_impact = flag("hjb.include_impact");
  c.hjb_nu_eval_lo = num("hjb.nu_eval_lo");
  c.hjb_nu_eval_hi = num("hjb.nu_eval_hi");

  c.strike = num("pricing.strike");
  c.eta_nu = num("pricing.eta_nu");
  c.pricing_s_nodes = cnt("pricing.s_nodes");
  c.pricing_nu_nodes = cnt("pricing.nu_nodes");
  c.pricing_n_time = i32("pricing.n_time");
  c.pricing_t = num("pricing.t");
  c.pricing_mc_paths = cnt("pricing.mc_paths");

  c.hedged = flag("option_mm.hedged");
  c.q_o0 = i32("option_mm.q_o0");
  c.q_s0 = i32("option_mm.q_s0");
  c.lattice_paths = cnt("option_mm.lattice_paths");
  c.lattice_steps = i32("option_mm.lattice_steps");
  c.lattice_s_nodes = cnt("option_mm.lattice_s_nodes");
  c.lattice_nu_nodes = cnt("option_mm.lattice_nu_nodes");
  c.lattice_t_nodes = cnt("option_mm.lattice_t_nodes");

  c.frontier_gammas = to_list("frontier.gammas", v("frontier.gammas"));
  c.frontier_q0 = i32("frontier.q0");
  c.curve_gammas = to_list("trading_curve.gammas", v("trading_curve.gammas"));
  c.curve_q0 = i32("trading_curve.q0");

  // Validate the derived configurations eagerly so no run starts on bad input.
  c.sim_config().validate();
  c.policy_spec().validate();
  if (c.pricing_t < 0.0 || c.pricing_t > c.horizon) throw ConfigError("pricing.t must lie in [0, sim.T]");
  if (c.pricing_s_nodes < 5 || c.pricing_nu_nodes < 3) throw ConfigError("pricing grid too small");
  c.pricing_config().validate();
  if (c.hjb_nu_nodes < 3) throw ConfigError("hjb.nu_nodes must be >= 3");
  c.hjb_config().validate();
  c.option_book_config().validate();
  if (c.lattice_s_nodes < 2 || c.lattice_nu_nodes < 2 || c.lattice_t_nodes < 2) {
    throw ConfigError("option_mm lattice needs at least 2 nodes per axis");
  }
  if (c.lattice_paths < 1000) throw ConfigError("option_mm.lattice_paths must be >= 1000");
  if (c.lattice_steps < 1) throw ConfigError("option_mm.lattice_steps must be >= 1");
  for (double g : c.frontier_gammas) {
    if (g < 0.0) throw ConfigError("frontier.gammas entries must be >= 0");
  }
  for (double g : c.curve_gammas) {
    if (g < 0.0) throw ConfigError("trading_curve.gammas entries must be >= 0");
  }
  return c;
}

sim::SimConfig RunConfig::sim_config() const {
  sim::SimConfig s;
  s.horizon = horizon;
  s.dt = dt;
  s.q0 = q0;
  s.x0 = x0;
  s.heston = heston;
  s.arrival = arrival;
  s.risk = risk;
  if (!impact) s.risk.eta = 0.0;
  s.scheme = scheme;
  s.impact = impact;
  s.qv_impact_term = qv_impact_term;
  s.snapshot_stride = snapshot_stride;
  s.threads = threads;
  return s;
}

quotes::Policy RunConfig::policy_spec() const {
  quotes::Policy p;
  p.kind = policy;
  p.avg_spread = avg_spread;
  p.impact_variant = impact_variant;
  return p;
}

hjb::HjbConfig RunConfig::hjb_config() const {
  hjb::HjbConfig h;
  h.q_min = hjb_q_min;
  h.q_max = hjb_q_max;
  h.nu_grid = fd::uniform_grid(0.0, hjb_nu_max, hjb_nu_nodes);
  h.n_time = hjb_n_time;
  h.n_slices = hjb_n_slices;
  h.horizon = horizon;
  h.include_impact = hjb_include_impact;
  h.heston = heston;
  h.arrival = arrival;
  h.risk = risk;
  if (!hjb_include_impact) h.risk.eta = 0.0;
  h.threads = threads;
  return h;
}

option::PricingConfig RunConfig::pricing_config() const {
  return option::default_pricing_config(heston, strike, horizon, eta_nu, pricing_s_nodes, pricing_nu_nodes,
                                        pricing_n_time);
}

option_mm::OptionBookConfig RunConfig::option_book_config() const {
  option_mm::OptionBookConfig b;
  b.horizon = horizon;
  b.dt = dt;
  b.q_o0 = q_o0;
  b.q_s0 = q_s0;
  b.gamma = risk.gamma;
  b.hedged = hedged;
  b.heston = heston;
  b.stock_arrival = arrival;
  b.option_arrival = arrival;
  b.threads = threads;
  return b;
}

option_mm::LatticeSpec RunConfig::lattice_spec() const {
  option_mm::LatticeSpec l;
  l.s_nodes = lattice_s_nodes;
  l.nu_nodes = lattice_nu_nodes;
  l.t_nodes = lattice_t_nodes;
  return l;
}

option_mm::FunctionalSettings RunConfig::functional_settings() const {
  option_mm::FunctionalSettings f;
  f.n_paths = lattice_paths;
  f.n_steps = lattice_steps;
  f.seed = seed;
  f.threads = threads;
  return f;
}

}  // namespace svmm::config
