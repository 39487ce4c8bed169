#pragma once

#include "svmm/heston.hpp"
#include "svmm/hjb.hpp"
#include "svmm/intensity.hpp"
#include "svmm/option_mm.hpp"
#include "svmm/option_pricing.hpp"
#include "svmm/quotes.hpp"
#include "svmm/sim_engine.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svmm::config {

// Fully typed, validated run configuration.
struct RunConfig {
  // [run]
  std::size_t paths = 1000;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  std::string out;

  // [heston], [market], [risk]
  heston::HestonParams heston;
  heston::Scheme scheme = heston::Scheme::binomial;
  intensity::ArrivalParams arrival;
  quotes::RiskParams risk;
  bool impact = false;
  quotes::ImpactVariant impact_variant = quotes::ImpactVariant::full;

  // [sim]
  double horizon = 1.0;
  double dt = 0.005;
  int q0 = 0;
  double x0 = 0.0;
  quotes::PolicyKind policy = quotes::PolicyKind::inventory_sv;
  std::optional<double> avg_spread;
  int snapshot_stride = 1;
  bool qv_impact_term = true;
  std::size_t histogram_bins = 40;

  // [hjb]
  int hjb_q_min = -10;
  int hjb_q_max = 10;
  double hjb_nu_max = 12.0;
  std::size_t hjb_nu_nodes = 49;
  int hjb_n_time = 20000;
  int hjb_n_slices = 11;
  bool hjb_include_impact = false;
  double hjb_nu_eval_lo = 1.0;
  double hjb_nu_eval_hi = 8.0;

  // [pricing]
  double strike = 100.0;
  double eta_nu = 0.0;
  std::size_t pricing_s_nodes = 161;
  std::size_t pricing_nu_nodes = 65;
  int pricing_n_time = 400;
  double pricing_t = 0.0;
  std::size_t pricing_mc_paths = 0;

  // [option_mm]
  bool hedged = false;
  int q_o0 = 0;
  int q_s0 = 0;
  std::size_t lattice_paths = 1000;
  int lattice_steps = 50;
  std::size_t lattice_s_nodes = 5;
  std::size_t lattice_nu_nodes = 5;
  std::size_t lattice_t_nodes = 5;

  // [frontier], [trading_curve]
  std::vector<double> frontier_gammas{0.0, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0};
  int frontier_q0 = 6;
  std::vector<double> curve_gammas{0.01, 0.1, 1.0};
  int curve_q0 = 6;

  [[nodiscard]] sim::SimConfig sim_config() const;
  [[nodiscard]] quotes::Policy policy_spec() const;
  [[nodiscard]] hjb::HjbConfig hjb_config() const;
  [[nodiscard]] option::PricingConfig pricing_config() const;
  [[nodiscard]] option_mm::OptionBookConfig option_book_config() const;
  [[nodiscard]] option_mm::LatticeSpec lattice_spec() const;
  [[nodiscard]] option_mm::FunctionalSettings functional_settings() const;
};

// Layered `section.key -> value` store. Every key has a default; setting an
// unknown key throws ConfigError. Text format:
//
//   # comment
//   [section]
//   key = value
class Settings {
public:
  Settings();

  void set(std::string_view key, std::string_view value);
  [[nodiscard]] const std::string& get(std::string_view key) const;
  [[nodiscard]] bool has(std::string_view key) const;

  void load_text(std::string_view text, std::string_view source = "<text>");
  void load_file(const std::filesystem::path& path);

  // All keys in config-file format, grouped by section.
  [[nodiscard]] std::string to_text() const;

  // Parses and validates every value.
  [[nodiscard]] RunConfig resolve() const;

  [[nodiscard]] static std::vector<std::string> keys();

private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace svmm::config
