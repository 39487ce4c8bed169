#pragma once

#include "svmm/heston.hpp"
#include "svmm/intensity.hpp"
#include "svmm/option_pricing.hpp"
#include "svmm/quotes.hpp"
#include "svmm/stats.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace svmm::option_mm {

struct OptionMMState {
  double q_s = 0.0;  // real-valued when hedged
  int q_o = 0;
  heston::MidState mid;
  bool hedged = false;
};

struct Functionals {
  double H1 = 0.0;
  double H2 = 0.0;
  double M = 0.0;
  double se_H1 = 0.0;
  double se_H2 = 0.0;
  double se_M = 0.0;
};

struct FunctionalSettings {
  std::size_t n_paths = 1000;
  int n_steps = 50;
  std::uint64_t seed = 1;
  // Abort if more than this fraction of paths leaves the pricing grid.
  double max_exit_fraction = 0.01;
  unsigned threads = 1;
};

// Monte Carlo under the physical dynamics from (s, nu, t) to T:
//   H1 = -gamma     E[int nu (Delta + rho xi C_nu) du]
//   H2 = -gamma/2   E[int nu (Delta^2 + 2 rho xi Delta C_nu + xi^2 C_nu^2) du]
//   M  = -gamma/2 xi^2 E[int nu C_nu^2 du]
// Delta and C_nu are interpolated from `grid`; left-endpoint quadrature.
Functionals estimate_functionals(double s, double nu, double t, double horizon,
                                 const heston::HestonParams& heston, double gamma,
                                 const option::PricingGrid& grid, const FunctionalSettings& settings);

// Functionals tabulated on a coarse (s, nu, t) lattice, trilinear in between
// and clamped to the lattice box.
class FunctionalLattice {
public:
  FunctionalLattice() = default;
  FunctionalLattice(std::vector<double> s, std::vector<double> nu, std::vector<double> t);

  [[nodiscard]] const std::vector<double>& s() const noexcept { return s_; }
  [[nodiscard]] const std::vector<double>& nu() const noexcept { return nu_; }
  [[nodiscard]] const std::vector<double>& t() const noexcept { return t_; }

  Functionals& at(std::size_t a, std::size_t b, std::size_t c) { return data_[(a * nu_.size() + b) * t_.size() + c]; }
  const Functionals& at(std::size_t a, std::size_t b, std::size_t c) const {
    return data_[(a * nu_.size() + b) * t_.size() + c];
  }

  [[nodiscard]] Functionals interpolate(double s, double nu, double t) const;

private:
  std::vector<double> s_, nu_, t_;
  std::vector<Functionals> data_;
};

struct LatticeSpec {
  std::size_t s_nodes = 5;
  std::size_t nu_nodes = 5;
  std::size_t t_nodes = 5;
  double s_halfwidth_sd = 3.0;  // s in s0 +- this * sqrt(alpha T)
  double nu_lo = 0.5;
  double nu_hi = 10.0;
};

FunctionalLattice build_lattice(const heston::HestonParams& heston, double horizon, double gamma,
                                const option::PricingGrid& grid, const LatticeSpec& spec,
                                const FunctionalSettings& settings);

struct FourQuotes {
  double a_s = 0.0;
  double b_s = 0.0;
  double a_o = 0.0;
  double b_o = 0.0;
};

// Simultaneous stock and option quotes; the inventory coefficient f uses beta = 0.
FourQuotes option_book_quotes(const OptionMMState& state, const Functionals& F,
                           const intensity::ArrivalParams& arrival, const heston::HestonParams& heston,
                           double gamma, double t, double horizon);

// Option quotes of a delta-hedged book.
QuotePair hedged_option_quotes(const OptionMMState& state, const Functionals& F,
                          const intensity::ArrivalParams& arrival);

// q_s = -q_o Delta.
double hedge_position(int q_o, double delta) noexcept;

// -f q_s^2 + H1 q_s q_o + H2 q_o^2
double approx_value(double q_s, int q_o, double f, const Functionals& F) noexcept;
// M q_o^2
double approx_value_hedged(int q_o, const Functionals& F) noexcept;

struct OptionBookConfig {
  double horizon = 1.0;
  double dt = 0.005;
  int q_o0 = 0;
  int q_s0 = 0;
  double gamma = 0.1;
  bool hedged = true;
  heston::HestonParams heston;
  intensity::ArrivalParams stock_arrival;
  intensity::ArrivalParams option_arrival;
  unsigned threads = 1;

  void validate() const;
  [[nodiscard]] int n_steps() const;
};

// Per-path output. Inventory-value increments dI are formed from the cached
// Greeks by the second-order Ito-Taylor expansion of dC.
struct QuoteTraceRow {
  double t = 0.0;
  double s = 0.0;
  double nu = 0.0;
  int q_o = 0;
  double q_s = 0.0;
  double option_mid = 0.0;
  QuotePair option_quotes;
  std::optional<QuotePair> stock_quotes;  // unhedged books only
};

struct OptionPathRecord {
  double qv_book = 0.0;       // sum (dI)^2 of the book actually run
  double qv_option_only = 0.0;  // sum (q_o dC)^2 with the same fills (no stock leg)
  double qv_predicted = 0.0;  // hedged: sum nu xi^2 C_nu^2 q_o^2 dt; unhedged: full three-term form
  double wealth = 0.0;        // cash + q_o C + q_s s at T
  int q_o = 0;
  double q_s = 0.0;
  double avg_option_spread = 0.0;
  int grid_exits = 0;
  std::vector<QuoteTraceRow> trace;  // filled iff requested
};

OptionPathRecord run_option_path(const OptionBookConfig& config, const option::PricingGrid& grid,
                                 const FunctionalLattice& lattice, std::uint64_t seed, std::uint64_t index,
                                 bool record_trace = false);

struct OptionBookStats {
  std::size_t n = 0;
  stats::Summary qv_book;
  stats::Summary qv_option_only;
  stats::Summary qv_predicted;
  stats::Summary qv_gap;        // per-path qv_book - qv_predicted
  stats::Summary qv_reduction;  // per-path qv_book - qv_option_only
  stats::Summary wealth;
  stats::Summary q_o;
  double avg_option_spread = 0.0;
  std::vector<OptionPathRecord> paths;
};

OptionBookStats run_option_book(const OptionBookConfig& config, const option::PricingGrid& grid,
                                const FunctionalLattice& lattice, std::size_t n, std::uint64_t seed);

}  // namespace svmm::option_mm
