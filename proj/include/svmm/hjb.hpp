#pragma once

#include "svmm/heston.hpp"
#include "svmm/intensity.hpp"
#include "svmm/quotes.hpp"

#include <cstddef>
#include <vector>

namespace svmm::hjb {

// Exact dealer value function V(q, nu, t) on a bounded inventory box.
//
// Solves, backwards from V(q, nu, T) = 0,
//   V_t + theta(alpha - nu) V_nu + 1/2 xi^2 nu V_nunu - (gamma/2) q^2 nu
//       + (A/k)(e^{-k da*} + e^{-k db*}) = 0
// with da* = 1/k - beta [+ gamma eta^2/2 (q-1)^2] + V(q) - V(q-1),
//      db* = 1/k + beta [+ gamma eta^2/2 (q+1)^2] + V(q) - V(q+1).
// At q_max the bid term is dropped, at q_min the ask term.
struct HjbConfig {
  int q_min = -10;
  int q_max = 10;
  std::vector<double> nu_grid;
  int n_time = 20000;
  // Number of stored time slices, evenly spaced over [0, T] including both ends.
  int n_slices = 11;
  double horizon = 1.0;
  bool include_impact = false;
  heston::HestonParams heston;
  intensity::ArrivalParams arrival;
  quotes::RiskParams risk;
  unsigned threads = 1;

  void validate() const;
  [[nodiscard]] quotes::QuoteContext quote_context() const;
};

class ValueGrid {
public:
  ValueGrid() = default;
  ValueGrid(const HjbConfig& config, std::vector<double> times);

  [[nodiscard]] int q_min() const noexcept { return q_min_; }
  [[nodiscard]] int q_max() const noexcept { return q_max_; }
  [[nodiscard]] const std::vector<double>& nu() const noexcept { return nu_; }
  [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
  [[nodiscard]] std::size_t n_q() const noexcept { return static_cast<std::size_t>(q_max_ - q_min_ + 1); }

  // Slice index, inventory level and nu-node index.
  double& value(std::size_t slice, int q, std::size_t i) { return values_[index(slice, q, i)]; }
  double value(std::size_t slice, int q, std::size_t i) const { return values_[index(slice, q, i)]; }
  // Exact optimal premiums. A side that is dropped at an inventory bound
  // holds +infinity (no resting order).
  double& quote_a(std::size_t slice, int q, std::size_t i) { return quotes_a_[index(slice, q, i)]; }
  double quote_a(std::size_t slice, int q, std::size_t i) const { return quotes_a_[index(slice, q, i)]; }
  double& quote_b(std::size_t slice, int q, std::size_t i) { return quotes_b_[index(slice, q, i)]; }
  double quote_b(std::size_t slice, int q, std::size_t i) const { return quotes_b_[index(slice, q, i)]; }

  // max over all solver steps and nodes of (A/k)(e^{-k da*} + e^{-k db*}).
  double max_source = 0.0;
  // max over all solver steps of dt * (lambda_a + lambda_b).
  double max_rate_dt = 0.0;
  // Identifies the configuration that produced this grid.
  std::vector<double> fingerprint;

private:
  std::size_t index(std::size_t slice, int q, std::size_t i) const {
    return (slice * n_q() + static_cast<std::size_t>(q - q_min_)) * nu_.size() + i;
  }

  int q_min_ = 0;
  int q_max_ = 0;
  std::vector<double> nu_;
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> quotes_a_;
  std::vector<double> quotes_b_;
};

std::vector<double> config_fingerprint(const HjbConfig& config);

// Throws NumericalError when the explicit scheme's monotonicity bound is
// exceeded (reporting dt and the largest stable dt) or a value turns
// non-finite (reporting the grid location).
ValueGrid solve_stock_hjb(const HjbConfig& config);

// Discretization tolerance from one grid-refinement step: the solution on
// (every other nu node, half the time steps) is compared with the full
// solution at the shared nodes; the max difference estimates the error of
// the first-order scheme on the full grid.
double refinement_tolerance(const HjbConfig& config, const ValueGrid& fine);

struct GapLocation {
  int q = 0;
  double nu = 0.0;
  double t = 0.0;
};

struct ComparisonReport {
  double max_quote_gap_a = 0.0;
  double max_quote_gap_b = 0.0;
  GapLocation worst_a;
  GapLocation worst_b;
  bool sandwich_ok = true;
  std::size_t sandwich_violations = 0;
  double c_emp = 0.0;
  double tol = 0.0;
  // min over nodes of V - (Vtilde - tol) and of (Vtilde + c(T-t) + tol) - V.
  double lower_margin = 0.0;
  double upper_margin = 0.0;
  // V - Vtilde >= -tol at every node (active dealer dominates frozen).
  double min_excess = 0.0;
};

// Quote gaps are taken over q_min < q < q_max and nu nodes in
// [nu_eval_lo, nu_eval_hi]; the sandwich is checked at every stored node.
ComparisonReport compare_exact_vs_approx(const ValueGrid& grid, const HjbConfig& config, double tol,
                                         double nu_eval_lo = -1.0, double nu_eval_hi = 1e300);

}  // namespace svmm::hjb
