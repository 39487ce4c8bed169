#include "svmm/finite_difference.hpp"

#include "svmm/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace svmm::fd {

Stencil central_first(double hm, double hp) {
  const double denom = hm * hp * (hm + hp);
  return {-hp * hp / denom, (hp * hp - hm * hm) / denom, hm * hm / denom};
}

Stencil central_second(double hm, double hp) {
  return {2.0 / (hm * (hm + hp)), -2.0 / (hm * hp), 2.0 / (hp * (hm + hp))};
}

void require_grid(std::span<const double> nodes, std::size_t min_size, const char* what) {
  if (nodes.size() < min_size) {
    throw ConfigError(std::string(what) + ": grid needs at least " + std::to_string(min_size) +
                      " nodes");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i])) throw ConfigError(std::string(what) + ": non-finite node");
    if (i > 0 && !(nodes[i] > nodes[i - 1])) {
      throw ConfigError(std::string(what) + ": nodes must be strictly increasing");
    }
  }
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw ConfigError("uniform_grid: need n >= 2 and hi > lo");
  std::vector<double> x(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo + h * static_cast<double>(i);
  x.back() = hi;
  return x;
}

bool locate(std::span<const double> nodes, double x, std::size_t& cell, double& frac) {
  if (nodes.size() < 2 || !(x >= nodes.front()) || !(x <= nodes.back())) return false;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t j = static_cast<std::size_t>(it - nodes.begin());
  j = std::clamp<std::size_t>(j, 1, nodes.size() - 1) - 1;
  cell = j;
  frac = (x - nodes[j]) / (nodes[j + 1] - nodes[j]);
  return true;
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::vector<double>& scratch) {
  const std::size_t n = diag.size();
  scratch.resize(n);
  double denom = diag[0];
  scratch[0] = upper[0] / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - lower[i] * scratch[i - 1];
    scratch[i] = (i + 1 < n) ? upper[i] / denom : 0.0;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

}  // namespace svmm::fd
