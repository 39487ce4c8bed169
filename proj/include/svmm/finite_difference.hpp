#pragma once

#include <span>
#include <vector>

namespace svmm::fd {

// Three-point weights on a possibly non-uniform grid around node i with
// spacings h_minus = x_i - x_{i-1}, h_plus = x_{i+1} - x_i.
struct Stencil {
  double lower = 0.0;
  double centre = 0.0;
  double upper = 0.0;
};

Stencil central_first(double h_minus, double h_plus);
Stencil central_second(double h_minus, double h_plus);

// Throws ConfigError unless `nodes` has at least `min_size` strictly
// increasing finite entries.
void require_grid(std::span<const double> nodes, std::size_t min_size, const char* what);

std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

// Locates the cell [x_j, x_{j+1}] containing x and the fractional position
// in it. Returns false when x lies outside [front, back].
bool locate(std::span<const double> nodes, double x, std::size_t& cell, double& frac);

// Solves a tridiagonal system in place (Thomas algorithm). `lower[0]` and
// `upper[n-1]` are ignored. `rhs` receives the solution.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::vector<double>& scratch);

}  // namespace svmm::fd
