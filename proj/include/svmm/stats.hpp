#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace svmm::stats {

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator; 0 for n < 2
  double se = 0.0;   // std / sqrt(n)
};

// Two-pass, summed in index order.
Summary summarize(std::span<const double> values);

// Rank correlation with average ranks for ties. Throws for size mismatch or n < 2.
double spearman(std::span<const double> x, std::span<const double> y);

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};

// Equal-width bins over [min, max]; the last bin is closed.
Histogram histogram(std::span<const double> values, std::size_t bins);

}  // namespace svmm::stats
