#pragma once

#include <span>
#include <vector>

namespace qtwalk {

// Correlation coefficients. Inputs must have equal length; fewer than two
// points or a constant input yield 0.
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
// Kendall's tau-b, O(n log n).
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> x);

}  // namespace qtwalk
