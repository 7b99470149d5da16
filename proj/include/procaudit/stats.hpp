#pragma once

#include <span>
#include <vector>

namespace procaudit::stats {

double mean(std::span<const double> v);
// Population standard deviation, two-pass.
double population_std(std::span<const double> v);
// Even sizes average the two middle order statistics.
double median(std::span<const double> v);
// Most frequent exact value; ties go to the smallest value.
double mode(std::span<const double> v);
// Linear interpolation between order statistics at position p * (n - 1).
double quantile_linear(std::span<const double> v, double p);
double quantile_linear_sorted(std::span<const double> sorted, double p);
bool all_equal(std::span<const double> v);

}  // namespace procaudit::stats
