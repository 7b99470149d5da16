#include "procaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace procaudit::stats {

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of empty sequence");
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double population_std(std::span<const double> v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double median(std::span<const double> v) { return quantile_linear(v, 0.5); }

double mode(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mode of empty sequence");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  double best = s[0];
  std::size_t best_count = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    // Ascending scan with strict > keeps the smallest value on ties.
    if (j - i > best_count) {
      best_count = j - i;
      best = s[i];
    }
    i = j;
  }
  return best;
}

double quantile_linear_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sequence");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile_linear(std::span<const double> v, double p) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return quantile_linear_sorted(s, p);
}

bool all_equal(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace procaudit::stats
