#pragma once

// Brute-force reference implementations. They share no code with the
// library and favour the textbook formulation over speed.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;

struct Silhouette {
  std::vector<double> values;
  double overall = 0.0;
};

Silhouette silhouette(const Points& x, const std::vector<int>& labels);

std::vector<bool> dbscan_noise(const std::vector<double>& col, double eps, std::size_t min_pts);
std::vector<bool> zscore(const std::vector<double>& col, double threshold);
std::vector<bool> iqr(const std::vector<double>& col);

double harmonic(std::size_t i);
double c_factor(std::size_t m);

// Shapley values by enumerating every feature ordering (d <= 8).
std::vector<double> shapley_permutations(const std::function<double(const std::vector<double>&)>& f,
                                         const std::vector<double>& row,
                                         const std::vector<double>& reference);

}  // namespace oracle
