#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace oracle {

namespace {

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) s += (a[f] - b[f]) * (a[f] - b[f]);
  return std::sqrt(s);
}

}  // namespace

Silhouette silhouette(const Points& x, const std::vector<int>& labels) {
  const std::size_t n = x.size();
  std::map<int, std::size_t> sizes;
  for (int l : labels) ++sizes[l];
  Silhouette out;
  out.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (sizes[labels[i]] == 1) continue;
    std::map<int, double> sum;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sum[labels[j]] += dist(x[i], x[j]);
    }
    const double a = sum[labels[i]] / static_cast<double>(sizes[labels[i]] - 1);
    double b = INFINITY;
    for (const auto& [label, size] : sizes) {
      if (label != labels[i]) b = std::min(b, sum[label] / static_cast<double>(size));
    }
    const double m = std::max(a, b);
    out.values[i] = m > 0.0 ? (b - a) / m : 0.0;
  }
  for (double v : out.values) out.overall += v;
  out.overall /= static_cast<double>(n);
  return out;
}

std::vector<bool> dbscan_noise(const std::vector<double>& col, double eps, std::size_t min_pts) {
  const std::size_t n = col.size();
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t neighbours = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && std::abs(col[i] - col[j]) <= eps) ++neighbours;
    }
    core[i] = neighbours >= min_pts;
  }
  std::vector<bool> noise(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      noise[i] = false;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (core[j] && std::abs(col[i] - col[j]) <= eps) {
        noise[i] = false;
        break;
      }
    }
  }
  return noise;
}

std::vector<bool> zscore(const std::vector<double>& col, double threshold) {
  const double n = static_cast<double>(col.size());
  double sum = 0.0;
  for (double v : col) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : col) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  std::vector<bool> out(col.size(), false);
  if (std::all_of(col.begin(), col.end(), [&](double v) { return v == col[0]; })) return out;
  for (std::size_t i = 0; i < col.size(); ++i) out[i] = std::abs(col[i] - mean) / sd > threshold;
  return out;
}

std::vector<bool> iqr(const std::vector<double>& col) {
  std::vector<bool> out(col.size(), false);
  if (col.size() < 4) return out;
  auto s = col;
  std::sort(s.begin(), s.end());
  auto q = [&](double p) {
    const double h = p * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
  };
  const double q1 = q(0.25), q3 = q(0.75);
  const double lower = q1 - 1.5 * (q3 - q1), upper = q3 + 1.5 * (q3 - q1);
  for (std::size_t i = 0; i < col.size(); ++i) out[i] = col[i] < lower || col[i] > upper;
  return out;
}

double harmonic(std::size_t i) {
  long double s = 0.0L;
  for (std::size_t k = i; k >= 1; --k) s += 1.0L / static_cast<long double>(k);
  return static_cast<double>(s);
}

double c_factor(std::size_t m) {
  if (m <= 1) return 0.0;
  const long double md = static_cast<long double>(m);
  return static_cast<double>(2.0L * static_cast<long double>(harmonic(m - 1)) -
                             2.0L * (md - 1.0L) / md);
}

std::vector<double> shapley_permutations(const std::function<double(const std::vector<double>&)>& f,
                                         const std::vector<double>& row,
                                         const std::vector<double>& reference) {
  const std::size_t d = row.size();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(d, 0.0);
  double count = 0.0;
  do {
    auto z = reference;
    double prev = f(z);
    for (auto j : order) {
      z[j] = row[j];
      const double cur = f(z);
      phi[j] += cur - prev;
      prev = cur;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& v : phi) v /= count;
  return phi;
}

}  // namespace oracle
