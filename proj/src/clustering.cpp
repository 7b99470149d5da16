#include "procaudit/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "procaudit/error.hpp"
#include "procaudit/rng.hpp"
#include "procaudit/simd.hpp"

namespace procaudit {

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto a : assignments) ++sizes[static_cast<std::size_t>(a)];
  return sizes;
}

namespace {

// Nearest centroid per row; returns the SSE.
double assign(const ColumnBlock& cols, const std::vector<double>& centroids, std::size_t k,
              std::vector<double>& best, std::vector<std::int32_t>& labels,
              std::vector<double>& scratch) {
  const auto& kern = simd::active_kernels();
  const std::size_t n = cols.rows();
  const std::size_t d = cols.cols();
  std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
  std::fill(labels.begin(), labels.end(), 0);
  for (std::size_t c = 0; c < k; ++c) {
    kern.squared_distances(cols.data(), n, d, centroids.data() + c * d, scratch.data());
    kern.argmin_update(scratch.data(), n, static_cast<std::int32_t>(c), best.data(),
                       labels.data());
  }
  double sse = 0.0;
  for (double v : best) sse += v;
  return sse;
}

std::vector<double> seed_centroids(const FeatureMatrix& x, const ColumnBlock& cols, std::size_t k,
                                   Rng& rng) {
  const auto& kern = simd::active_kernels();
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<double> centroids(k * d);
  std::vector<bool> chosen(n, false);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<std::int32_t> unused(n, 0);
  std::vector<double> scratch(n);

  auto take = [&](std::size_t c, std::size_t r) {
    chosen[r] = true;
    const auto row = x.row(r);
    std::copy(row.begin(), row.end(), centroids.begin() + c * d);
    kern.squared_distances(cols.data(), n, d, row.data(), scratch.data());
    kern.argmin_update(scratch.data(), n, static_cast<std::int32_t>(c), nearest.data(),
                       unused.data());
  };

  take(0, rng.below(n));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) total += chosen[r] ? 0.0 : nearest[r];
    std::size_t pick = n;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        if (chosen[r] || nearest[r] <= 0.0) continue;
        acc += nearest[r];
        pick = r;
        if (acc > u) break;
      }
    }
    if (pick == n) {
      // Remaining points coincide with chosen centroids: uniform over the rest.
      std::vector<std::size_t> rest;
      for (std::size_t r = 0; r < n; ++r) {
        if (!chosen[r]) rest.push_back(r);
      }
      pick = rest[rng.below(rest.size())];
    }
    take(c, pick);
  }
  return centroids;
}

}  // namespace

ClusterModel kmeans_fit(const FeatureMatrix& x, std::size_t k, std::uint64_t seed,
                        const KMeansParams& params) {
  return kmeans_fit(x, ColumnBlock(x), k, seed, params);
}

ClusterModel kmeans_fit(const FeatureMatrix& x, const ColumnBlock& cols, std::size_t k,
                        std::uint64_t seed, const KMeansParams& params) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (k < 2) throw ConfigError("k-Means requires k >= 2");
  if (k > n) throw ConfigError("k-Means requires k <= number of rows");

  Rng rng(seed);
  ClusterModel m;
  m.k = k;
  m.dims = d;
  m.seed = seed;
  m.centroids = seed_centroids(x, cols, k, rng);
  m.assignments.assign(n, 0);

  std::vector<double> best(n), scratch(n);
  m.sse = assign(cols, m.centroids, k, best, m.assignments, scratch);
  m.sse_history.push_back(m.sse);

  std::vector<double> sums(k * d);
  std::vector<std::size_t> counts(k);
  for (std::size_t it = 0; it < params.max_iter; ++it) {
    std::fill(counts.begin(), counts.end(), 0);
    for (auto a : m.assignments) ++counts[static_cast<std::size_t>(a)];

    // Repair empty clusters with the worst-fitted point of a shared cluster.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t r = 0; r < n; ++r) {
        if (counts[static_cast<std::size_t>(m.assignments[r])] < 2) continue;
        if (far == n || best[r] > best[far]) far = r;
      }
      if (far == n) break;
      --counts[static_cast<std::size_t>(m.assignments[far])];
      m.assignments[far] = static_cast<std::int32_t>(c);
      counts[c] = 1;
      best[far] = 0.0;
    }

    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto row = x.row(r);
      double* s = sums.data() + static_cast<std::size_t>(m.assignments[r]) * d;
      for (std::size_t f = 0; f < d; ++f) s[f] += row[f];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      double moved = 0.0;
      for (std::size_t f = 0; f < d; ++f) {
        const double updated = sums[c * d + f] / static_cast<double>(counts[c]);
        const double delta = updated - m.centroids[c * d + f];
        moved += delta * delta;
        m.centroids[c * d + f] = updated;
      }
      shift = std::max(shift, std::sqrt(moved));
    }

    const auto previous = m.assignments;
    m.sse = assign(cols, m.centroids, k, best, m.assignments, scratch);
    m.sse_history.push_back(m.sse);
    m.iterations_run = it + 1;
    if (m.assignments == previous || shift < params.tol) break;
  }
  return m;
}

double recompute_sse(const FeatureMatrix& x, const ClusterModel& m) {
  double sse = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto c = m.centroid(static_cast<std::size_t>(m.assignments[r]));
    const auto row = x.row(r);
    for (std::size_t f = 0; f < x.cols(); ++f) sse += (row[f] - c[f]) * (row[f] - c[f]);
  }
  return sse;
}

SweepResult kmeans_sweep(const FeatureMatrix& x, std::size_t k_min, std::size_t k_max,
                         std::uint64_t seed, const KMeansParams& params) {
  if (k_min < 2 || k_max < k_min) throw ConfigError("invalid k range");
  if (k_max > x.rows()) throw ConfigError("k_max exceeds number of rows");
  const ColumnBlock cols(x);
  SweepResult out;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    out.models.push_back(kmeans_fit(x, cols, k, derive_seed(seed, "kmeans", k), params));
    out.curve.push_back({k, out.models.back().sse});
  }
  return out;
}

ElbowCurve elbow_sweep(const FeatureMatrix& x, std::size_t k_min, std::size_t k_max,
                       std::uint64_t seed, const KMeansParams& params) {
  return kmeans_sweep(x, k_min, k_max, seed, params).curve;
}

SilhouetteReport silhouette_full(const FeatureMatrix& x, std::span<const std::int32_t> labels) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (labels.size() != n) throw DataError("silhouette: label count does not match rows");
  std::size_t n_clusters = 0;
  for (auto l : labels) {
    if (l < 0) throw DataError("silhouette: negative cluster label");
    n_clusters = std::max(n_clusters, static_cast<std::size_t>(l) + 1);
  }
  std::vector<std::size_t> counts(n_clusters, 0);
  for (auto l : labels) ++counts[static_cast<std::size_t>(l)];
  const auto non_empty = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  if (non_empty < 2) throw DataError("silhouette needs at least two non-empty clusters");

  const auto& kern = simd::active_kernels();
  const ColumnBlock cols(x);
  SilhouetteReport rep;
  rep.values.resize(n);
  rep.positions.resize(n);
  std::iota(rep.positions.begin(), rep.positions.end(), 0);
  rep.row_ids = x.row_ids();

  std::vector<double> dist(n);
  std::vector<double> sums(n_clusters);
  for (std::size_t i = 0; i < n; ++i) {
    const auto own = static_cast<std::size_t>(labels[i]);
    if (counts[own] == 1) {
      rep.values[i] = 0.0;
      continue;
    }
    kern.distances(cols.data(), n, d, x.row(i).data(), dist.data());
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) sums[static_cast<std::size_t>(labels[j])] += dist[j];
    const double a = sums[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (c == own || counts[c] == 0) continue;
      b = std::min(b, sums[c] / static_cast<double>(counts[c]));
    }
    const double denom = std::max(a, b);
    rep.values[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  double total = 0.0;
  for (double s : rep.values) total += s;
  rep.overall = total / static_cast<double>(n);
  return rep;
}

std::vector<std::size_t> stratified_sample(std::span<const std::int32_t> labels, double fraction,
                                           std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("sample fraction must be in (0, 1]");
  std::size_t n_clusters = 0;
  for (auto l : labels) n_clusters = std::max(n_clusters, static_cast<std::size_t>(l) + 1);
  std::vector<std::vector<std::size_t>> members(n_clusters);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> sample;
  for (auto& m : members) {
    if (m.empty()) continue;
    // Shave off representation error so 0.1 * 30 is 3, not 4.
    const double want = std::ceil(fraction * static_cast<double>(m.size()) * (1.0 - 1e-12));
    const auto take = std::clamp<std::size_t>(static_cast<std::size_t>(want), 1, m.size());
    for (std::size_t i = 0; i < take; ++i) std::swap(m[i], m[i + rng.below(m.size() - i)]);
    sample.insert(sample.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(sample.begin(), sample.end());
  return sample;
}

SilhouetteReport silhouette_sampled(const FeatureMatrix& x, std::span<const std::int32_t> labels,
                                    double fraction, std::uint64_t seed) {
  if (labels.size() != x.rows()) throw DataError("silhouette: label count does not match rows");
  const auto positions = stratified_sample(labels, fraction, seed);
  const auto sub = x.select_rows(positions);
  std::vector<std::int32_t> sub_labels(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) sub_labels[i] = labels[positions[i]];
  auto rep = silhouette_full(sub, sub_labels);
  rep.positions = positions;
  rep.sampled = true;
  return rep;
}

std::string_view to_string(ClusterStructure s) {
  switch (s) {
    case ClusterStructure::Strong: return "strong";
    case ClusterStructure::Reasonable: return "reasonable";
    case ClusterStructure::Weak: return "weak";
  }
  return "weak";
}

ClusterStructure classify_structure(double silhouette) {
  if (silhouette > 0.7) return ClusterStructure::Strong;
  if (silhouette > 0.5) return ClusterStructure::Reasonable;
  return ClusterStructure::Weak;
}

ModelSelection select_model(std::span<const ModelCandidate> candidates) {
  if (candidates.empty()) throw ConfigError("model selection needs at least one candidate");
  std::size_t best = 0;
  auto better = [](const ModelCandidate& a, const ModelCandidate& b) {
    if (a.silhouette != b.silhouette) return a.silhouette > b.silhouette;
    if (a.k != b.k) return a.k < b.k;
    return static_cast<int>(a.strategy) < static_cast<int>(b.strategy);
  };
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (better(candidates[i], candidates[best])) best = i;
  }
  const auto& c = candidates[best];
  return {best, c.strategy, c.k, c.silhouette, classify_structure(c.silhouette)};
}

}  // namespace procaudit
