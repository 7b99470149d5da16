#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "procaudit/encoding.hpp"
#include "procaudit/feature_matrix.hpp"

namespace procaudit {

struct KMeansParams {
  std::size_t max_iter = 100;
  double tol = 1e-6;
};

struct ClusterModel {
  std::size_t k = 0;
  std::size_t dims = 0;
  std::vector<double> centroids;  // k x dims, row-major
  std::vector<std::int32_t> assignments;
  double sse = 0.0;
  std::uint64_t seed = 0;
  std::size_t iterations_run = 0;
  // SSE after the initial assignment and after every Lloyd iteration.
  std::vector<double> sse_history;

  std::span<const double> centroid(std::size_t c) const {
    return {centroids.data() + c * dims, dims};
  }
  std::vector<std::size_t> cluster_sizes() const;
};

// Lloyd iteration from k-means++ seeding. Stops at an assignment fixpoint,
// when no centroid moves by tol or more, or after max_iter updates. Empty
// clusters take the point farthest from its centroid. Final assignments are
// always nearest-centroid (ties to the lower index).
ClusterModel kmeans_fit(const FeatureMatrix& x, std::size_t k, std::uint64_t seed,
                        const KMeansParams& params = {});
ClusterModel kmeans_fit(const FeatureMatrix& x, const ColumnBlock& columns, std::size_t k,
                        std::uint64_t seed, const KMeansParams& params = {});

// Independent scalar recomputation of the within-cluster SSE.
double recompute_sse(const FeatureMatrix& x, const ClusterModel& m);

struct ElbowPoint {
  std::size_t k = 0;
  double sse = 0.0;
};
using ElbowCurve = std::vector<ElbowPoint>;

struct SweepResult {
  ElbowCurve curve;
  std::vector<ClusterModel> models;
};

// One fit per k in [k_min, k_max]; fit k uses derive_seed(seed, "kmeans", k).
SweepResult kmeans_sweep(const FeatureMatrix& x, std::size_t k_min, std::size_t k_max,
                         std::uint64_t seed, const KMeansParams& params = {});
ElbowCurve elbow_sweep(const FeatureMatrix& x, std::size_t k_min, std::size_t k_max,
                       std::uint64_t seed, const KMeansParams& params = {});

struct SilhouetteReport {
  std::vector<double> values;
  // Matrix row positions of `values`, ascending.
  std::vector<std::size_t> positions;
  std::vector<std::int64_t> row_ids;
  double overall = 0.0;
  bool sampled = false;
};

// Exact O(n^2): s = (b - a) / max(a, b); singletons score 0.
SilhouetteReport silhouette_full(const FeatureMatrix& x, std::span<const std::int32_t> labels);

// ceil(fraction * |cluster|) rows per cluster, drawn without replacement;
// a and b are computed within the sample.
SilhouetteReport silhouette_sampled(const FeatureMatrix& x, std::span<const std::int32_t> labels,
                                    double fraction, std::uint64_t seed);

// Ascending row positions of a per-cluster stratified sample.
std::vector<std::size_t> stratified_sample(std::span<const std::int32_t> labels, double fraction,
                                           std::uint64_t seed);

enum class ClusterStructure { Strong, Reasonable, Weak };
std::string_view to_string(ClusterStructure s);
// > 0.7 strong, > 0.5 reasonable, otherwise weak.
ClusterStructure classify_structure(double silhouette);

struct ModelCandidate {
  EncodingStrategy strategy = EncodingStrategy::Mean;
  std::size_t k = 0;
  double silhouette = 0.0;
};

struct ModelSelection {
  std::size_t index = 0;  // into the candidate list
  EncodingStrategy strategy = EncodingStrategy::Mean;
  std::size_t k = 0;
  double silhouette = 0.0;
  ClusterStructure structure = ClusterStructure::Weak;
};

// Highest silhouette; ties go to smaller k, then Count < Mean < Median < Mode.
ModelSelection select_model(std::span<const ModelCandidate> candidates);

}  // namespace procaudit
