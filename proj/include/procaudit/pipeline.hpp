#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "procaudit/clustering.hpp"
#include "procaudit/encoding.hpp"
#include "procaudit/ensemble.hpp"
#include "procaudit/iforest.hpp"
#include "procaudit/synthgen.hpp"
#include "procaudit/univariate.hpp"

namespace procaudit {

struct RunConfig {
  std::optional<std::filesystem::path> input;
  std::optional<GenConfig> generator;
  std::optional<AnomalySpec> injection;
  std::vector<EncodingStrategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  std::size_t k_min = 2;
  std::size_t k_max = 25;
  KMeansParams kmeans;
  double silhouette_fraction = 0.10;
  UnivariateParams univariate;
  ForestParams forest;
  double iforest_quantile = 0.99;
  std::size_t iforest_cap = 500;
  double cluster_min_fraction = 0.01;
  bool segregate_univariate = false;
  SecondaryOrder order = SecondaryOrder::SilhouetteAsc;
  std::size_t explain_top = 10;
  std::size_t shapley_permutations = 128;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "run";

  void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

// Aborted pipeline stage; the output directory holds a FAILED marker.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::string cause, bool data_error);
  const std::string& stage() const { return stage_; }
  bool data_error() const { return data_error_; }

 private:
  std::string stage_;
  bool data_error_;
};

struct ManifestEntry {
  std::string file;
  std::uintmax_t bytes = 0;
  std::string fnv1a64;
};

struct RunReport {
  std::vector<std::pair<std::string, double>> timings;
  std::size_t records_loaded = 0;
  std::size_t records_removed = 0;
  std::vector<UnivariateSummary> univariate;
  ModelSelection selection;
  std::size_t scored_rows = 0;
  std::size_t iforest_flagged = 0;
  PriorityGroupTable groups;
  std::vector<std::string> log;
  std::vector<ManifestEntry> manifest;
};

nlohmann::json to_json(const RunReport& report);

// generate/ingest -> clean -> profile -> encode x strategies -> univariate
// -> k-Means sweep + sampled silhouette -> model selection -> full
// silhouette -> isolation forest -> ensemble -> Shapley explanations.
// Stage seeds come from derive_seed(cfg.seed, <stage>); identical configs
// write byte-identical files (run_report.json aside, it carries timings).
RunReport run_pipeline(const RunConfig& cfg);

// Attributions for the first `top` rows of a finished run's review list,
// written to <run_dir>/explain/row_<id>.json. Returns the files written.
std::vector<std::filesystem::path> explain_run(const std::filesystem::path& run_dir,
                                               std::size_t top);

// Manifest of every regular file under dir except run_report.json.
std::vector<ManifestEntry> build_manifest(const std::filesystem::path& dir);

}  // namespace procaudit
