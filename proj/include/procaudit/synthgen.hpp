#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "procaudit/ingest.hpp"

namespace procaudit {

struct LognormalParams {
  double mu = 7.46;
  double sigma = 1.2;
};

struct GenConfig {
  std::size_t n_records = 20000;
  // Purchase orders the records are grouped into; 0 means n_records / 4.
  std::size_t n_orders = 0;
  std::size_t n_vendors = 988;
  std::size_t n_requesters = 122;
  std::size_t n_buyers = 11;
  std::size_t n_approvers = 76;
  std::size_t n_group_categories = 3;
  std::size_t n_material_categories = 23;
  std::size_t n_org_codes = 20;
  // Catalogue of item descriptions; 0 means 62% of n_records.
  std::size_t n_item_descriptions = 0;
  // Extra categorical columns appended after the mandatory eleven (max 6).
  std::size_t n_extra_columns = 6;
  // Size of each requester's preferred vendor subset.
  std::size_t vendors_per_requester = 8;
  LognormalParams amount;
  std::uint64_t seed = 42;

  // Entity counts of a 27779-record procurement ledger.
  static GenConfig company1_like();
  void validate() const;
};

GenConfig gen_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GenConfig& cfg);

// Deterministic for a given cfg.seed. Every entity vocabulary is saturated
// whenever n_orders / n_records are at least the corresponding count.
Dataset generate(const GenConfig& cfg);

enum class AnomalyLabel { None, Point, Contextual };
std::string_view to_string(AnomalyLabel label);

struct AnomalySpec {
  double rate_point = 0.01;
  double rate_contextual = 0.0;
  double multiplier_low = 10.0;
  double multiplier_high = 20.0;

  void validate() const;
};

struct GroundTruth {
  // Indexed by row_id.
  std::vector<AnomalyLabel> labels;
  std::vector<std::string> notes;
  std::vector<std::string> warnings;

  std::size_t count(AnomalyLabel label) const;
};

struct InjectionResult {
  Dataset dataset;
  GroundTruth truth;
};

// floor(rate * n) rows of each kind. Point rows get amount multiplied by a
// draw from [low, high); contextual rows get a vendor that never co-occurs
// with the row's requester nor its material category in the input.
InjectionResult inject_anomalies(const Dataset& d, const AnomalySpec& spec, std::uint64_t seed);

void write_ground_truth(std::ostream& out, const Dataset& d, const GroundTruth& truth);

}  // namespace procaudit
