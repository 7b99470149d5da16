#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "procaudit/feature_matrix.hpp"
#include "procaudit/ingest.hpp"

namespace procaudit {

// Statistic of the order amount that replaces each categorical group.
enum class EncodingStrategy { Count, Mean, Median, Mode };

inline constexpr std::array<EncodingStrategy, 4> kAllStrategies = {
    EncodingStrategy::Count, EncodingStrategy::Mean, EncodingStrategy::Median,
    EncodingStrategy::Mode};

std::string_view to_string(EncodingStrategy s);
std::optional<EncodingStrategy> parse_strategy(std::string_view name);

struct ColumnEncoding {
  std::string column;
  std::map<std::string, double> groups;
  // Used for groups not seen at fit time.
  double fallback = 0.0;

  bool operator==(const ColumnEncoding&) const = default;
};

struct EncoderMap {
  EncodingStrategy strategy = EncodingStrategy::Mean;
  std::string target{kAmountColumn};
  std::vector<ColumnEncoding> columns;

  const ColumnEncoding* find(std::string_view column) const;
  bool operator==(const EncoderMap&) const = default;
};

// Fits every categorical schema column, or only `columns` when given.
EncoderMap fit_target_encoding(const Dataset& d, EncodingStrategy s,
                               const std::vector<std::string>& columns = {});

struct UnseenValue {
  std::string column;
  std::string value;
  std::size_t occurrences = 0;
};

struct EncodedFeatures {
  FeatureMatrix matrix;
  std::vector<UnseenValue> unseen;
};

// One feature per modelled schema column, in schema order: encoded
// categoricals and the amount passed through. Categorical columns absent
// from the map are left out.
EncodedFeatures apply_encoding(const Dataset& d, const EncoderMap& m);

struct NormParams {
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<bool> zero_variance;
};

struct Normalized {
  FeatureMatrix matrix;
  NormParams params;
};

// (v - mean) / population std per feature; constant features become zeros.
Normalized gaussian_normalize(const FeatureMatrix& x);

nlohmann::json to_json(const EncoderMap& m);
EncoderMap encoder_map_from_json(const nlohmann::json& j);

}  // namespace procaudit
