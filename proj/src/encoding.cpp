#include "procaudit/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "procaudit/error.hpp"
#include "procaudit/stats.hpp"

namespace procaudit {

std::string_view to_string(EncodingStrategy s) {
  switch (s) {
    case EncodingStrategy::Count: return "count";
    case EncodingStrategy::Mean: return "mean";
    case EncodingStrategy::Median: return "median";
    case EncodingStrategy::Mode: return "mode";
  }
  return "mean";
}

std::optional<EncodingStrategy> parse_strategy(std::string_view name) {
  for (auto s : kAllStrategies) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

const ColumnEncoding* EncoderMap::find(std::string_view column) const {
  for (const auto& c : columns) {
    if (c.column == column) return &c;
  }
  return nullptr;
}

namespace {

double summarize(EncodingStrategy s, std::span<const double> amounts) {
  switch (s) {
    case EncodingStrategy::Count: return static_cast<double>(amounts.size());
    case EncodingStrategy::Mean: return stats::mean(amounts);
    case EncodingStrategy::Median: return stats::median(amounts);
    case EncodingStrategy::Mode: return stats::mode(amounts);
  }
  return 0.0;
}

std::vector<double> amounts_of(const Dataset& d) {
  std::vector<double> out;
  out.reserve(d.size());
  for (const auto& rec : d.records) {
    if (!rec.amount) throw DataError("record " + std::to_string(rec.row_id) + " has no amount");
    out.push_back(*rec.amount);
  }
  return out;
}

}  // namespace

EncoderMap fit_target_encoding(const Dataset& d, EncodingStrategy s,
                               const std::vector<std::string>& columns) {
  if (d.records.empty()) throw DataError("cannot fit encoding on an empty dataset");
  if (!d.schema.find(kAmountColumn)) throw DataError("dataset has no amount column");

  std::vector<std::string> targets;
  if (columns.empty()) {
    for (const auto& c : d.schema.columns) {
      if (c.kind == ColumnKind::Categorical) targets.push_back(c.name);
    }
  } else {
    for (const auto& name : columns) {
      const auto idx = d.schema.find(name);
      if (!idx) throw DataError("unknown column " + name);
      if (d.schema.columns[*idx].kind != ColumnKind::Categorical) {
        throw DataError("column " + name + " is not categorical");
      }
      targets.push_back(name);
    }
  }

  const auto amounts = amounts_of(d);
  EncoderMap m;
  m.strategy = s;
  m.columns.reserve(targets.size());
  const double global = s == EncodingStrategy::Count ? 0.0 : summarize(s, amounts);
  for (const auto& name : targets) {
    std::map<std::string, std::vector<double>> groups;
    for (std::size_t i = 0; i < d.size(); ++i) {
      groups[*d.records[i].text(name)].push_back(amounts[i]);
    }
    ColumnEncoding enc;
    enc.column = name;
    enc.fallback = global;
    for (const auto& [value, values] : groups) enc.groups.emplace(value, summarize(s, values));
    m.columns.push_back(std::move(enc));
  }
  return m;
}

EncodedFeatures apply_encoding(const Dataset& d, const EncoderMap& m) {
  std::vector<std::string> names;
  std::vector<const ColumnEncoding*> encoders;
  for (const auto& c : d.schema.columns) {
    if (c.name == kAmountColumn) {
      names.push_back(c.name);
      encoders.push_back(nullptr);
    } else if (const auto* enc = m.find(c.name)) {
      names.push_back(c.name);
      encoders.push_back(enc);
    }
  }
  for (const auto& enc : m.columns) {
    if (!d.schema.find(enc.column)) throw DataError("dataset lacks encoded column " + enc.column);
  }

  EncodedFeatures out{FeatureMatrix(d.size(), names), {}};
  std::map<std::pair<std::string, std::string>, std::size_t> unseen;
  for (std::size_t r = 0; r < d.size(); ++r) {
    const auto& rec = d.records[r];
    out.matrix.row_ids()[r] = rec.row_id;
    for (std::size_t f = 0; f < names.size(); ++f) {
      if (!encoders[f]) {
        if (!rec.amount) throw DataError("record " + std::to_string(rec.row_id) + " has no amount");
        out.matrix.at(r, f) = *rec.amount;
        continue;
      }
      const auto& value = *rec.text(names[f]);
      const auto it = encoders[f]->groups.find(value);
      if (it != encoders[f]->groups.end()) {
        out.matrix.at(r, f) = it->second;
      } else {
        out.matrix.at(r, f) = encoders[f]->fallback;
        ++unseen[{names[f], value}];
      }
    }
  }
  for (const auto& [key, n] : unseen) out.unseen.push_back({key.first, key.second, n});
  return out;
}

Normalized gaussian_normalize(const FeatureMatrix& x) {
  Normalized out{x, {}};
  const std::size_t d = x.cols();
  out.params.mean.resize(d);
  out.params.std.resize(d);
  out.params.zero_variance.resize(d);
  if (x.rows() == 0) return out;
  for (std::size_t f = 0; f < d; ++f) {
    const auto col = x.column(f);
    const bool constant = stats::all_equal(col);
    const double mu = stats::mean(col);
    const double sd = constant ? 0.0 : stats::population_std(col);
    out.params.mean[f] = mu;
    out.params.std[f] = sd;
    out.params.zero_variance[f] = constant || sd == 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      out.matrix.at(r, f) = out.params.zero_variance[f] ? 0.0 : (x.at(r, f) - mu) / sd;
    }
  }
  return out;
}

nlohmann::json to_json(const EncoderMap& m) {
  nlohmann::json j;
  j["strategy"] = to_string(m.strategy);
  j["target"] = m.target;
  auto& cols = j["columns"] = nlohmann::json::array();
  for (const auto& c : m.columns) {
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& [k, v] : c.groups) groups[k] = v;
    cols.push_back({{"column", c.column}, {"fallback", c.fallback}, {"groups", groups}});
  }
  return j;
}

EncoderMap encoder_map_from_json(const nlohmann::json& j) {
  EncoderMap m;
  const auto s = parse_strategy(j.at("strategy").get<std::string>());
  if (!s) throw DataError("unknown encoding strategy in encoder map");
  m.strategy = *s;
  m.target = j.at("target").get<std::string>();
  for (const auto& c : j.at("columns")) {
    ColumnEncoding enc;
    enc.column = c.at("column").get<std::string>();
    enc.fallback = c.at("fallback").get<double>();
    for (const auto& [k, v] : c.at("groups").items()) enc.groups.emplace(k, v.get<double>());
    m.columns.push_back(std::move(enc));
  }
  return m;
}

}  // namespace procaudit
