#include "procaudit/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "procaudit/error.hpp"
#include "procaudit/rng.hpp"

namespace procaudit {

namespace {

std::string code(std::string_view prefix, std::size_t index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, index);
  return std::string(prefix) + buf;
}

// Cumulative weights i -> 1 / (i + 1)^alpha; draws favour low indices.
class SkewedPicker {
 public:
  SkewedPicker(std::size_t n, double alpha) : cumulative_(n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += 1.0 / std::pow(static_cast<double>(i + 1), alpha);
      cumulative_[i] = acc;
    }
  }

  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

struct ExtraColumn {
  std::string_view name;
  std::string_view prefix;
  std::size_t vocabulary;
};

constexpr std::array<ExtraColumn, 6> kExtraColumns = {{
    {"plant", "PL", 12},
    {"currency", "CUR", 3},
    {"payment_terms", "PT", 6},
    {"incoterm", "INC", 5},
    {"purchasing_group", "PG", 15},
    {"document_type", "DT", 4},
}};

}  // namespace

GenConfig GenConfig::company1_like() {
  GenConfig cfg;
  cfg.n_records = 27779;
  cfg.n_orders = 6898;
  cfg.n_vendors = 988;
  cfg.n_requesters = 122;
  cfg.n_buyers = 11;
  cfg.n_approvers = 76;
  cfg.n_group_categories = 3;
  cfg.n_material_categories = 23;
  cfg.n_item_descriptions = 17198;
  // exp(mu + sigma^2 / 2) * 27779 ~ 98.9 MEUR
  cfg.amount = {7.4575, 1.2};
  return cfg;
}

void GenConfig::validate() const {
  const std::array<std::pair<const char*, std::size_t>, 9> counts = {{
      {"n_records", n_records},
      {"n_vendors", n_vendors},
      {"n_requesters", n_requesters},
      {"n_buyers", n_buyers},
      {"n_approvers", n_approvers},
      {"n_group_categories", n_group_categories},
      {"n_material_categories", n_material_categories},
      {"n_org_codes", n_org_codes},
      {"vendors_per_requester", vendors_per_requester},
  }};
  for (const auto& [name, value] : counts) {
    if (value == 0) throw ConfigError(std::string("generator field ") + name + " must be >= 1");
  }
  if (n_extra_columns > kExtraColumns.size()) {
    throw ConfigError("n_extra_columns must be <= " + std::to_string(kExtraColumns.size()));
  }
  if (!(amount.sigma >= 0.0) || !std::isfinite(amount.mu) || !std::isfinite(amount.sigma)) {
    throw ConfigError("amount lognormal parameters must be finite with sigma >= 0");
  }
}

GenConfig gen_config_from_json(const nlohmann::json& j) {
  GenConfig cfg;
  if (j.contains("preset")) {
    if (j.at("preset") != "company1") throw ConfigError("unknown generator preset");
    cfg = GenConfig::company1_like();
  }
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  read("n_records", cfg.n_records);
  read("n_orders", cfg.n_orders);
  read("n_vendors", cfg.n_vendors);
  read("n_requesters", cfg.n_requesters);
  read("n_buyers", cfg.n_buyers);
  read("n_approvers", cfg.n_approvers);
  read("n_group_categories", cfg.n_group_categories);
  read("n_material_categories", cfg.n_material_categories);
  read("n_org_codes", cfg.n_org_codes);
  read("n_item_descriptions", cfg.n_item_descriptions);
  read("n_extra_columns", cfg.n_extra_columns);
  read("vendors_per_requester", cfg.vendors_per_requester);
  read("amount_mu", cfg.amount.mu);
  read("amount_sigma", cfg.amount.sigma);
  read("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const GenConfig& cfg) {
  return {{"n_records", cfg.n_records},
          {"n_orders", cfg.n_orders},
          {"n_vendors", cfg.n_vendors},
          {"n_requesters", cfg.n_requesters},
          {"n_buyers", cfg.n_buyers},
          {"n_approvers", cfg.n_approvers},
          {"n_group_categories", cfg.n_group_categories},
          {"n_material_categories", cfg.n_material_categories},
          {"n_org_codes", cfg.n_org_codes},
          {"n_item_descriptions", cfg.n_item_descriptions},
          {"n_extra_columns", cfg.n_extra_columns},
          {"vendors_per_requester", cfg.vendors_per_requester},
          {"amount_mu", cfg.amount.mu},
          {"amount_sigma", cfg.amount.sigma},
          {"seed", cfg.seed}};
}

Dataset generate(const GenConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  const std::size_t n_records = cfg.n_records;
  const std::size_t n_orders =
      std::clamp<std::size_t>(cfg.n_orders ? cfg.n_orders : n_records / 4, 1, n_records);
  const std::size_t n_desc = cfg.n_item_descriptions
                                 ? cfg.n_item_descriptions
                                 : std::max<std::size_t>(1, n_records * 62 / 100);
  const std::size_t nr = cfg.n_requesters;
  const std::size_t nv = cfg.n_vendors;
  const std::size_t nm = cfg.n_material_categories;

  // Vendor v always belongs to requester v % nr, so every vendor is
  // reachable; the rest of each subset is random.
  std::vector<std::vector<std::size_t>> preferred(nr);
  for (std::size_t v = 0; v < nv; ++v) preferred[v % nr].push_back(v);
  for (auto& set : preferred) {
    while (set.size() < std::min(cfg.vendors_per_requester, nv)) {
      const std::size_t v = rng.below(nv);
      if (std::find(set.begin(), set.end(), v) == set.end()) set.push_back(v);
    }
  }

  // Records per order: one each, remaining records spread at random.
  std::vector<std::size_t> order_sizes(n_orders, 1);
  for (std::size_t i = n_orders; i < n_records; ++i) ++order_sizes[rng.below(n_orders)];

  const SkewedPicker requester_pick(nr, 0.8);

  Dataset d;
  std::vector<std::string> extra_names;
  for (std::size_t e = 0; e < cfg.n_extra_columns; ++e) {
    extra_names.emplace_back(kExtraColumns[e].name);
  }
  d.schema = Schema::standard(extra_names);
  d.records.reserve(n_records);

  std::size_t next_item = 0;
  std::size_t record_index = 0;
  for (std::size_t o = 0; o < n_orders; ++o) {
    std::size_t requester;
    std::size_t vendor;
    if (o < std::max(nr, nv)) {
      requester = o % nr;
      vendor = o < nv ? o : preferred[requester][rng.below(preferred[requester].size())];
    } else {
      requester = requester_pick(rng);
      const auto& set = preferred[requester];
      // First preferred vendors dominate.
      vendor = set[std::min(set.size() - 1, static_cast<std::size_t>(
                                                 std::floor(set.size() * rng.uniform() *
                                                            rng.uniform())))];
    }
    const std::size_t org = requester % cfg.n_org_codes;
    const std::string order_id = code("PO", o, 7);

    for (std::size_t line = 0; line < order_sizes[o]; ++line, ++record_index) {
      const std::size_t i = record_index;
      TransactionRecord rec;
      rec.row_id = static_cast<std::int64_t>(i);
      rec.source_row = rec.row_id;
      rec.order_id = order_id;

      std::size_t material;
      if (i < nm) {
        material = i;
      } else {
        material = rng.uniform() < 0.8 ? vendor % nm : rng.below(nm);
      }
      std::size_t group;
      if (i < cfg.n_group_categories) {
        group = i;
      } else {
        group = rng.uniform() < 0.9 ? material % cfg.n_group_categories
                                    : rng.below(cfg.n_group_categories);
      }
      const std::size_t buyer = i < cfg.n_buyers ? i : rng.below(cfg.n_buyers);
      const std::size_t approver = i < cfg.n_approvers ? i : rng.below(cfg.n_approvers);

      std::size_t item;
      if (next_item > 0 && rng.uniform() < 0.07) {
        item = rng.below(next_item);
      } else {
        item = next_item++;
      }
      const std::size_t desc_slots = n_desc > material ? (n_desc - material + nm - 1) / nm : 1;
      const std::size_t desc = std::min(n_desc - 1, material + nm * rng.below(desc_slots));

      rec.item_id = code("IT", item, 7);
      rec.group_category = code("G", group, 2);
      rec.material_category = code("M", material, 3);
      rec.item_description = code("DESC", desc, 6);
      rec.vendor_code = code("V", vendor, 5);
      rec.requester_id = code("R", requester, 4);
      rec.buyer_id = code("B", buyer, 4);
      rec.approver_id = code("A", approver, 4);
      rec.org_code = code("ORG", org, 3);
      rec.amount = std::exp(cfg.amount.mu + cfg.amount.sigma * rng.normal());

      for (std::size_t e = 0; e < cfg.n_extra_columns; ++e) {
        const auto& spec = kExtraColumns[e];
        // Tied to the organisation most of the time.
        const std::size_t value =
            rng.uniform() < 0.75 ? (org + e) % spec.vocabulary : rng.below(spec.vocabulary);
        rec.extra.emplace_back(std::string(spec.name), code(spec.prefix, value, 2));
      }
      d.records.push_back(std::move(rec));
    }
  }
  return d;
}

std::string_view to_string(AnomalyLabel label) {
  switch (label) {
    case AnomalyLabel::None: return "none";
    case AnomalyLabel::Point: return "point";
    case AnomalyLabel::Contextual: return "contextual";
  }
  return "none";
}

void AnomalySpec::validate() const {
  for (double rate : {rate_point, rate_contextual}) {
    if (!(rate >= 0.0 && rate <= 0.05)) throw ConfigError("anomaly rates must lie in [0, 0.05]");
  }
  if (!(multiplier_low > 1.0)) throw ConfigError("multiplier low bound must be > 1");
  if (!(multiplier_high >= multiplier_low) || !std::isfinite(multiplier_high)) {
    throw ConfigError("multiplier high bound must be finite and >= low bound");
  }
}

std::size_t GroundTruth::count(AnomalyLabel label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

InjectionResult inject_anomalies(const Dataset& d, const AnomalySpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = d.size();
  InjectionResult result{d, {}};
  result.truth.labels.assign(n, AnomalyLabel::None);

  const auto n_point = static_cast<std::size_t>(std::floor(spec.rate_point * n));
  const auto n_context = static_cast<std::size_t>(std::floor(spec.rate_contextual * n));
  if (n_point == 0) result.truth.warnings.push_back("point anomaly rate selects 0 rows");
  if (n_context == 0) result.truth.warnings.push_back("contextual anomaly rate selects 0 rows");
  if (n_point + n_context == 0) return result;

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < n_point + n_context; ++i) {
    std::swap(order[i], order[i + rng.below(n - i)]);
  }

  for (std::size_t i = 0; i < n_point; ++i) {
    auto& rec = result.dataset.records[order[i]];
    const double m =
        spec.multiplier_low + (spec.multiplier_high - spec.multiplier_low) * rng.uniform();
    if (rec.amount) *rec.amount *= m;
    result.truth.labels[order[i]] = AnomalyLabel::Point;
  }

  if (n_context == 0) return result;

  // Co-occurrence from the pre-injection data.
  std::unordered_map<std::string, std::unordered_set<std::string>> by_requester, by_material;
  std::map<std::string, std::size_t> vendor_freq;
  for (const auto& rec : d.records) {
    by_requester[rec.requester_id].insert(rec.vendor_code);
    by_material[rec.material_category].insert(rec.vendor_code);
    ++vendor_freq[rec.vendor_code];
  }

  std::vector<std::string> candidates;
  for (std::size_t i = n_point; i < n_point + n_context; ++i) {
    const std::size_t row = order[i];
    auto& rec = result.dataset.records[row];
    const auto& seen_r = by_requester[rec.requester_id];
    const auto& seen_m = by_material[rec.material_category];
    candidates.clear();
    for (const auto& [vendor, _] : vendor_freq) {
      if (!seen_r.count(vendor) && !seen_m.count(vendor)) candidates.push_back(vendor);
    }
    if (!candidates.empty()) {
      rec.vendor_code = candidates[rng.below(candidates.size())];
    } else {
      const std::string* rarest = nullptr;
      std::size_t best = 0;
      for (const auto& [vendor, freq] : vendor_freq) {
        if (vendor == rec.vendor_code) continue;
        if (!rarest || freq < best) {
          rarest = &vendor;
          best = freq;
        }
      }
      if (rarest) {
        result.truth.notes.push_back("row " + std::to_string(rec.row_id) +
                                     ": no never-co-occurring vendor; used rarest vendor " +
                                     *rarest);
        rec.vendor_code = *rarest;
      } else {
        result.truth.notes.push_back("row " + std::to_string(rec.row_id) +
                                     ": dataset has a single vendor; vendor left unchanged");
      }
    }
    result.truth.labels[row] = AnomalyLabel::Contextual;
  }
  return result;
}

void write_ground_truth(std::ostream& out, const Dataset& d, const GroundTruth& truth) {
  out << "row_id,label\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << d.records[i].row_id << ',' << to_string(truth.labels[i]) << '\n';
  }
}

}  // namespace procaudit
