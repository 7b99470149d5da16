#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "procaudit/error.hpp"
#include "procaudit/ingest.hpp"
#include "procaudit/synthgen.hpp"

using namespace procaudit;

namespace {

std::string serialize(const Dataset& d) {
  std::ostringstream out;
  write_transactions(out, d);
  return out.str();
}

GenConfig small_config() {
  GenConfig cfg;
  cfg.n_records = 2000;
  cfg.n_vendors = 60;
  cfg.n_requesters = 20;
  cfg.n_approvers = 15;
  return cfg;
}

}  // namespace

TEST_CASE("generator is deterministic per seed") {
  const auto cfg = small_config();
  CHECK(serialize(generate(cfg)) == serialize(generate(cfg)));
  auto other = cfg;
  other.seed = cfg.seed + 1;
  CHECK(serialize(generate(other)) != serialize(generate(cfg)));
}

TEST_CASE("small vendor vocabulary is saturated") {
  GenConfig cfg;
  cfg.n_records = 1000;
  cfg.n_vendors = 10;
  cfg.n_requesters = 5;
  cfg.n_approvers = 5;
  const auto p = profile(generate(cfg));
  CHECK(p.distinct("vendor_code") == 10);
}

TEST_CASE("generated dataset has the configured shape") {
  const auto cfg = small_config();
  const auto d = generate(cfg);
  CHECK(d.size() == cfg.n_records);
  CHECK(d.schema.columns.size() == 11 + cfg.n_extra_columns);
  CHECK(clean(d).removed == 0);
  for (const auto& r : d.records) CHECK(*r.amount > 0.0);
}

TEST_CASE("company1-like generator hits the entity counts") {
  const auto p = profile(generate(GenConfig::company1_like()));
  CHECK(p.records == 27779);
  CHECK(p.distinct("vendor_code") == 988);
  CHECK(p.distinct("requester_id") == 122);
  CHECK(p.distinct("buyer_id") == 11);
  CHECK(p.distinct("approver_id") == 76);
  CHECK(p.distinct("group_category") == 3);
  CHECK(p.distinct("material_category") == 23);
  CHECK(p.distinct("order_id") == 6898);
}

TEST_CASE("generator config validation and JSON") {
  auto cfg = small_config();
  cfg.n_vendors = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  const auto back = gen_config_from_json(to_json(small_config()));
  CHECK(serialize(generate(back)) == serialize(generate(small_config())));
  CHECK(gen_config_from_json({{"preset", "company1"}}).n_records == 27779);
}

TEST_CASE("point injection count and multipliers") {
  GenConfig cfg;
  const auto d = generate(cfg);
  REQUIRE(d.size() == 20000);
  const auto r = inject_anomalies(d, AnomalySpec{}, 7);
  CHECK(r.truth.count(AnomalyLabel::Point) == 200);
  CHECK(r.truth.count(AnomalyLabel::Contextual) == 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double before = *d.records[i].amount;
    const double after = *r.dataset.records[i].amount;
    if (r.truth.labels[i] == AnomalyLabel::Point) {
      const double ratio = after / before;
      CHECK(ratio >= 10.0 * (1 - 1e-12));
      CHECK(ratio < 20.0 * (1 + 1e-12));
    } else {
      CHECK(after == before);
    }
  }
}

TEST_CASE("zero rates leave the dataset unchanged") {
  const auto d = generate(small_config());
  const auto r = inject_anomalies(d, AnomalySpec{0.0, 0.0, 10.0, 20.0}, 7);
  CHECK(r.dataset == d);
  CHECK(r.truth.count(AnomalyLabel::None) == d.size());
  CHECK(r.truth.warnings.size() == 2);
}

TEST_CASE("contextual vendors never co-occur with the requester or material") {
  const auto d = generate(small_config());
  const auto r = inject_anomalies(d, AnomalySpec{0.0, 0.02, 10.0, 20.0}, 11);
  CHECK(r.truth.count(AnomalyLabel::Contextual) == 40);
  std::set<std::pair<std::string, std::string>> by_requester, by_material;
  for (const auto& rec : d.records) {
    by_requester.insert({rec.requester_id, rec.vendor_code});
    by_material.insert({rec.material_category, rec.vendor_code});
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (r.truth.labels[i] != AnomalyLabel::Contextual) continue;
    const auto& rec = r.dataset.records[i];
    const auto tag = "row " + std::to_string(rec.row_id) + ":";
    const bool fallback = std::any_of(r.truth.notes.begin(), r.truth.notes.end(),
                                      [&](const std::string& n) { return n.rfind(tag, 0) == 0; });
    if (fallback) continue;
    CHECK_FALSE(by_requester.count({rec.requester_id, rec.vendor_code}));
    CHECK_FALSE(by_material.count({rec.material_category, rec.vendor_code}));
  }
}

TEST_CASE("anomaly spec validation") {
  CHECK_THROWS_AS((AnomalySpec{0.2, 0.0, 10, 20}.validate()), ConfigError);
  CHECK_THROWS_AS((AnomalySpec{0.01, 0.0, 1.0, 20}.validate()), ConfigError);
  CHECK_THROWS_AS((AnomalySpec{0.01, 0.0, 10, 5}.validate()), ConfigError);
}

TEST_CASE("ground truth file lists every row") {
  const auto d = generate(small_config());
  const auto r = inject_anomalies(d, AnomalySpec{}, 3);
  std::ostringstream out;
  write_ground_truth(out, r.dataset, r.truth);
  const auto text = out.str();
  CHECK(text.rfind("row_id,label\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(d.size() + 1));
}
