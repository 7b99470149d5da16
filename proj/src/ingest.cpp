#include "procaudit/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "procaudit/error.hpp"

namespace procaudit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool is_mandatory(std::string_view name) {
  return std::find(kMandatoryColumns.begin(), kMandatoryColumns.end(), name) !=
         kMandatoryColumns.end();
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

}  // namespace

Schema Schema::standard(const std::vector<std::string>& extra) {
  Schema s;
  for (auto name : kMandatoryColumns) {
    s.columns.push_back({std::string(name), name == kAmountColumn ? ColumnKind::Numeric
                                                                  : ColumnKind::Categorical});
  }
  for (const auto& name : extra) {
    if (is_mandatory(name)) throw ConfigError("extra column shadows mandatory column " + name);
    s.columns.push_back({name, ColumnKind::Categorical});
  }
  return s;
}

Schema Schema::from_header(const CsvRow& header) {
  Schema s;
  std::set<std::string> seen;
  for (const auto& raw : header) {
    const std::string name(trim(raw));
    if (!seen.insert(name).second) throw DataError("duplicate header column " + name);
    s.columns.push_back({name, name == kAmountColumn ? ColumnKind::Numeric
                                                     : ColumnKind::Categorical});
  }
  std::vector<std::string> missing;
  for (auto name : kMandatoryColumns) {
    if (!seen.count(std::string(name))) missing.emplace_back(name);
  }
  if (!missing.empty()) throw DataError("header mismatch: missing columns " + join(missing));
  return s;
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(columns.size());
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

const std::string* TransactionRecord::text(std::string_view column) const {
  return const_cast<TransactionRecord*>(this)->text(column);
}

std::string* TransactionRecord::text(std::string_view column) {
  if (column == "order_id") return &order_id;
  if (column == "item_id") return &item_id;
  if (column == "group_category") return &group_category;
  if (column == "material_category") return &material_category;
  if (column == "item_description") return &item_description;
  if (column == "vendor_code") return &vendor_code;
  if (column == "requester_id") return &requester_id;
  if (column == "buyer_id") return &buyer_id;
  if (column == "approver_id") return &approver_id;
  if (column == "org_code") return &org_code;
  for (auto& [name, value] : extra) {
    if (name == column) return &value;
  }
  return nullptr;
}

bool is_missing_token(std::string_view value) {
  const auto v = trim(value);
  return v.empty() || iequals(v, "NA") || iequals(v, "null");
}

std::optional<double> parse_amount(std::string_view text) {
  auto s = trim(text);
  if (s.empty()) return std::nullopt;
  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') {
    negative = s[i] == '-';
    ++i;
  }
  const std::size_t mantissa_start = i;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  }
  if (digits == 0) return std::nullopt;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++exp_digits;
    if (exp_digits == 0) return std::nullopt;
  }
  if (i != s.size()) return std::nullopt;
  double value = 0.0;
  const auto body = s.substr(mantissa_start);
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc{} || ptr != body.data() + body.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return negative ? -value : value;
}

Dataset parse_transactions(const CsvTable& table, const Schema& schema) {
  std::vector<std::string> header;
  for (const auto& h : table.header) header.emplace_back(trim(h));
  if (header != schema.names()) {
    std::vector<std::string> missing, unexpected;
    for (const auto& c : schema.columns) {
      if (std::find(header.begin(), header.end(), c.name) == header.end()) missing.push_back(c.name);
    }
    for (const auto& h : header) {
      if (!schema.find(h)) unexpected.push_back(h);
    }
    std::string msg = "header mismatch";
    if (!missing.empty()) msg += "; missing: " + join(missing);
    if (!unexpected.empty()) msg += "; unexpected: " + join(unexpected);
    if (missing.empty() && unexpected.empty()) msg += "; column order differs from schema";
    throw DataError(msg);
  }
  for (auto name : kMandatoryColumns) {
    if (!schema.find(name)) throw ConfigError("schema lacks mandatory column " + std::string(name));
  }

  Dataset d;
  d.schema = schema;
  d.records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    TransactionRecord rec;
    rec.row_id = static_cast<std::int64_t>(r);
    rec.source_row = rec.row_id;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      const auto& name = schema.columns[c].name;
      if (name == kAmountColumn) {
        if (is_missing_token(row[c])) continue;
        rec.amount = parse_amount(row[c]);
        if (!rec.amount) {
          throw DataError("row " + std::to_string(r) + " (line " + std::to_string(table.lines[r]) +
                          "): unparseable amount '" + row[c] + "'");
        }
      } else if (is_mandatory(name)) {
        *rec.text(name) = row[c];
      } else {
        rec.extra.emplace_back(name, row[c]);
      }
    }
    d.records.push_back(std::move(rec));
  }
  return d;
}

Dataset load_transactions(const std::filesystem::path& path, const Schema& schema) {
  return parse_transactions(read_csv_file(path), schema);
}

Dataset load_transactions(const std::filesystem::path& path) {
  const auto table = read_csv_file(path);
  return parse_transactions(table, Schema::from_header(table.header));
}

void write_transactions(std::ostream& out, const Dataset& d) {
  write_csv_row(out, d.schema.names());
  CsvRow row(d.schema.columns.size());
  for (const auto& rec : d.records) {
    for (std::size_t c = 0; c < d.schema.columns.size(); ++c) {
      const auto& name = d.schema.columns[c].name;
      if (name == kAmountColumn) {
        row[c] = rec.amount ? format_double(*rec.amount) : std::string();
      } else {
        const auto* v = rec.text(name);
        row[c] = v ? *v : std::string();
      }
    }
    write_csv_row(out, row);
  }
}

void save_transactions(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_transactions(out, d);
}

CleanResult clean(const Dataset& d) {
  CleanResult result;
  result.dataset.schema = d.schema;
  for (const auto& rec : d.records) {
    bool complete = true;
    for (const auto& col : d.schema.columns) {
      if (col.name == kAmountColumn) {
        complete = rec.amount.has_value();
      } else {
        const auto* v = rec.text(col.name);
        complete = v && !is_missing_token(*v);
      }
      if (!complete) break;
    }
    if (!complete) continue;
    auto kept = rec;
    kept.row_id = static_cast<std::int64_t>(result.dataset.records.size());
    result.dataset.records.push_back(std::move(kept));
  }
  result.removed = d.records.size() - result.dataset.records.size();
  if (result.dataset.records.empty()) throw DataError("clean removed every record");
  return result;
}

std::size_t ProfileReport::distinct(std::string_view column) const {
  for (const auto& [name, n] : distinct_counts) {
    if (name == column) return n;
  }
  return 0;
}

const EntityProfile* ProfileReport::entity(std::string_view entity,
                                           std::string_view measure) const {
  for (const auto& e : per_entity) {
    if (e.entity == entity && e.measure == measure) return &e;
  }
  return nullptr;
}

ProfileReport profile(const Dataset& d) {
  ProfileReport report;
  report.records = d.size();
  for (const auto& col : d.schema.columns) {
    if (col.name == kAmountColumn) {
      std::unordered_set<double> values;
      for (const auto& rec : d.records) {
        if (rec.amount) values.insert(*rec.amount);
      }
      report.distinct_counts.emplace_back(col.name, values.size());
      continue;
    }
    std::unordered_set<std::string_view> values;
    for (const auto& rec : d.records) values.insert(*rec.text(col.name));
    report.distinct_counts.emplace_back(col.name, values.size());
  }

  static constexpr std::array<std::string_view, 3> kEntities = {"requester_id", "buyer_id",
                                                                "approver_id"};
  static constexpr std::array<std::string_view, 3> kMeasures = {"order_id", "item_id",
                                                                "vendor_code"};
  for (auto entity : kEntities) {
    for (auto measure : kMeasures) {
      // std::map keeps iteration deterministic.
      std::map<std::string_view, std::unordered_set<std::string_view>> per;
      for (const auto& rec : d.records) per[*rec.text(entity)].insert(*rec.text(measure));
      EntityProfile e{std::string(entity), std::string(measure), 0, 0, 0.0};
      if (!per.empty()) {
        e.min = per.begin()->second.size();
        std::size_t total = 0;
        for (const auto& [_, set] : per) {
          e.min = std::min(e.min, set.size());
          e.max = std::max(e.max, set.size());
          total += set.size();
        }
        e.mean = static_cast<double>(total) / static_cast<double>(per.size());
      }
      report.per_entity.push_back(std::move(e));
    }
  }

  for (const auto& rec : d.records) {
    if (rec.amount) report.total_amount += *rec.amount;
  }
  return report;
}

nlohmann::json to_json(const ProfileReport& report) {
  nlohmann::json j;
  j["records"] = report.records;
  auto& distinct = j["distinct_counts"] = nlohmann::json::object();
  for (const auto& [name, n] : report.distinct_counts) distinct[name] = n;
  auto& ents = j["per_entity"] = nlohmann::json::array();
  for (const auto& e : report.per_entity) {
    ents.push_back({{"entity", e.entity},
                    {"measure", e.measure},
                    {"min", e.min},
                    {"max", e.max},
                    {"mean", e.mean}});
  }
  j["total_amount"] = report.total_amount;
  return j;
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_profile_csv(std::ostream& out, const ProfileReport& report) {
  write_csv_row(out, {"figure", "value"});
  write_csv_row(out, {"#Records", std::to_string(report.records)});
  const std::vector<std::pair<std::string, std::string>> labelled = {
      {"order_id", "#Purchase Orders (OrderID)"},
      {"item_id", "#Items (ItemID)"},
      {"group_category", "#Group Categories"},
      {"material_category", "#Material Categories"},
      {"item_description", "#Unique Item descriptions"},
      {"vendor_code", "#Vendors"},
      {"requester_id", "#Requesters"},
      {"buyer_id", "#Buyers"},
      {"approver_id", "#Approvers"},
      {"org_code", "#Organisation codes"}};
  for (const auto& [col, label] : labelled) {
    write_csv_row(out, {label, std::to_string(report.distinct(col))});
  }
  for (const auto& [name, n] : report.distinct_counts) {
    if (is_mandatory(name)) continue;
    write_csv_row(out, {"#" + name, std::to_string(n)});
  }
  const std::map<std::string, std::string> short_names = {
      {"order_id", "#OrderID"},     {"item_id", "#ItemID"},  {"vendor_code", "#VendorCode"},
      {"requester_id", "Requester"}, {"buyer_id", "Buyer"}, {"approver_id", "Approver"}};
  for (const auto& e : report.per_entity) {
    write_csv_row(out, {"Min/Max/Mean " + short_names.at(e.measure) + " / " +
                            short_names.at(e.entity),
                        std::to_string(e.min) + "/" + std::to_string(e.max) + "/" +
                            fixed2(e.mean)});
  }
  write_csv_row(out, {"Total Purchase Amount", fixed2(report.total_amount)});
}

}  // namespace procaudit
