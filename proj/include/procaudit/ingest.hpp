#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "procaudit/csv.hpp"

namespace procaudit {

enum class ColumnKind { Categorical, Numeric };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Categorical;

  bool operator==(const ColumnSpec&) const = default;
};

inline constexpr std::string_view kAmountColumn = "amount";

// Columns every transaction file must carry. Anything else is an extra
// categorical column carried through untouched.
inline constexpr std::array<std::string_view, 11> kMandatoryColumns = {
    "order_id",     "item_id",      "group_category", "material_category",
    "item_description", "vendor_code", "requester_id", "buyer_id",
    "approver_id",  "org_code",     "amount"};

struct Schema {
  std::vector<ColumnSpec> columns;

  // Mandatory columns in canonical order followed by `extra` categoricals.
  static Schema standard(const std::vector<std::string>& extra = {});
  // Accepts any column order; mandatory columns must all be present.
  static Schema from_header(const CsvRow& header);

  std::optional<std::size_t> find(std::string_view name) const;
  std::vector<std::string> names() const;

  bool operator==(const Schema&) const = default;
};

struct TransactionRecord {
  std::int64_t row_id = 0;
  // Data-row index in the originating file; survives clean().
  std::int64_t source_row = 0;
  std::string order_id;
  std::string item_id;
  std::string group_category;
  std::string material_category;
  std::string item_description;
  std::string vendor_code;
  std::string requester_id;
  std::string buyer_id;
  std::string approver_id;
  std::string org_code;
  std::optional<double> amount;
  std::vector<std::pair<std::string, std::string>> extra;

  // Text value of a categorical column; nullptr for unknown names and for
  // the amount column.
  const std::string* text(std::string_view column) const;
  std::string* text(std::string_view column);

  bool operator==(const TransactionRecord&) const = default;
};

struct Dataset {
  Schema schema;
  std::vector<TransactionRecord> records;

  std::size_t size() const { return records.size(); }
  bool operator==(const Dataset&) const = default;
};

// "", "NA" and "null" (any case, surrounding blanks ignored).
bool is_missing_token(std::string_view value);

// Strict decimal: optional sign, digits with '.' separator, optional
// exponent. Thousands separators, hex, inf and nan are rejected.
std::optional<double> parse_amount(std::string_view text);

Dataset load_transactions(const std::filesystem::path& path, const Schema& schema);
Dataset load_transactions(const std::filesystem::path& path);
Dataset parse_transactions(const CsvTable& table, const Schema& schema);

void write_transactions(std::ostream& out, const Dataset& d);
void save_transactions(const std::filesystem::path& path, const Dataset& d);

struct CleanResult {
  Dataset dataset;
  std::size_t removed = 0;
};

// Drops every record with a missing value in any schema column, keeps order,
// and renumbers row_id contiguously. Throws DataError if nothing survives.
CleanResult clean(const Dataset& d);

struct EntityProfile {
  std::string entity;   // requester_id, buyer_id, approver_id
  std::string measure;  // order_id, item_id, vendor_code
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;
};

struct ProfileReport {
  std::size_t records = 0;
  std::vector<std::pair<std::string, std::size_t>> distinct_counts;
  std::vector<EntityProfile> per_entity;
  double total_amount = 0.0;

  std::size_t distinct(std::string_view column) const;
  const EntityProfile* entity(std::string_view entity, std::string_view measure) const;
};

ProfileReport profile(const Dataset& d);
nlohmann::json to_json(const ProfileReport& report);
// figure,value CSV: record count, distinct counts, per-entity min/max/mean.
void write_profile_csv(std::ostream& out, const ProfileReport& report);

}  // namespace procaudit
