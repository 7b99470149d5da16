#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace procaudit {

using CsvRow = std::vector<std::string>;

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;
  // 1-based physical line on which each data row starts.
  std::vector<std::size_t> lines;
};

// RFC 4180 reader: comma separated, double-quote quoting with "" escapes,
// embedded newlines inside quotes, LF or CRLF record terminators. A leading
// UTF-8 BOM is dropped. Every record must have the header's field count.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

std::string csv_field(std::string_view value);
void write_csv_row(std::ostream& out, const CsvRow& row);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace procaudit
