#include "procaudit/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "procaudit/error.hpp"

namespace procaudit {

namespace {

class RecordParser {
 public:
  explicit RecordParser(std::string text) : text_(std::move(text)) {
    if (text_.starts_with("\xEF\xBB\xBF")) pos_ = 3;
  }

  bool done() const { return pos_ >= text_.size(); }
  std::size_t line() const { return line_; }

  CsvRow next() {
    CsvRow row;
    std::string field;
    bool quoted = false;
    const std::size_t start_line = line_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (quoted) {
        if (c == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
            continue;
          }
          quoted = false;
          ++pos_;
          continue;
        }
        if (c == '\n') ++line_;
        field.push_back(c);
        ++pos_;
        continue;
      }
      if (c == '"') {
        quoted = true;
        ++pos_;
      } else if (c == ',') {
        row.push_back(std::move(field));
        field.clear();
        ++pos_;
      } else if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') {
        pos_ += 2;
        ++line_;
        row.push_back(std::move(field));
        return row;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
        row.push_back(std::move(field));
        return row;
      } else {
        field.push_back(c);
        ++pos_;
      }
    }
    if (quoted) {
      throw DataError("unterminated quoted field starting on line " +
                      std::to_string(start_line));
    }
    row.push_back(std::move(field));
    return row;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

bool is_blank_record(const CsvRow& row) {
  return row.size() == 1 && row.front().empty();
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  RecordParser parser(std::move(text));
  CsvTable table;
  if (parser.done()) throw DataError("CSV input is empty");
  table.header = parser.next();
  while (!parser.done()) {
    const std::size_t line = parser.line();
    CsvRow row = parser.next();
    if (is_blank_record(row) && parser.done()) break;
    if (row.size() != table.header.size()) {
      throw DataError("line " + std::to_string(line) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(row.size()));
    }
    table.rows.push_back(std::move(row));
    table.lines.push_back(line);
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_csv(in);
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, const CsvRow& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << csv_field(row[i]);
  }
  out << '\n';
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

}  // namespace procaudit
