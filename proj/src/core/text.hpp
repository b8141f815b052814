#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace meshcount::text {

// Shortest representation that parses back to the same double.
std::string format_number(double v);
std::string format_number(long long v);

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
  // 1-based column of the first character of each field.
  std::vector<std::size_t> columns;
};

struct CsvTable {
  std::string source;
  CsvRow header;
  std::vector<CsvRow> rows;

  // Index of a header column or -1.
  long find(std::string_view name) const;
  std::size_t require(std::string_view name) const;
};

// Comma separated, no quoting, blank lines skipped, CR before LF tolerated.
CsvTable parse_csv(std::string_view data, const std::string& source, bool has_header = true);

[[noreturn]] void parse_error(const std::string& source, std::size_t line, std::size_t column, const std::string& msg);

double parse_double(const CsvTable& t, const CsvRow& row, std::size_t field);
long long parse_int(const CsvTable& t, const CsvRow& row, std::size_t field);

// Exactly `n` fields on every row.
void require_width(const CsvTable& t, std::size_t n);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);

// Directory part of a path including the trailing separator, or "".
std::string directory_of(const std::string& path);

}  // namespace meshcount::text
