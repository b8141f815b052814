#include "core/text.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "core/error.hpp"

namespace meshcount::text {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_number(long long v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

long CsvTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < header.fields.size(); ++i)
    if (header.fields[i] == name) return static_cast<long>(i);
  return -1;
}

std::size_t CsvTable::require(std::string_view name) const {
  const long i = find(name);
  if (i < 0) parse_error(source, header.line, 1, "missing column '" + std::string(name) + "'");
  return static_cast<std::size_t>(i);
}

void parse_error(const std::string& source, std::size_t line, std::size_t column, const std::string& msg) {
  fail(ErrorCode::ParseError, source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg);
}

CsvTable parse_csv(std::string_view data, const std::string& source, bool has_header) {
  CsvTable t;
  t.source = source;
  std::size_t pos = 0, line = 0;
  bool have_header = !has_header;
  while (pos < data.size()) {
    ++line;
    std::size_t end = data.find('\n', pos);
    if (end == std::string_view::npos) end = data.size();
    std::string_view text = data.substr(pos, end - pos);
    pos = end + 1;
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.find_first_not_of(" \t") == std::string_view::npos) continue;
    CsvRow row;
    row.line = line;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      std::string_view f = text.substr(start, comma == std::string_view::npos ? text.size() - start : comma - start);
      std::size_t lead = 0;
      while (lead < f.size() && (f[lead] == ' ' || f[lead] == '\t')) ++lead;
      std::size_t trail = f.size();
      while (trail > lead && (f[trail - 1] == ' ' || f[trail - 1] == '\t')) --trail;
      row.fields.emplace_back(f.substr(lead, trail - lead));
      row.columns.push_back(start + lead + 1);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!have_header) {
      t.header = std::move(row);
      have_header = true;
    } else {
      t.rows.push_back(std::move(row));
    }
  }
  if (!have_header) parse_error(source, line + 1, 1, "missing header");
  return t;
}

double parse_double(const CsvTable& t, const CsvRow& row, std::size_t field) {
  if (field >= row.fields.size())
    parse_error(t.source, row.line, row.columns.empty() ? 1 : row.columns.back(), "missing field");
  const std::string& s = row.fields[field];
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    parse_error(t.source, row.line, row.columns[field], "expected a number, got '" + s + "'");
  return v;
}

long long parse_int(const CsvTable& t, const CsvRow& row, std::size_t field) {
  if (field >= row.fields.size())
    parse_error(t.source, row.line, row.columns.empty() ? 1 : row.columns.back(), "missing field");
  const std::string& s = row.fields[field];
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    parse_error(t.source, row.line, row.columns[field], "expected an integer, got '" + s + "'");
  return v;
}

void require_width(const CsvTable& t, std::size_t n) {
  for (const auto& row : t.rows)
    if (row.fields.size() != n)
      parse_error(t.source, row.line, row.fields.size() > n ? row.columns[n] : 1,
                  "expected " + std::to_string(n) + " fields, got " + std::to_string(row.fields.size()));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for '" + path + "'");
}

std::string directory_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string() : path.substr(0, slash + 1);
}

}  // namespace meshcount::text
