#include "core/report.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/text.hpp"

namespace meshcount::report {

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return text::format_number(*i);
  if (const auto* d = std::get_if<double>(&c)) return text::format_number(*d);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return "";
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return text::format_number(*d);
    return *d;
  }
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out += ',';
    out += fields[k];
  }
  out += '\n';
}

}  // namespace

Row mean_summary(const RunReport& r, const std::set<std::string>& skip, const std::set<std::string>& absolute) {
  Row s(r.columns.size());
  if (s.empty()) return s;
  s[0] = std::string("mean");
  for (std::size_t c = 1; c < r.columns.size(); ++c) {
    if (skip.count(r.columns[c])) continue;
    const bool abs = absolute.count(r.columns[c]) > 0;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : r.rows) {
      double v;
      if (const auto* i = std::get_if<long long>(&row[c]))
        v = static_cast<double>(*i);
      else if (const auto* d = std::get_if<double>(&row[c]))
        v = *d;
      else
        continue;
      sum += abs ? std::fabs(v) : v;
      ++n;
    }
    if (n > 0) s[c] = sum / static_cast<double>(n);
  }
  return s;
}

std::string to_csv(const RunReport& r) {
  std::string out;
  append_line(out, r.columns);
  auto emit = [&](const Row& row) {
    if (row.size() != r.columns.size()) fail(ErrorCode::ShapeMismatch, "report row width differs from header");
    std::vector<std::string> f;
    for (const auto& c : row) f.push_back(cell_text(c));
    append_line(out, f);
  };
  for (const auto& row : r.rows) emit(row);
  if (!r.summary.empty()) emit(r.summary);
  return out;
}

std::string to_json(const RunReport& r) {
  nlohmann::ordered_json doc;
  doc["command"] = r.command;
  doc["seed"] = r.seed;
  doc["config"] = r.config;
  doc["columns"] = r.columns;
  auto as_object = [&](const Row& row) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < r.columns.size(); ++c) o[r.columns[c]] = cell_json(row.at(c));
    return o;
  };
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) doc["rows"].push_back(as_object(row));
  doc["summary"] = r.summary.empty() ? nlohmann::ordered_json(nullptr) : as_object(r.summary);
  doc["details"] = r.details;
  return doc.dump(1) + "\n";
}

std::string json_twin_path(const std::string& out) {
  if (out.size() > 4 && out.compare(out.size() - 4, 4, ".csv") == 0) return out.substr(0, out.size() - 4) + ".json";
  return out + ".json";
}

void write(const RunReport& r, const std::string& out) {
  text::write_file(out, to_csv(r));
  text::write_file(json_twin_path(out), to_json(r));
}

}  // namespace meshcount::report
