#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace meshcount::report {

using Cell = std::variant<std::monostate, long long, double, std::string>;
using Row = std::vector<Cell>;

struct RunReport {
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<Row> rows;
  // Empty when the command has no summary row.
  Row summary;
  // Extra diagnostics, JSON twin only.
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

// Summary row labelled "mean": the first column holds the label, columns in
// `skip` stay empty, columns in `absolute` average |v|, the rest average v
// over the rows where they are numeric.
Row mean_summary(const RunReport& r, const std::set<std::string>& skip, const std::set<std::string>& absolute);

std::string to_csv(const RunReport& r);
std::string to_json(const RunReport& r);

// `out` names the CSV; the JSON twin replaces a trailing ".csv" with ".json"
// or appends ".json".
std::string json_twin_path(const std::string& out);
void write(const RunReport& r, const std::string& out);

}  // namespace meshcount::report
