#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dipsurf {

using Cell = std::variant<double, long long, std::string>;

struct Column {
  std::string name;
  std::string unit;  // empty for dimensionless or labels
};

/// Row-major table with `#` metadata lines. Doubles are written with 17
/// significant digits; non-finite values as nan / inf / -inf.
class ResultTable {
 public:
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  explicit ResultTable(std::vector<Column> cols = {}) : columns(std::move(cols)) {}

  void add_meta(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }
  /// Throws std::invalid_argument if the row width differs from the column count.
  void add_row(std::vector<Cell> row);
  std::size_t column_index(const std::string& name) const;

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
  /// Writes to a file; throws IoError on failure.
  void save_csv(const std::string& path) const;
  void save_json(const std::string& path) const;

  static std::string format_number(double value);
};

}  // namespace dipsurf
