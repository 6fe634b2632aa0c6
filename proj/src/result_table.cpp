#include "dipsurf/result_table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dipsurf/scenario.hpp"

namespace dipsurf {

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("row has " + std::to_string(row.size()) + " cells, table has " +
                                std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return i;
  throw std::out_of_range("no column '" + name + "'");
}

std::string ResultTable::format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return ResultTable::format_number(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return csv_field(std::get<std::string>(c));
}

}  // namespace

void ResultTable::write_csv(std::ostream& out) const {
  for (const auto& [key, value] : metadata) {
    std::size_t start = 0;
    do {
      const auto end = value.find('\n', start);
      out << "# " << key << ": " << value.substr(start, end == std::string::npos ? end : end - start) << '\n';
      start = end == std::string::npos ? end : end + 1;
    } while (start != std::string::npos && start < value.size());
  }
  out << "# units:";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? ", " : " ") << columns[i].name << '=' << (columns[i].unit.empty() ? "1" : columns[i].unit);
  out << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_field(columns[i].name);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
}

void ResultTable::write_json(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : metadata) j["metadata"][key] = value;
  j["columns"] = nlohmann::ordered_json::array();
  for (const auto& c : columns) j["columns"].push_back({{"name", c.name}, {"unit", c.unit}});
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) r.push_back(*d);
        else r.push_back(nullptr);
      } else if (const auto* i = std::get_if<long long>(&c)) {
        r.push_back(*i);
      } else {
        r.push_back(std::get<std::string>(c));
      }
    }
    j["rows"].push_back(std::move(r));
  }
  out << j.dump(1) << '\n';
}

void ResultTable::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(out);
  if (!out.flush()) throw IoError("write to '" + path + "' failed");
}

void ResultTable::save_json(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_json(out);
  if (!out.flush()) throw IoError("write to '" + path + "' failed");
}

}  // namespace dipsurf
