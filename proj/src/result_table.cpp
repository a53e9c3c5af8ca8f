#include "qng/result_table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace qng {

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match the header");
  rows.push_back(std::move(row));
}

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format '" + text + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const ResultTable& table) {
  out << "# " << kToolVersion << '\n';
  out << "# table: " << table.name << '\n';
  for (const auto& [key, value] : table.metadata) out << "# " << key << ": " << value << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

void write_json(std::ostream& out, const ResultTable& table) {
  nlohmann::ordered_json j;
  j["tool"] = kToolVersion;
  j["name"] = table.name;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : table.metadata) meta[key] = value;
  j["metadata"] = meta;
  j["columns"] = table.columns;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    nlohmann::ordered_json column = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      if (std::isfinite(row[c])) {
        column.push_back(row[c]);
      } else {
        column.push_back(nullptr);
      }
    }
    data[table.columns[c]] = column;
  }
  j["data"] = data;
  out << j.dump(2) << '\n';
}

namespace {

void write_one(std::ostream& out, const ResultTable& table, OutputFormat format) {
  if (format == OutputFormat::csv) {
    write_csv(out, table);
  } else {
    write_json(out, table);
  }
}

}  // namespace

void write_tables(const std::vector<ResultTable>& tables, OutputFormat format,
                  const std::filesystem::path& path, std::ostream& out) {
  if (path.empty()) {
    for (std::size_t i = 0; i < tables.size(); ++i) {
      if (i) out << '\n';
      write_one(out, tables[i], format);
    }
    return;
  }
  for (std::size_t i = 0; i < tables.size(); ++i) {
    std::filesystem::path target = path;
    if (i > 0) {
      target = path.parent_path() /
               (path.stem().string() + "." + tables[i].name + path.extension().string());
    }
    std::ofstream file(target, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + target.string());
    write_one(file, tables[i], format);
  }
}

}  // namespace qng
