#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace qng {

inline constexpr const char* kToolVersion = "qng 1.0.0";

struct ResultTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Ordered key/value pairs written ahead of the data.
  std::vector<std::pair<std::string, std::string>> metadata;

  /// Throws std::logic_error on a row of the wrong width.
  void add_row(std::vector<double> row);
};

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(const std::string& text);

/// Shortest decimal text that reads back to the same double; "nan"/"inf" for
/// non-finite values.
std::string format_number(double v);

/// '#'-prefixed metadata lines, a header row, then comma-separated rows.
void write_csv(std::ostream& out, const ResultTable& table);
/// {"name":..., "metadata": {...}, "columns": [...], "data": {column: [...]}}.
/// Non-finite values are written as null.
void write_json(std::ostream& out, const ResultTable& table);

/// Writes tables[0] to `path`; further tables go next to it as
/// <stem>.<table name><ext>. An empty path writes everything to `out`.
void write_tables(const std::vector<ResultTable>& tables, OutputFormat format,
                  const std::filesystem::path& path, std::ostream& out);

}  // namespace qng
