#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace phonon_forge {

struct Column {
  std::string name;
  std::string unit;  ///< "1" for dimensionless, "omega_m^-1" for times, "rad" for angles
};

using Cell = std::variant<std::int64_t, double, std::string>;

/// Rows of (parameter point -> measures). CSV output uses 12 significant
/// digits so identical inputs give byte-identical files.
class ResultTable {
 public:
  ResultTable(std::string name, std::vector<Column> schema);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Column>& schema() const noexcept { return schema_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  void add_row(std::vector<Cell> row);

  std::size_t column_index(const std::string& name) const;
  bool has_column(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;
  std::string text(std::size_t row, const std::string& column) const;

  /// Lexicographic sort on the leading `key_columns` columns.
  void sort_rows(std::size_t key_columns);

  /// Params snapshot, residuals, durations, code version.
  nlohmann::json meta = nlohmann::json::object();

  /// "name[unit]" header row preceded by a units comment line.
  void write_csv(const std::filesystem::path& path) const;
  std::string to_csv() const;
  void write_metadata(const std::filesystem::path& path) const;

  static ResultTable read_csv(const std::filesystem::path& path, std::string name);

 private:
  std::string name_;
  std::vector<Column> schema_;
  std::vector<std::vector<Cell>> rows_;
};

std::string format_number(double value);

}  // namespace phonon_forge
