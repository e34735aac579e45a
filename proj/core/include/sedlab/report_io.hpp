#pragma once

#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sedlab/grid_field.hpp"

namespace sedlab {

/// Shortest text that reads back to the same double ("nan", "inf" for the
/// non-finite values).
std::string format_double(double v);

/// Builds CSV text in memory; values are written with format_double.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(std::span<const double> values);
  void add_row(std::initializer_list<double> values);

  std::size_t rows() const { return rows_; }
  const std::string& text() const { return text_; }

 private:
  std::size_t n_columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

/// Columns x, value, mask.
std::string field_csv(const GridField& field);

/// Several fields on one grid as x, <name>, <name>_mask, ...
std::string fields_csv(std::span<const std::string> names, std::span<const GridField* const> fields);

void write_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);

}  // namespace sedlab
