#include "sedlab/report_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sedlab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf.data(), res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> columns) : n_columns_(columns.size()) {
  if (columns.empty()) throw std::invalid_argument("CsvTable needs at least one column");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) text_ += ',';
    text_ += columns[i];
  }
  text_ += '\n';
}

void CsvTable::add_row(std::span<const double> values) {
  if (values.size() != n_columns_) throw std::invalid_argument("CsvTable: row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_double(values[i]);
  }
  text_ += '\n';
  ++rows_;
}

void CsvTable::add_row(std::initializer_list<double> values) {
  add_row(std::span<const double>(values.begin(), values.size()));
}

std::string field_csv(const GridField& field) {
  CsvTable t({"x", "value", "mask"});
  for (std::size_t i = 0; i < field.grid.size(); ++i) {
    t.add_row({field.grid.x(i), field.values[i], field.valid(i) ? 1.0 : 0.0});
  }
  return t.text();
}

std::string fields_csv(std::span<const std::string> names, std::span<const GridField* const> fields) {
  if (names.size() != fields.size() || fields.empty())
    throw std::invalid_argument("fields_csv: names and fields differ");
  std::vector<std::string> cols{"x"};
  for (const auto& n : names) {
    cols.push_back(n);
    cols.push_back(n + "_mask");
  }
  CsvTable t(cols);
  const Grid1D& g = fields[0]->grid;
  for (const auto* f : fields) require_same_grid(*fields[0], *f, "fields_csv");
  std::vector<double> row(cols.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    row[0] = g.x(i);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      row[1 + 2 * c] = fields[c]->values[i];
      row[2 + 2 * c] = fields[c]->valid(i) ? 1.0 : 0.0;
    }
    t.add_row(row);
  }
  return t.text();
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

}  // namespace sedlab
