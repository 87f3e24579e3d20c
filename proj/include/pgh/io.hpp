#pragma once

// Flat-file interchange: dense matrices as CSV whose first line is
// "rows,cols", and a small numeric CSV table reader used for traces.

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgh/model_space.hpp"

namespace pgh {

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file contents; the message names the offending row/column.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s.empty()) throw parse_error(where + ": empty value");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || (errno == ERANGE && std::isinf(v))) {
    throw parse_error(where + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw io_error("write failed for " + path.string());
}

}  // namespace detail

inline Matrix parse_matrix_csv(const std::string& text, const std::string& name = "matrix") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw parse_error(name + ": missing 'rows,cols' header");
  auto head = detail::split_csv_line(line);
  if (head.size() != 2) throw parse_error(name + ": header must be 'rows,cols'");
  const double rows_d = detail::parse_double(head[0], name + " row 1 column 1");
  const double cols_d = detail::parse_double(head[1], name + " row 1 column 2");
  if (rows_d < 1 || cols_d < 1 || rows_d != std::floor(rows_d) || cols_d != std::floor(cols_d)) {
    throw parse_error(name + ": header dimensions must be positive integers");
  }
  const auto rows = static_cast<Index>(rows_d);
  const auto cols = static_cast<Index>(cols_d);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const std::string where = name + " row " + std::to_string(i + 2);
    if (!std::getline(in, line)) throw parse_error(where + ": missing data row");
    auto cells = detail::split_csv_line(line);
    if (static_cast<Index>(cells.size()) != cols) {
      throw parse_error(where + ": expected " + std::to_string(cols) + " columns, got " +
                        std::to_string(cells.size()));
    }
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = detail::parse_double(cells[static_cast<std::size_t>(j)],
                                     where + " column " + std::to_string(j + 1));
    }
  }
  return m;
}

inline Matrix read_matrix_csv(const std::filesystem::path& path) {
  return parse_matrix_csv(detail::read_text(path), path.string());
}

inline std::string format_matrix_csv(const Matrix& m) {
  std::ostringstream out;
  out.precision(17);
  out << m.rows() << ',' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
  return out.str();
}

inline void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  detail::write_text(path, format_matrix_csv(m));
}

/// Header plus numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return j;
    throw parse_error("missing column '" + name + "'");
  }
};

inline CsvTable parse_csv_table(const std::string& text, const std::string& name = "table") {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || detail::trim(line).empty()) {
    throw parse_error(name + ": missing header row");
  }
  for (auto& h : detail::split_csv_line(line)) table.header.push_back(detail::trim(h));
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != table.header.size()) {
      throw parse_error(name + " row " + std::to_string(row) + ": expected " +
                        std::to_string(table.header.size()) + " columns, got " +
                        std::to_string(cells.size()));
    }
    std::vector<double> values;
    values.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      values.push_back(detail::parse_double(
          cells[j], name + " row " + std::to_string(row) + " column " + table.header[j]));
    }
    table.rows.push_back(std::move(values));
  }
  return table;
}

inline CsvTable read_csv_table(const std::filesystem::path& path) {
  return parse_csv_table(detail::read_text(path), path.string());
}

}  // namespace pgh
