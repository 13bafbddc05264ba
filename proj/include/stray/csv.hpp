#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "stray/core.hpp"

namespace stray::csv {

/// Parse failure with the 1-based line and column of the offending cell.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : DataError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                  what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct Table {
  std::optional<std::vector<std::string>> header;
  DataMatrix data;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    cells.push_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

inline std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

}  // namespace detail

/// Parses one numeric row. Throws ParseError on a non-numeric or
/// non-finite cell.
inline std::vector<double> parse_row(std::string_view line, std::size_t line_no) {
  std::vector<double> row;
  const auto cells = detail::split(line);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto v = detail::parse_number(cells[c]);
    if (!v) {
      throw ParseError(line_no, c + 1, "non-numeric cell '" + std::string(cells[c]) + "'");
    }
    if (!std::isfinite(*v)) throw ParseError(line_no, c + 1, "non-finite value");
    row.push_back(*v);
  }
  return row;
}

inline bool is_blank(std::string_view line) { return detail::trim(line).empty(); }

/// Reads a comma-separated numeric table. A first row containing any
/// non-numeric cell is taken as the header. Blank lines are skipped.
inline Table read(std::istream& in) {
  std::optional<std::vector<std::string>> header;
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    if (first) {
      first = false;
      const auto cells = detail::split(line);
      bool numeric = true;
      for (auto cell : cells) numeric = numeric && detail::parse_number(cell).has_value();
      if (!numeric) {
        header.emplace(cells.begin(), cells.end());
        cols = cells.size();
        continue;
      }
    }
    auto row = parse_row(line, line_no);
    if (cols == 0) cols = row.size();
    if (row.size() != cols) {
      throw ParseError(line_no, std::min(row.size(), cols) + 1,
                       "ragged row: expected " + std::to_string(cols) + " columns, got " +
                           std::to_string(row.size()));
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw DataError("input contains no data rows");
  return {std::move(header), DataMatrix(rows, cols, std::move(values))};
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void write(std::ostream& out, const DataMatrix& data,
                  const std::vector<std::string>& header = {}) {
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
  }
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      out << (j ? "," : "") << format_number(data(i, j));
    }
    out << '\n';
  }
}

}  // namespace stray::csv
