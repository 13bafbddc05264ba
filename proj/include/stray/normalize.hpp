#pragma once

#include <algorithm>
#include <vector>

#include "stray/core.hpp"

namespace stray {

struct ColumnRange {
  double min;
  double max;
};

inline std::vector<ColumnRange> column_ranges(const DataMatrix& data) {
  std::vector<ColumnRange> ranges(data.cols(), {data(0, 0), data(0, 0)});
  for (std::size_t j = 0; j < data.cols(); ++j) {
    ranges[j] = {data(0, j), data(0, j)};
  }
  for (std::size_t i = 1; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      ranges[j].min = std::min(ranges[j].min, data(i, j));
      ranges[j].max = std::max(ranges[j].max, data(i, j));
    }
  }
  return ranges;
}

/// Min-max normalisation of every column onto [0, 1]. Constant columns carry
/// no distance information and map to 0.
inline DataMatrix unitize(const DataMatrix& data) {
  const auto ranges = column_ranges(data);
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  std::vector<double> out(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double width = ranges[j].max - ranges[j].min;
      out[i * d + j] = width > 0.0 ? (data(i, j) - ranges[j].min) / width : 0.0;
    }
  }
  return DataMatrix(n, d, std::move(out));
}

}  // namespace stray
