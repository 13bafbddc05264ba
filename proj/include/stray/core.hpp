#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stray {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or configuration value outside its admissible range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed input data: non-finite cells, ragged rows, unparseable text.
class DataError : public Error {
 public:
  using Error::Error;
};

/// The neighbourhood size is not smaller than the number of observations.
class TooFewObservations : public Error {
 public:
  using Error::Error;
};

/// Not enough scores to fit the tail model used by the threshold search.
class SampleTooSmall : public Error {
 public:
  using Error::Error;
};

/// Dense row-major n x d matrix of finite reals. Rows are observations,
/// columns are attributes. Construction validates every invariant, so any
/// DataMatrix in hand is non-empty, rectangular and finite.
class DataMatrix {
 public:
  DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows_ == 0 || cols_ == 0) {
      throw DataError("data matrix must have at least one row and one column");
    }
    if (values_.size() != rows_ * cols_) {
      throw DataError("data matrix storage does not match " +
                      std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw DataError("non-finite value at row " + std::to_string(i / cols_) +
                        ", column " + std::to_string(i % cols_));
      }
    }
  }

  static DataMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) {
      throw DataError("data matrix must have at least one row and one column");
    }
    const std::size_t cols = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) {
        throw DataError("ragged input: row " + std::to_string(i) + " has " +
                        std::to_string(rows[i].size()) + " columns, expected " +
                        std::to_string(cols));
      }
      values.insert(values.end(), rows[i].begin(), rows[i].end());
    }
    return DataMatrix(rows.size(), cols, std::move(values));
  }

  /// Single-attribute data as an n x 1 matrix.
  static DataMatrix column(std::span<const double> values) {
    return DataMatrix(values.size(), 1, {values.begin(), values.end()});
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return values_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * cols_, cols_};
  }

  std::span<const double> values() const noexcept { return values_; }

  /// New matrix holding the given rows, in the given order.
  DataMatrix select_rows(std::span<const std::size_t> ids) const {
    std::vector<double> out;
    out.reserve(ids.size() * cols_);
    for (std::size_t id : ids) {
      if (id >= rows_) throw std::out_of_range("row id out of range");
      auto r = row(id);
      out.insert(out.end(), r.begin(), r.end());
    }
    return DataMatrix(ids.size(), cols_, std::move(out));
  }

  friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

enum class SearchMethod { brute, kdtree };
enum class Normalization { unitize, none };

/// How the gap sequence of a k-NN distance profile starts.
///  from_zero:   gaps d1 - 0, d2 - d1, ..., dk - d(k-1)  (the default)
///  consecutive: gaps d2 - d1, ..., dk - d(k-1) only; score is d at the upper
///               end of the widest gap, and d1 when k = 1
enum class GapRule { from_zero, consecutive };

inline const char* to_string(SearchMethod m) {
  return m == SearchMethod::brute ? "brute" : "kdtree";
}

struct StrayConfig {
  std::size_t k = 10;
  double alpha = 0.01;
  SearchMethod search_method = SearchMethod::brute;
  Normalization normalize = Normalization::unitize;
  double start_proportion = 0.5;
  std::size_t tail_count = 50;
  /// kd-tree approximation factor; 0 means exact search.
  double eps = 0.0;
  GapRule gap_rule = GapRule::from_zero;

  /// Checks the data-independent invariants. Throws InvalidArgument.
  void validate() const {
    if (k < 1) throw InvalidArgument("k must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw InvalidArgument("alpha must lie in (0, 1)");
    }
    if (!(start_proportion > 0.0 && start_proportion < 1.0)) {
      throw InvalidArgument("start proportion p must lie in (0, 1)");
    }
    if (tail_count < 2) throw InvalidArgument("tail count tn must be at least 2");
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
      throw InvalidArgument("eps must be finite and non-negative");
    }
  }
};

/// Per-row outcome of a detection run.
struct AnomalyReport {
  std::vector<double> scores;
  std::vector<bool> flags;
  /// 1-based position in the k-NN profile where the widest gap ends.
  std::vector<std::size_t> gap_index;
  /// Scores strictly above this value are anomalous; empty when the search
  /// found no exceedance.
  std::optional<double> threshold;

  std::vector<std::size_t> flagged_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (flags[i]) out.push_back(i);
    }
    return out;
  }

  std::size_t flagged_count() const {
    std::size_t c = 0;
    for (bool f : flags) c += f ? 1 : 0;
    return c;
  }

  friend bool operator==(const AnomalyReport&, const AnomalyReport&) = default;
};

}  // namespace stray
