#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "stray/core.hpp"

namespace stray {

/// Squared Euclidean distance. Every search path in the library goes through
/// this one function so that brute force and the kd-tree produce bit-equal
/// distances. The result never falls below any single squared coordinate
/// difference, which the tree relies on when pruning.
inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const std::size_t d = a.size();
  std::size_t j = 0;
  for (; j + 4 <= d; j += 4) {
    const double t0 = a[j] - b[j];
    const double t1 = a[j + 1] - b[j + 1];
    const double t2 = a[j + 2] - b[j + 2];
    const double t3 = a[j + 3] - b[j + 3];
    s0 += t0 * t0;
    s1 += t1 * t1;
    s2 += t2 * t2;
    s3 += t3 * t3;
  }
  for (; j < d; ++j) {
    const double t = a[j] - b[j];
    s0 += t * t;
  }
  return (s0 + s1) + (s2 + s3);
}

/// Per-row ascending k-NN distances and neighbour ids, self excluded.
class KnnResult {
 public:
  KnnResult(std::size_t n, std::size_t k)
      : n_(n), k_(k), distances_(n * k), indices_(n * k) {}

  std::size_t rows() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }

  double distance(std::size_t i, std::size_t j) const noexcept {
    return distances_[i * k_ + j];
  }
  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    return indices_[i * k_ + j];
  }
  std::span<const double> distances(std::size_t i) const noexcept {
    return {distances_.data() + i * k_, k_};
  }
  std::span<const std::size_t> indices(std::size_t i) const noexcept {
    return {indices_.data() + i * k_, k_};
  }
  std::span<double> distances(std::size_t i) noexcept {
    return {distances_.data() + i * k_, k_};
  }
  std::span<std::size_t> indices(std::size_t i) noexcept {
    return {indices_.data() + i * k_, k_};
  }

  friend bool operator==(const KnnResult&, const KnnResult&) = default;

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<double> distances_;
  std::vector<std::size_t> indices_;
};

namespace detail {

/// Bounded candidate set keeping the k smallest (squared distance, row id)
/// pairs. Ordering is lexicographic, so equal distances resolve to the
/// smaller row id.
class KBest {
 public:
  using Entry = std::pair<double, std::size_t>;

  explicit KBest(std::size_t k) : k_(k) { heap_.reserve(k); }

  bool full() const noexcept { return heap_.size() == k_; }

  /// Largest retained squared distance, or +inf while the set is not full.
  double worst() const noexcept {
    return full() ? heap_.front().first
                  : std::numeric_limits<double>::infinity();
  }

  void offer(double sq, std::size_t id) {
    if (!full()) {
      heap_.emplace_back(sq, id);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (Entry{sq, id} < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = {sq, id};
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  std::vector<Entry> sorted() const {
    auto out = heap_;
    std::sort(out.begin(), out.end());
    return out;
  }

  void clear() noexcept { heap_.clear(); }

 private:
  std::size_t k_;
  std::vector<Entry> heap_;
};

inline void check_k(const DataMatrix& data, std::size_t k) {
  if (k < 1) throw InvalidArgument("k must be at least 1");
  if (k >= data.rows()) {
    throw TooFewObservations("too few observations for k: k = " +
                             std::to_string(k) + " needs more than " +
                             std::to_string(k) + " rows, got " +
                             std::to_string(data.rows()));
  }
}

inline void write_row(KnnResult& out, std::size_t i, const KBest& best) {
  const auto entries = best.sorted();
  auto dist = out.distances(i);
  auto idx = out.indices(i);
  for (std::size_t j = 0; j < entries.size(); ++j) {
    dist[j] = std::sqrt(entries[j].first);
    idx[j] = entries[j].second;
  }
}

}  // namespace detail

/// Exact k-NN by scanning every pair once. Each pairwise distance feeds the
/// candidate sets of both endpoints.
inline KnnResult knn_exact(const DataMatrix& data, std::size_t k) {
  detail::check_k(data, k);
  const std::size_t n = data.rows();
  std::vector<detail::KBest> best(n, detail::KBest(k));
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = data.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sq = squared_distance(xi, data.row(j));
      best[i].offer(sq, j);
      best[j].offer(sq, i);
    }
  }
  KnnResult out(n, k);
  for (std::size_t i = 0; i < n; ++i) detail::write_row(out, i, best[i]);
  return out;
}

/// Balanced kd-tree. Each internal node splits at the median of the
/// dimension with greatest spread; leaves hold at most `leaf_capacity`
/// points unless all their points coincide. The tree keeps its own copy of
/// the points, reordered so each leaf is contiguous in memory.
class KdTree {
 public:
  static constexpr std::size_t kDefaultLeafCapacity = 16;
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  struct Neighbor {
    double distance;
    std::size_t row;
  };

  explicit KdTree(const DataMatrix& data,
                  std::size_t leaf_capacity = kDefaultLeafCapacity)
      : dims_(data.cols()), leaf_capacity_(std::max<std::size_t>(1, leaf_capacity)) {
    const std::size_t n = data.rows();
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
    nodes_.reserve(2 * (n / leaf_capacity_ + 1));
    build(data, 0, n);
    points_.resize(n * dims_);
    for (std::size_t p = 0; p < n; ++p) {
      auto r = data.row(order_[p]);
      std::copy(r.begin(), r.end(), points_.begin() + static_cast<std::ptrdiff_t>(p * dims_));
    }
  }

  std::size_t size() const noexcept { return order_.size(); }
  std::size_t dims() const noexcept { return dims_; }
  std::size_t leaf_capacity() const noexcept { return leaf_capacity_; }

  /// Row ids held by each leaf, in tree order.
  std::vector<std::vector<std::size_t>> leaves() const {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& node : nodes_) {
      if (node.is_leaf()) {
        out.emplace_back(order_.begin() + static_cast<std::ptrdiff_t>(node.begin),
                         order_.begin() + static_cast<std::ptrdiff_t>(node.end));
      }
    }
    return out;
  }

  /// k nearest points to `query`, ascending, ties to the smaller row id.
  /// `exclude` removes one row id from consideration. With eps > 0 each
  /// returned distance is at most (1 + eps) times the true one at that rank.
  std::vector<Neighbor> query(std::span<const double> query, std::size_t k,
                              double eps = 0.0,
                              std::size_t exclude = npos) const {
    detail::KBest best(k);
    search(query, eps, exclude, best);
    std::vector<Neighbor> out;
    for (const auto& [sq, row] : best.sorted()) {
      out.push_back({std::sqrt(sq), row});
    }
    return out;
  }

  void search(std::span<const double> query, double eps, std::size_t exclude,
              detail::KBest& best) const {
    if (query.size() != dims_) {
      throw InvalidArgument("query dimension does not match the index");
    }
    if (!(eps >= 0.0)) throw InvalidArgument("eps must be non-negative");
    // Exact mode keeps a tiny relative slack so that floating-point error in
    // the incremental cell bound never prunes a cell holding an equal-distance
    // candidate with a smaller row id.
    const double prune_scale = eps > 0.0 ? (1.0 + eps) * (1.0 + eps) : 1.0 - 1e-9;
    std::vector<double> offsets(dims_, 0.0);
    descend(0, query, 0.0, offsets, prune_scale, exclude, best);
  }

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::int32_t split_dim = -1;
    double split_value = 0.0;
    bool is_leaf() const noexcept { return split_dim < 0; }
  };

  std::uint32_t build(const DataMatrix& data, std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({begin, end, 0, 0, -1, 0.0});
    const std::size_t count = end - begin;
    if (count <= leaf_capacity_) return id;

    std::size_t best_dim = 0;
    double best_spread = -1.0;
    for (std::size_t j = 0; j < dims_; ++j) {
      double lo = data(order_[begin], j);
      double hi = lo;
      for (std::size_t p = begin + 1; p < end; ++p) {
        const double v = data(order_[p], j);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_dim = j;
      }
    }
    if (best_spread <= 0.0) return id;

    const std::size_t mid = begin + count / 2;
    const auto first = order_.begin() + static_cast<std::ptrdiff_t>(begin);
    std::nth_element(first, order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) {
                       const double va = data(a, best_dim);
                       const double vb = data(b, best_dim);
                       return va < vb || (va == vb && a < b);
                     });
    const double split = data(order_[mid], best_dim);
    const auto left = build(data, begin, mid);
    const auto right = build(data, mid, end);
    Node& node = nodes_[id];
    node.split_dim = static_cast<std::int32_t>(best_dim);
    node.split_value = split;
    node.left = left;
    node.right = right;
    return id;
  }

  // `cell_sq` is a lower bound on the squared distance from the query to any
  // point below `node_id`, built from per-dimension offsets to the cell.
  void descend(std::uint32_t node_id, std::span<const double> query, double cell_sq,
               std::vector<double>& offsets, double prune_scale,
               std::size_t exclude, detail::KBest& best) const {
    const Node& node = nodes_[node_id];
    if (node.is_leaf()) {
      for (std::size_t p = node.begin; p < node.end; ++p) {
        const std::size_t row = order_[p];
        if (row == exclude) continue;
        const std::span<const double> point(points_.data() + p * dims_, dims_);
        best.offer(squared_distance(query, point), row);
      }
      return;
    }
    const auto dim = static_cast<std::size_t>(node.split_dim);
    const double diff = query[dim] - node.split_value;
    const std::uint32_t near = diff < 0.0 ? node.left : node.right;
    const std::uint32_t far = diff < 0.0 ? node.right : node.left;
    descend(near, query, cell_sq, offsets, prune_scale, exclude, best);

    const double old = offsets[dim];
    const double far_sq = cell_sq - old * old + diff * diff;
    if (far_sq * prune_scale <= best.worst()) {
      offsets[dim] = diff;
      descend(far, query, far_sq, offsets, prune_scale, exclude, best);
      offsets[dim] = old;
    }
  }

  std::size_t dims_;
  std::size_t leaf_capacity_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::vector<double> points_;
};

using SpatialIndex = KdTree;

inline KdTree build_index(const DataMatrix& data,
                          std::size_t leaf_capacity = KdTree::kDefaultLeafCapacity) {
  return KdTree(data, leaf_capacity);
}

/// k-NN through a kd-tree. With eps = 0 the output equals knn_exact exactly.
inline KnnResult knn_kdtree(const DataMatrix& data, std::size_t k, double eps = 0.0) {
  detail::check_k(data, k);
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw InvalidArgument("eps must be finite and non-negative");
  }
  const KdTree tree(data);
  const std::size_t n = data.rows();
  KnnResult out(n, k);
  detail::KBest best(k);
  for (std::size_t i = 0; i < n; ++i) {
    best.clear();
    tree.search(data.row(i), eps, i, best);
    detail::write_row(out, i, best);
  }
  return out;
}

}  // namespace stray
