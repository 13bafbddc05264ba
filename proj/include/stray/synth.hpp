#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stray/baseline.hpp"
#include "stray/core.hpp"
#include "stray/detect.hpp"
#include "stray/rng.hpp"
#include "stray/synth_config.hpp"

namespace stray::synth {

enum class Scenario { a, b, c, d, e, f, fig3_single, fig3_micro };

inline const std::vector<std::string_view>& scenario_names() {
  static const std::vector<std::string_view> names{"a", "b", "c", "d", "e", "f",
                                                   "fig3_single", "fig3_micro"};
  return names;
}

inline Scenario parse_scenario(std::string_view name) {
  const auto& names = scenario_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Scenario>(i);
  }
  throw InvalidArgument("unknown scenario '" + std::string(name) + "'");
}

inline std::string_view to_string(Scenario s) {
  return scenario_names()[static_cast<std::size_t>(s)];
}

struct LabeledDataset {
  DataMatrix data;
  /// 0-based row ids of the planted anomalies, ascending.
  std::vector<std::size_t> planted_rows;
  std::string scenario_name;
  std::uint64_t seed = 0;

  std::vector<bool> is_planted() const {
    std::vector<bool> out(data.rows(), false);
    for (std::size_t r : planted_rows) out[r] = true;
    return out;
  }
};

namespace detail {

using synth_config::Gaussian2;
using synth_config::Point2;

class Builder {
 public:
  explicit Builder(std::uint64_t seed) : rng_(seed) {}

  void gaussian(const Gaussian2& g) {
    for (std::size_t i = 0; i < g.count; ++i) {
      const double x = rng_.normal(g.centre.x, g.sd);
      const double y = rng_.normal(g.centre.y, g.sd);
      add(x, y);
    }
  }

  void planted(double x, double y) {
    planted_.push_back(values_.size() / 2);
    add(x, y);
  }

  void add(double x, double y) {
    values_.push_back(x);
    values_.push_back(y);
  }

  double min_x() const { return extreme(0, false); }
  double min_y() const { return extreme(1, false); }

  Rng& rng() { return rng_; }

  LabeledDataset finish(Scenario s, std::uint64_t seed) {
    const std::size_t n = values_.size() / 2;
    return {DataMatrix(n, 2, std::move(values_)), std::move(planted_),
            std::string(to_string(s)), seed};
  }

 private:
  double extreme(std::size_t col, bool want_max) const {
    double v = values_[col];
    for (std::size_t i = col; i < values_.size(); i += 2) {
      v = want_max ? std::max(v, values_[i]) : std::min(v, values_[i]);
    }
    return v;
  }

  Rng rng_;
  std::vector<double> values_;
  std::vector<std::size_t> planted_;
};

}  // namespace detail

/// Seeded 2-D counterexample datasets. Typical points come first in row
/// order, planted anomalies last.
inline LabeledDataset scenario(Scenario name, std::uint64_t seed) {
  namespace cfg = synth_config;
  detail::Builder b(seed);
  switch (name) {
    case Scenario::a:
      b.gaussian(cfg::a_cluster);
      b.planted(cfg::a_outlier.x, cfg::a_outlier.y);
      break;
    case Scenario::b:
      b.gaussian(cfg::b_left);
      b.gaussian(cfg::b_right);
      for (std::size_t i = 0; i < cfg::b_micro_count; ++i) {
        const double x = b.rng().normal(cfg::b_micro_centre.x, cfg::b_micro_sd);
        const double y = b.rng().normal(cfg::b_micro_centre.y, cfg::b_micro_sd);
        b.planted(x, y);
      }
      break;
    case Scenario::c: {
      b.gaussian(cfg::c_lower);
      b.gaussian(cfg::c_upper);
      const std::size_t n = cfg::c_lower.count + cfg::c_upper.count + cfg::c_micro_template.size();
      const double r = baseline::default_radius(n, 2);
      // offsets are non-positive so the anchor stays the column maximum
      const double sx = r * (cfg::c_micro_anchor.x - b.min_x());
      const double sy = r * (cfg::c_micro_anchor.y - b.min_y());
      double top_x = 0.0;
      double top_y = 0.0;
      for (const auto& p : cfg::c_micro_template) {
        top_x = std::max(top_x, p.x);
        top_y = std::max(top_y, p.y);
      }
      for (const auto& p : cfg::c_micro_template) {
        const double jx = std::min(0.0, p.x - top_x + cfg::c_micro_jitter * b.rng().normal());
        const double jy = std::min(0.0, p.y - top_y + cfg::c_micro_jitter * b.rng().normal());
        b.planted(cfg::c_micro_anchor.x + jx * sx, cfg::c_micro_anchor.y + jy * sy);
      }
      break;
    }
    case Scenario::d:
      b.gaussian(cfg::d_lower);
      b.gaussian(cfg::d_upper);
      for (const auto& p : cfg::d_inliers) b.planted(p.x, p.y);
      break;
    case Scenario::e:
      b.gaussian(cfg::e_diffuse);
      b.gaussian(cfg::e_compact);
      b.planted(cfg::e_inlier.x, cfg::e_inlier.y);
      break;
    case Scenario::f: {
      const double r = baseline::default_radius(cfg::f_class_count + 1, 2);
      // the data span is close to 0.9 in both coordinates
      const double unit = 0.9 * r;
      const double step = cfg::f_lattice_spacing * unit;
      const double sd = cfg::f_blob_sd * unit;
      for (std::size_t i = 0; i < cfg::f_class_count; ++i) {
        const std::size_t blob = i % cfg::f_blob_count;
        const double cx = cfg::f_lattice_origin.x +
                          step * static_cast<double>(blob % cfg::f_lattice_columns);
        const double cy = cfg::f_lattice_origin.y -
                          step * static_cast<double>(blob / cfg::f_lattice_columns);
        const double x = b.rng().normal(cx, sd);
        const double y = b.rng().normal(cy, sd);
        b.add(x, y);
      }
      b.planted(cfg::f_outlier.x, cfg::f_outlier.y);
      break;
    }
    case Scenario::fig3_single:
      b.gaussian(cfg::fig3_typical);
      b.planted(cfg::fig3_anomaly.x, cfg::fig3_anomaly.y);
      break;
    case Scenario::fig3_micro: {
      auto typical = cfg::fig3_typical;
      typical.count -= 2;
      b.gaussian(typical);
      // equilateral triangle centred on the anomaly location
      const double h = cfg::fig3_micro_side / std::sqrt(3.0);
      const double pi = std::acos(-1.0);
      for (int v = 0; v < 3; ++v) {
        const double angle = pi / 2.0 + 2.0 * pi * v / 3.0;
        const double x = cfg::fig3_anomaly.x + h * std::cos(angle) +
                         cfg::fig3_micro_jitter * b.rng().normal();
        const double y = cfg::fig3_anomaly.y + h * std::sin(angle) +
                         cfg::fig3_micro_jitter * b.rng().normal();
        b.planted(x, y);
      }
      break;
    }
  }
  return b.finish(name, seed);
}

inline LabeledDataset scenario(std::string_view name, std::uint64_t seed) {
  return scenario(parse_scenario(name), seed);
}

/// n x d matrix of independent standard normal draws.
inline DataMatrix standard_normal(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> values(n * d);
  for (double& v : values) v = rng.normal();
  return DataMatrix(n, d, std::move(values));
}

enum class Method { stray_brute, stray_kdtree, hd_v1, hd_v2 };

inline const std::vector<std::string_view>& method_names() {
  static const std::vector<std::string_view> names{"stray_brute", "stray_kdtree", "hd_v1",
                                                   "hd_v2"};
  return names;
}

inline Method parse_method(std::string_view name) {
  const auto& names = method_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Method>(i);
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

inline std::string_view to_string(Method m) {
  return method_names()[static_cast<std::size_t>(m)];
}

/// Number of rows `method` flags in `data`. HDoutliers runs use the
/// reference (candidate-including) threshold.
inline std::size_t flagged_count(const DataMatrix& data, Method method, double alpha,
                                 std::size_t k) {
  switch (method) {
    case Method::stray_brute:
    case Method::stray_kdtree: {
      StrayConfig config;
      config.k = k;
      config.alpha = alpha;
      config.search_method =
          method == Method::stray_brute ? SearchMethod::brute : SearchMethod::kdtree;
      return detect(data, config).flagged_count();
    }
    case Method::hd_v1:
    case Method::hd_v2:
      return baseline::hdoutliers_detect(data, alpha, method == Method::hd_v2, true)
          .flagged_count();
  }
  throw InvalidArgument("invalid method");
}

struct FprEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t iterations = 0;
};

inline constexpr std::uint64_t kDefaultSeed = 20190812;

/// False-positive rate on anomaly-free standard-normal data: the flagged
/// fraction per dataset, averaged over `iters` datasets. Iteration i uses a
/// seed derived from (seed, i).
inline FprEstimate null_experiment(std::size_t n, std::size_t d, std::size_t iters, double alpha,
                                   std::size_t k, Method method,
                                   std::uint64_t seed = kDefaultSeed) {
  if (iters < 1) throw InvalidArgument("iters must be at least 1");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    const DataMatrix data = standard_normal(n, d, derive_seed(seed, it));
    const double rate =
        static_cast<double>(flagged_count(data, method, alpha, k)) / static_cast<double>(n);
    sum += rate;
    sum_sq += rate * rate;
  }
  const auto m = static_cast<double>(iters);
  FprEstimate out;
  out.iterations = iters;
  out.mean = sum / m;
  if (iters > 1) {
    const double var = std::max(0.0, (sum_sq - m * out.mean * out.mean) / (m - 1.0));
    out.std_error = std::sqrt(var / m);
  }
  return out;
}

struct TimingCell {
  std::size_t n = 0;
  std::size_t d = 0;
  Method method = Method::stray_brute;
  double seconds = 0.0;
};

/// Wall-clock time of one full detection run.
inline double time_method(const DataMatrix& data, Method method, double alpha = 0.05,
                          std::size_t k = 10) {
  const auto t0 = std::chrono::steady_clock::now();
  volatile std::size_t sink = flagged_count(data, method, alpha, k);
  (void)sink;
  const auto t1 = std::chrono::steady_clock::now();
  return std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9);
}

/// Median-of-`repeats` timings over the grid. Each (n, d) cell uses one
/// standard-normal dataset shared by all methods.
inline std::vector<TimingCell> timing_grid(const std::vector<std::size_t>& n_values,
                                           const std::vector<std::size_t>& d_values,
                                           const std::vector<Method>& methods,
                                           std::uint64_t seed = kDefaultSeed,
                                           std::size_t repeats = 3) {
  if (n_values.empty() || d_values.empty() || methods.empty()) {
    throw InvalidArgument("timing grid needs at least one n, one d and one method");
  }
  std::vector<TimingCell> out;
  for (std::size_t n : n_values) {
    for (std::size_t d : d_values) {
      const DataMatrix data = standard_normal(n, d, derive_seed(seed, n * 1315423911ULL + d));
      for (Method m : methods) {
        std::vector<double> times;
        for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
          times.push_back(time_method(data, m));
        }
        std::sort(times.begin(), times.end());
        out.push_back({n, d, m, times[times.size() / 2]});
      }
    }
  }
  return out;
}

}  // namespace stray::synth
