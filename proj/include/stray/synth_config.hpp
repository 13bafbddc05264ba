#pragma once

#include <array>
#include <cstddef>

// Geometry of the synthetic scenarios. Coordinates are in raw data units
// unless a name says otherwise; "radius units" are multiples of the Leader
// default radius in unitized space for the scenario's n and d = 2.
namespace stray::synth_config {

struct Point2 {
  double x;
  double y;
};

struct Gaussian2 {
  Point2 centre;
  double sd;
  std::size_t count;
};

// (a) one Gaussian cluster, one global outlier at the upper right.
inline constexpr Gaussian2 a_cluster{{0.0, 0.0}, 1.0, 1000};
inline constexpr Point2 a_outlier{6.0, 6.0};

// (b) two typical classes side by side, three-point micro cluster above them.
inline constexpr Gaussian2 b_left{{-3.0, 0.0}, 0.8, 500};
inline constexpr Gaussian2 b_right{{3.0, 0.0}, 0.8, 500};
inline constexpr Point2 b_micro_centre{0.0, 6.0};
inline constexpr double b_micro_sd = 0.15;
inline constexpr std::size_t b_micro_count = 3;

// (c) two typical classes, five-point micro cluster in the upper right
// corner. The five points are laid out in radius units so that Leader splits
// them into three balls (2 + 2 + 1) whose exemplars sit 1.2 to 1.25 radii
// apart: close enough to look like ordinary exemplar spacing.
inline constexpr Gaussian2 c_lower{{0.0, 0.0}, 1.0, 500};
inline constexpr Gaussian2 c_upper{{0.0, 5.0}, 1.0, 500};
inline constexpr Point2 c_micro_anchor{9.0, 9.0};  // max x and max y of the micro cluster
inline constexpr std::array<Point2, 5> c_micro_template{{
    {0.0, 0.0}, {0.0, 0.25}, {1.2, 0.0}, {1.2, 0.25}, {0.6, 1.1}}};
inline constexpr double c_micro_jitter = 0.01;  // radius units

// (d) two typical classes on a diagonal, two adjacent inliers between them,
// about 1.3 Leader radii apart so each gets its own ball.
inline constexpr Gaussian2 d_lower{{0.0, 0.0}, 0.7, 500};
inline constexpr Gaussian2 d_upper{{10.0, 10.0}, 0.7, 500};
inline constexpr std::array<Point2, 2> d_inliers{{{4.75, 4.75}, {5.25, 5.25}}};

// (e) diffuse class upper left, very compact class lower right (one Leader
// ball), one inlier between them. 2,001 points.
inline constexpr Gaussian2 e_diffuse{{0.0, 10.0}, 1.0, 1000};
inline constexpr Gaussian2 e_compact{{10.0, 0.0}, 0.04, 1000};
inline constexpr Point2 e_inlier{5.0, 5.0};

// (f) compact class of 14 tight blobs on a lattice 1.5 radii apart, so
// Leader forms exactly 14 balls; one outlier in the lower right. 1,001 points.
inline constexpr std::size_t f_class_count = 1000;
inline constexpr Point2 f_lattice_origin{0.1, 0.9};
inline constexpr std::size_t f_lattice_columns = 4;
inline constexpr std::size_t f_blob_count = 14;
inline constexpr double f_lattice_spacing = 1.5;  // radius units
inline constexpr double f_blob_sd = 0.03;         // radius units
inline constexpr Point2 f_outlier{1.0, 0.0};

// Two-dimensional demo data: a typical cluster placed so the anomaly at
// (15, 16.5) sits near 14.8 units from its nearest typical neighbour.
inline constexpr Gaussian2 fig3_typical{{2.7, 3.6}, 1.0, 499};
inline constexpr Point2 fig3_anomaly{15.0, 16.5};
inline constexpr double fig3_micro_side = 0.7;
inline constexpr double fig3_micro_jitter = 0.02;

}  // namespace stray::synth_config
