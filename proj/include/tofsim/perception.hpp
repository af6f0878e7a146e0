#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tofsim/config.hpp"
#include "tofsim/sensor.hpp"

namespace tofsim {

struct OccupancyFrame {
  std::array<std::array<bool, 8>, 8> occupied{};
  std::int64_t source_timestamp_ms = 0;
};

struct PixelCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
  friend auto operator<=>(const PixelCoord& a, const PixelCoord& b) {
    return std::pair{a.row, a.col} <=> std::pair{b.row, b.col};
  }
};

/// Connected cluster of occupied pixels treated as one obstacle.
struct ObjectGroup {
  int min_row = 0;
  int max_row = 0;
  int min_col = 0;
  int max_col = 0;
  int pixel_count = 0;
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  int min_distance_mm = 0;
  std::vector<PixelCoord> pixels;  // sorted row-major
};

/// Marks pixels that are valid and within the obstacle threshold.
inline OccupancyFrame threshold(const DepthFrame& frame, const PerceptionConfig& cfg) {
  OccupancyFrame out;
  out.source_timestamp_ms = frame.timestamp_ms;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      out.occupied[r][c] = frame.valid[r][c] && frame.distance_mm[r][c] <= cfg.occupancy_threshold_mm;
  return out;
}

struct GroupingStats {
  int visited_pixels = 0;  // DFS visits; at most 64 per frame
};

/// Clusters occupied pixels into connected components with an explicit-stack
/// depth-first search. Components below min_group_size are dropped; when more
/// than max_groups remain, the nearest ones win. Output is ordered by
/// ascending min distance, ties by (min_row, min_col), then pixel list.
inline std::vector<ObjectGroup> group(const OccupancyFrame& frame, const DepthFrame& depths,
                                      const PerceptionConfig& cfg,
                                      GroupingStats* stats = nullptr) {
  if (frame.source_timestamp_ms != depths.timestamp_ms)
    throw std::invalid_argument("group: occupancy and depth frames have different timestamps");

  static constexpr int kOffsets8[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                          {0, 1},   {1, -1}, {1, 0},  {1, 1}};
  static constexpr int kOffsets4[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
  const int n_offsets = cfg.connectivity == 4 ? 4 : 8;
  const auto* offsets = cfg.connectivity == 4 ? kOffsets4 : kOffsets8;

  bool visited[8][8] = {};
  std::vector<ObjectGroup> groups;
  std::vector<PixelCoord> stack;
  stack.reserve(64);

  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      if (!frame.occupied[r][c] || visited[r][c]) continue;
      ObjectGroup g;
      g.min_row = g.max_row = r;
      g.min_col = g.max_col = c;
      g.min_distance_mm = depths.distance_mm[r][c];
      visited[r][c] = true;
      stack.push_back({r, c});
      double sum_row = 0.0, sum_col = 0.0;
      while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        if (stats) ++stats->visited_pixels;
        g.pixels.push_back(p);
        sum_row += p.row;
        sum_col += p.col;
        g.min_row = std::min(g.min_row, p.row);
        g.max_row = std::max(g.max_row, p.row);
        g.min_col = std::min(g.min_col, p.col);
        g.max_col = std::max(g.max_col, p.col);
        g.min_distance_mm = std::min(g.min_distance_mm, depths.distance_mm[p.row][p.col]);
        for (int k = 0; k < n_offsets; ++k) {
          const int nr = p.row + offsets[k][0];
          const int nc = p.col + offsets[k][1];
          if (nr < 0 || nr >= 8 || nc < 0 || nc >= 8) continue;
          if (!frame.occupied[nr][nc] || visited[nr][nc]) continue;
          visited[nr][nc] = true;
          stack.push_back({nr, nc});
        }
      }
      if (static_cast<int>(g.pixels.size()) < cfg.min_group_size) continue;
      g.pixel_count = static_cast<int>(g.pixels.size());
      g.centroid_row = sum_row / g.pixel_count;
      g.centroid_col = sum_col / g.pixel_count;
      std::sort(g.pixels.begin(), g.pixels.end());
      groups.push_back(std::move(g));
    }
  }

  std::sort(groups.begin(), groups.end(), [](const ObjectGroup& a, const ObjectGroup& b) {
    if (a.min_distance_mm != b.min_distance_mm) return a.min_distance_mm < b.min_distance_mm;
    if (a.min_row != b.min_row) return a.min_row < b.min_row;
    if (a.min_col != b.min_col) return a.min_col < b.min_col;
    return a.pixels < b.pixels;
  });
  if (static_cast<int>(groups.size()) > cfg.max_groups)
    groups.resize(cfg.max_groups);
  return groups;
}

enum class Side { Left, Right, Center };

struct GroupGeometry {
  double azimuth_span_rad = 0.0;
  double lateral_width_m = 0.0;  // at the group's min distance
  Side side = Side::Center;
};

/// Geometric features of a group from the outermost column edges: the lateral
/// extent h spanned at distance d follows from the per-column FoV angle,
/// h = d * (tan(a_right) - tan(a_left)).
inline GroupGeometry group_features(const ObjectGroup& g, const SensorConfig& cfg) {
  GroupGeometry geom;
  const double left_edge = (static_cast<double>(g.min_col) / cfg.cols - 0.5) * cfg.fov_h_rad();
  const double right_edge = (static_cast<double>(g.max_col + 1) / cfg.cols - 0.5) * cfg.fov_h_rad();
  geom.azimuth_span_rad = right_edge - left_edge;
  const double d = g.min_distance_mm / 1000.0;
  geom.lateral_width_m = d * (std::tan(right_edge) - std::tan(left_edge));
  const double mid = (cfg.cols - 1) / 2.0;
  if (g.centroid_col < mid)
    geom.side = Side::Left;
  else if (g.centroid_col > mid)
    geom.side = Side::Right;
  else
    geom.side = Side::Center;
  return geom;
}

}  // namespace tofsim
