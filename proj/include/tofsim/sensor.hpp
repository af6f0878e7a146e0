#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "tofsim/config.hpp"
#include "tofsim/geometry.hpp"
#include "tofsim/random.hpp"
#include "tofsim/state.hpp"
#include "tofsim/world.hpp"

namespace tofsim {

/// One 8x8 reading: integer millimeters plus per-pixel validity.
/// Invalid pixels hold distance 0 in memory and serialize as -1.
struct DepthFrame {
  std::array<std::array<int, 8>, 8> distance_mm{};
  std::array<std::array<bool, 8>, 8> valid{};
  std::int64_t timestamp_ms = 0;
};

inline bool operator==(const DepthFrame& a, const DepthFrame& b) {
  return a.timestamp_ms == b.timestamp_ms && a.valid == b.valid && a.distance_mm == b.distance_mm;
}

struct IdealPixel {
  bool hit = false;
  double distance_mm = 0.0;  // projected onto the optical axis
  SurfaceClass surface = SurfaceClass::Matte;
  double incidence_rad = 0.0;
};

/// Exact raycast result, before any noise or validity corruption.
struct IdealFrame {
  std::array<std::array<IdealPixel, 8>, 8> px{};
};

struct PixelDirection {
  double azimuth_rad = 0.0;    // positive toward column 7 (right of flight direction)
  double elevation_rad = 0.0;  // positive toward row 0 (up)
};

/// Center-ray direction of a pixel. Column 0 is leftmost in the flight
/// direction, row 0 topmost.
inline PixelDirection pixel_direction(int row, int col, const SensorConfig& cfg) {
  if (row < 0 || row >= cfg.rows || col < 0 || col >= cfg.cols)
    throw std::out_of_range("pixel_direction: index out of range");
  PixelDirection d;
  d.azimuth_rad = ((col + 0.5) / cfg.cols - 0.5) * cfg.fov_h_rad();
  d.elevation_rad = (0.5 - (row + 0.5) / cfg.rows) * cfg.fov_v_rad();
  return d;
}

namespace detail {

struct RayHit {
  double horizontal_m = 0.0;
  SurfaceClass surface = SurfaceClass::Matte;
  Vec2 seg_dir;  // unit direction of the hit segment
};

inline void consider_segment(const Vec2& origin, const Vec2& dir, double height, double tan_el,
                             const Vec2& a, const Vec2& b, double z_min, double z_max,
                             SurfaceClass surface, std::optional<RayHit>& best) {
  const auto t = ray_segment_intersection(origin, dir, a, b);
  if (!t) return;
  if (best && *t >= best->horizontal_m) return;
  const double hit_z = height + *t * tan_el;
  if (hit_z < z_min || hit_z > z_max) return;
  Vec2 seg = b - a;
  const double len = seg.norm();
  if (len <= 0.0) return;
  best = RayHit{*t, surface, {seg.x / len, seg.y / len}};
}

}  // namespace detail

/// Casts the 64 center rays from the drone's pose through the world.
/// Distances follow the projected-distance convention: the component of the
/// hit range along the sensor's optical axis, so a frontal plane at d reads
/// d on every pixel. Moving obstacles are sampled at pose.time_s. The floor
/// is not part of the world model and never produces a return.
inline IdealFrame raycast_frame(const World& world, const DroneState& pose,
                                const SensorConfig& cfg) {
  IdealFrame frame;
  const Vec2 origin{pose.x, pose.y};
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      const PixelDirection pd = pixel_direction(r, c, cfg);
      const double theta = pose.yaw - pd.azimuth_rad;
      const Vec2 dir{std::cos(theta), std::sin(theta)};
      const double tan_el = std::tan(pd.elevation_rad);

      std::optional<detail::RayHit> best;
      for (const WallSegment& s : world.segments)
        detail::consider_segment(origin, dir, pose.height, tan_el, s.a, s.b, s.z_min, s.z_max,
                                 s.surface, best);
      for (const MovingObstacle& m : world.moving_obstacles)
        for (const auto& [a, b] : m.edges_at(pose.time_s))
          detail::consider_segment(origin, dir, pose.height, tan_el, a, b, m.z_min, m.z_max,
                                   m.surface, best);

      IdealPixel& px = frame.px[r][c];
      if (!best) continue;
      const double projected_mm = best->horizontal_m * std::cos(pd.azimuth_rad) * 1000.0;
      if (projected_mm > cfg.max_range_mm) continue;

      // Incidence between the 3-D ray and the wall normal.
      const Vec2 normal{-best->seg_dir.y, best->seg_dir.x};
      const double cos_inc =
          std::min(1.0, std::abs(std::cos(pd.elevation_rad) * dir.dot(normal)));
      px.hit = true;
      px.distance_mm = projected_mm;
      px.surface = best->surface;
      px.incidence_rad = std::acos(cos_inc);
    }
  }
  return frame;
}

/// Probability that a return at the given distance yields a valid pixel.
/// Piecewise-linear over the knots, zero beyond the last knot; reflective
/// surfaces past the incidence cutoff never validate.
inline double validity_probability(double distance_m, SurfaceClass surface, double incidence_rad,
                                   const NoiseConfig& noise) {
  if (distance_m < 0.0) throw std::domain_error("validity_probability: negative distance");
  if (noise.validity_knots.empty()) return 0.0;
  double attenuation = 1.0;
  if (surface == SurfaceClass::Reflective &&
      incidence_rad > deg_to_rad(noise.reflectivity_cutoff_deg))
    attenuation = 0.0;

  const auto& knots = noise.validity_knots;
  double p = 0.0;
  if (distance_m <= knots.front().distance_m) {
    p = knots.front().probability;
  } else if (distance_m > knots.back().distance_m) {
    p = 0.0;
  } else {
    for (std::size_t i = 1; i < knots.size(); ++i) {
      if (distance_m <= knots[i].distance_m) {
        const double u = (distance_m - knots[i - 1].distance_m) /
                         (knots[i].distance_m - knots[i - 1].distance_m);
        p = knots[i - 1].probability + u * (knots[i].probability - knots[i - 1].probability);
        break;
      }
    }
  }
  return std::clamp(p * attenuation, 0.0, 1.0);
}

/// Corrupts an ideal frame with per-pixel bias, Gaussian noise and validity
/// dropouts. Pixels are processed row-major with a fixed draw protocol, so a
/// given (frame, noise, stream state) always yields identical output.
inline DepthFrame apply_noise(const IdealFrame& ideal, const NoiseConfig& noise,
                              const SensorConfig& cfg, RandomStream& rng,
                              std::int64_t timestamp_ms = 0) {
  DepthFrame out;
  out.timestamp_ms = timestamp_ms;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      const IdealPixel& px = ideal.px[r][c];
      if (!px.hit) continue;
      const double p =
          validity_probability(px.distance_mm / 1000.0, px.surface, px.incidence_rad, noise);
      if (rng.uniform() >= p) continue;
      double d = px.distance_mm + noise.bias_mm[r][c];
      if (noise.sigma_mm[r][c] > 0.0) d += rng.gaussian(0.0, noise.sigma_mm[r][c]);
      const long long mm = std::llround(d);
      out.distance_mm[r][c] =
          static_cast<int>(std::clamp<long long>(mm, 1, cfg.max_range_mm));
      out.valid[r][c] = true;
    }
  }
  return out;
}

/// FNV-1a over distances and validity, for trace records and determinism checks.
inline std::uint64_t frame_digest(const DepthFrame& f) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(f.timestamp_ms));
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      mix(static_cast<std::uint64_t>(f.valid[r][c] ? f.distance_mm[r][c] : -1));
  return h;
}

}  // namespace tofsim
