#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace fibrepath {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Counter-clockwise quarter turn.
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross2(b - a, c - a);
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

inline Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double* t_out = nullptr) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  if (t_out) *t_out = t;
  return a + t * ab;
}

inline double polyline_length(std::span<const Vec2> pts, bool closed) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += (pts[i] - pts[i - 1]).norm();
  if (closed && pts.size() > 2) len += (pts.front() - pts.back()).norm();
  return len;
}

/// Resamples a polyline so that no two consecutive samples are farther than
/// `max_spacing` apart. Original vertices are kept.
inline std::vector<Vec2> resample_polyline(std::span<const Vec2> pts, bool closed, double max_spacing) {
  std::vector<Vec2> out;
  if (pts.empty()) return out;
  const std::size_t nseg = closed && pts.size() > 2 ? pts.size() : pts.size() - 1;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < nseg; ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % pts.size()];
    const double len = (b - a).norm();
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / max_spacing)));
    for (int k = 0; k < pieces; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
  }
  if (!closed || pts.size() <= 2) out.push_back(pts.back());
  return out;
}

}  // namespace fibrepath
