#pragma once

#include "fibrepath/geometry.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace fibrepath {

enum class PathKind : unsigned char { stress, boundary, connector, zigzag };

const char* to_string(PathKind k);
std::optional<PathKind> parse_path_kind(std::string_view s);

/// Ordered planar polyline. Closed paths do not repeat their first point.
struct Toolpath {
  std::vector<Vec2> points;
  PathKind kind = PathKind::stress;
  bool closed = false;
  int layer = 0;
  double isovalue = std::numeric_limits<double>::quiet_NaN();
  /// Inclusive point-index ranges [first, last] whose segments are connectors
  /// inserted while joining curves. In-memory annotation only.
  std::vector<std::array<std::size_t, 2>> connectors;

  double length() const { return polyline_length(points, closed); }
};

double total_length(const std::vector<Toolpath>& paths);

}  // namespace fibrepath
