#pragma once

#include "fibrepath/layer_mesh.hpp"
#include "fibrepath/toolpath.hpp"

#include <span>
#include <string>
#include <vector>

namespace fibrepath {

inline constexpr double kDefaultMinPathLength = 42.0;  // mm

struct Box2 {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  bool contains(const Vec2& p) const { return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax; }
  friend bool operator==(const Box2&, const Box2&) = default;
};

/// Geodesic distance to a set of boundary edges.
struct DistanceField {
  std::vector<double> values;     // +inf where unreachable
  std::vector<int> source_edges;  // indices into LayerMesh::boundary_edges
  std::vector<int> source_vertices;
  bool has_unreachable = false;

  bool empty() const { return source_edges.empty(); }
};

/// Boundary edges whose midpoint lies in any of the boxes.
std::vector<int> select_boundary_edges(const LayerMesh& layer, std::span<const Box2> boxes);

/// Heat method: one implicit heat step with t = t_scale * h^2, normalized
/// gradient, then a Poisson solve pinned to zero on the source vertices.
DistanceField heat_distance(const LayerMesh& layer, std::span<const int> source_edges, double t_scale = 1.0);

/// Boundary-conformal curves at distance 1.5W (kept) and 2.5W (used to join
/// truncated stress curves).
struct BoundaryCurves {
  std::vector<Toolpath> inner;  // d = 1.5 W
  std::vector<Toolpath> outer;  // d = 2.5 W
  std::vector<std::string> warnings;
  bool empty() const { return inner.empty() && outer.empty(); }
};
BoundaryCurves conformal_curves(const DistanceField& df, const LayerMesh& layer, double spacing);

struct ConnectionResult {
  std::vector<Toolpath> paths;  // joined stress paths followed by the 1.5W curves
  int arc_connectors = 0;
  int straight_connectors = 0;
  int unpaired_endpoints = 0;
  int connector_crossings = 0;
  std::vector<std::string> warnings;
};

/// Removes the parts of stress curves with d < 2.5W, joins the new endpoints
/// pairwise along the 2.5W curve, then joins any remaining open ends closer
/// than 2W by straight segments (greedy, shortest first). With an empty
/// distance field only the straight joining runs.
ConnectionResult truncate_and_connect(const std::vector<Toolpath>& stress, const BoundaryCurves& bnd,
                                      const DistanceField& df, const LayerMesh& layer, double spacing);

struct LengthFilterResult {
  std::vector<Toolpath> kept;
  int removed_count = 0;
  double length_before = 0.0;
  double length_after = 0.0;
  double removed_length() const { return length_before - length_after; }
};
/// Drops paths shorter than `min_length` (a path of exactly min_length stays).
LengthFilterResult filter_min_length(std::vector<Toolpath> paths, double min_length = kDefaultMinPathLength);

}  // namespace fibrepath
