#pragma once

#include "fibrepath/field2d.hpp"
#include "fibrepath/layer_mesh.hpp"
#include "fibrepath/toolpath.hpp"

#include <span>
#include <string>
#include <vector>

namespace fibrepath {

inline constexpr double kDefaultSpacing = 1.0;  // W, mm

/// Marching-triangles level set of a per-vertex field. Non-finite vertex
/// values exclude their faces. Open chains run boundary to boundary.
std::vector<Toolpath> extract_isocurves(const LayerMesh& layer, std::span<const double> values, double isovalue,
                                        PathKind kind = PathKind::stress);

/// Isovalues s_min + (i + 1/2)/n (s_max - s_min), i = 0..n-1.
std::vector<double> isovalue_ladder(double s_min, double s_max, int n);

/// Minimal distance between curves of consecutive non-empty groups, after
/// resampling at W/4. Returns +inf when fewer than two groups are non-empty.
/// Throws std::invalid_argument for fewer than two groups.
double min_neighbor_distance(const std::vector<std::vector<Toolpath>>& groups, double spacing);

/// Multi-source Dijkstra over the vertex-edge graph with Euclidean lengths.
std::vector<double> graph_distance(const LayerMesh& layer, std::span<const int> sources);

struct IsoExtraction {
  std::vector<Toolpath> paths;
  std::vector<int> isocurve_counts;   // final n per connected component
  double min_distance = 0.0;          // min over components (+inf if none measured)
  std::vector<std::string> warnings;
};

/// Chooses the densest isovalue ladder whose neighbouring curves stay more
/// than W apart, per connected component of the layer.
IsoExtraction adaptive_extract(const LayerMesh& layer, const ScalarField& s, double spacing = kDefaultSpacing);

/// Single-component core of adaptive_extract, exposed for inspection.
struct LadderResult {
  int n = 0;
  double distance = 0.0;
  double geodesic_extent = 0.0;  // D
  std::vector<std::vector<Toolpath>> groups;
  std::vector<std::string> warnings;
};
LadderResult adaptive_ladder(const LayerMesh& component, std::span<const double> values, double spacing);

/// Extracts the ladder of n isovalues, grouped per isovalue, dropping curves
/// with fewer than 3 points.
std::vector<std::vector<Toolpath>> extract_ladder(const LayerMesh& layer, std::span<const double> values, int n);

}  // namespace fibrepath
