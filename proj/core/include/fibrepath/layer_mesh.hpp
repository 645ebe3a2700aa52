#pragma once

#include "fibrepath/geometry.hpp"

#include <array>
#include <optional>
#include <vector>

namespace fibrepath {

/// Edge/face connectivity of a planar triangulation. Edges are stored with
/// ascending vertex indices, sorted lexicographically.
struct LayerTopology {
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 2>> edge_faces;   // second entry -1 on boundary
  std::vector<std::array<int, 3>> face_edges;   // edge k joins corners k and k+1
  std::vector<std::vector<int>> face_neighbors; // edge-sharing faces
  std::vector<std::vector<int>> vertex_neighbors;
  std::vector<int> face_component;
  std::vector<int> vertex_component; // -1 for vertices used by no face
  int num_components = 0;

  bool is_boundary_edge(int e) const { return edge_faces[e][1] < 0; }
  int edge_index(int a, int b) const;
};

/// Triangulated planar cross-section at height z.
struct LayerMesh {
  double z = 0.0;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;      // counter-clockwise
  std::vector<std::array<int, 2>> boundary_edges; // oriented with the interior on the left
  std::vector<int> face_source;                   // source tet per triangle, -1 if synthetic
  std::vector<double> face_area;
  LayerTopology topology;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_faces() const { return triangles.size(); }
  Vec2 face_centroid(std::size_t f) const;
  double mean_edge_length() const;
  double total_area() const;

  /// Builds areas, orientation, boundary and topology from raw triangles.
  /// Clockwise input triangles are flipped; faces with area <= 1e-12 are dropped.
  static LayerMesh from_triangles(double z, std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                                  std::vector<int> face_source = {});
};

/// Closed boundary loops as vertex index sequences (closure implicit).
std::vector<std::vector<int>> boundary_loops(const LayerMesh& layer);

/// Sub-mesh restricted to one connected component. `vertex_map[i]` is the
/// parent index of local vertex i, `face_map` likewise.
struct LayerComponent {
  LayerMesh mesh;
  std::vector<int> vertex_map;
  std::vector<int> face_map;
};
std::vector<LayerComponent> split_components(const LayerMesh& layer);

/// Per-face constant gradient of the linear shape functions: row k is the
/// gradient of the hat function at corner k.
std::array<Vec2, 3> shape_gradients(const LayerMesh& layer, std::size_t face);

/// Gradient of a piecewise-linear per-vertex field on one face.
Vec2 face_gradient(const LayerMesh& layer, std::size_t face, const std::vector<double>& values);

/// Uniform-grid point location over the faces of a layer.
class FaceLocator {
 public:
  explicit FaceLocator(const LayerMesh& layer);

  struct Hit {
    int face = -1;
    std::array<double, 3> bary{};
  };
  /// Face containing p (within a small tolerance), if any.
  std::optional<Hit> locate(const Vec2& p) const;
  /// Linear interpolation of a per-vertex field at p.
  std::optional<double> interpolate(const Vec2& p, const std::vector<double>& values) const;

 private:
  const LayerMesh* layer_;
  Vec2 origin_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

}  // namespace fibrepath
