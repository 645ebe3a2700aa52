#pragma once

#include "fibrepath/layer_mesh.hpp"
#include "fibrepath/mesh_io.hpp"
#include "fibrepath/stress3d.hpp"

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace fibrepath {

class SliceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FaceStatus : unsigned char { defined, undefined };

/// Per-face planar vector field on a layer.
struct FaceField {
  std::vector<Vec2> v;
  std::vector<double> sigma;
  std::vector<Vec2> u;  // weighted field; empty until weight_vectors()
  std::vector<FaceStatus> status;

  std::size_t size() const { return v.size(); }
};

inline constexpr double kProjectionCutoff = 1e-6;

/// Intersects the tet mesh with the plane z = height. A plane passing
/// through a vertex is nudged upward by 1e-7 of the z-extent.
LayerMesh slice_at_height(const TetMesh& mesh, double z);

/// Fibre layer heights z_k = z_min + offset + (k + 1/2) h strictly inside the solid.
std::vector<double> layer_heights(const TetMesh& mesh, double layer_height, double z_offset = 0.0);

FaceField project_field(const ElementField& field, const LayerMesh& layer);

/// `layer v1 <z> <nv> <nf>` then `v x y [s]` and `t i j k` lines.
void write_layer_mesh(std::ostream& out, const LayerMesh& layer, const std::vector<double>* scalar = nullptr);

}  // namespace fibrepath
