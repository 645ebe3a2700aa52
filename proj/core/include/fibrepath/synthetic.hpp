#pragma once

#include "fibrepath/layer_mesh.hpp"
#include "fibrepath/mesh_io.hpp"
#include "fibrepath/toolpath.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace fibrepath {

/// Plane-stress Kirsch solution for an infinite plate with a circular hole of
/// radius `a` centred at the origin under far-field tension S along x.
/// Throws std::domain_error for points inside the hole.
SymTensor3 kirsch_stress(const Vec2& p, double S, double a);

/// Euler-Bernoulli cantilever clamped at x = 0 with tip load P at x = L;
/// depth h along y (centred on y = 0), width b. I = b h^3 / 12.
SymTensor3 cantilever_stress(const Vec2& p, double P, double L, double b, double h);

enum class SolidKind { box, plate_with_hole, cantilever };
std::optional<SolidKind> parse_solid_kind(std::string_view s);
const char* to_string(SolidKind k);

struct SolidSpec {
  SolidKind kind = SolidKind::box;
  double size_x = 10.0;
  double size_y = 10.0;
  double size_z = 2.0;
  double hole_radius = 2.0;  // plate_with_hole only
  double stress = 1.0;       // far-field S (box, plate), MPa
  double load = 100.0;       // tip load P (cantilever), N
};

struct TestSolid {
  TetMesh mesh;
  std::vector<SymTensor3> tensors;
};

/// Extruded structured tet mesh with centroid-sampled analytic stresses.
/// Box and cantilever span [0,x]x[0,y] resp. [0,L]x[-h/2,h/2]; the plate is
/// centred on the hole axis. z spans [0, size_z].
TestSolid build_test_solid(const SolidSpec& spec, double target_edge);

struct PlanarMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
};

PlanarMesh rectangle_mesh(const Vec2& lo, const Vec2& hi, int nx, int ny);
/// Disk triangulated in concentric rings (ring k has 6k vertices).
PlanarMesh disk_mesh(double radius, int rings);
/// Rectangular plate centred on a polygonal hole, O-grid topology.
PlanarMesh plate_with_hole_mesh(double size_x, double size_y, double hole_radius, double target_edge);
/// Prism extrusion split into three tets per prism, conforming across prisms.
TetMesh extrude(const PlanarMesh& base, double height, int layers);

LayerMesh planar_layer(const PlanarMesh& m, double z = 0.0);

struct ScanInterval {
  int line = 0;
  Vec2 a, b;  // a before b along the scan direction
};
/// Scanline/contour intersections at the given spacing and angle (degrees).
std::vector<ScanInterval> scanline_intervals(const LayerMesh& layer, double spacing, double angle_deg);

/// Serpentine infill: scanlines joined along the boundary where consecutive
/// lines meet the same stretch of contour.
std::vector<Toolpath> zigzag_infill(const LayerMesh& layer, double spacing, double angle_deg);

}  // namespace fibrepath
