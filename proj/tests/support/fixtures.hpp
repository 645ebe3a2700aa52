#pragma once

#include "fibrepath/layer_mesh.hpp"
#include "fibrepath/mesh_io.hpp"
#include "fibrepath/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

namespace fixtures {

using fibrepath::LayerMesh;
using fibrepath::PlanarMesh;
using fibrepath::TetMesh;
using fibrepath::Vec2;
using fibrepath::Vec3;

inline void fix_orientation(TetMesh& m) {
  for (std::size_t t = 0; t < m.num_tets(); ++t)
    if (m.signed_volume(t) < 0) std::swap(m.tets[t][0], m.tets[t][1]);
}

inline TetMesh single_tet() {
  TetMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.tets = {{0, 1, 2, 3}};
  return m;
}

// Unit cube split into 6 tets along the main diagonal.
inline TetMesh unit_cube() {
  TetMesh m;
  for (int i = 0; i < 8; ++i) m.vertices.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  const int axes[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& a : axes) {
    const int v1 = 1 << a[0];
    const int v2 = v1 | (1 << a[1]);
    m.tets.push_back({0, v1, v2, 7});
  }
  fix_orientation(m);
  return m;
}

inline LayerMesh square_layer(int n, double size = 1.0) {
  return fibrepath::planar_layer(fibrepath::rectangle_mesh({0, 0}, {size, size}, n, n));
}

inline LayerMesh rect_layer(double w, double h, int nx, int ny) {
  return fibrepath::planar_layer(fibrepath::rectangle_mesh({0, 0}, {w, h}, nx, ny));
}

inline LayerMesh annulus_layer(double r0, double r1, int nr, int ntheta) {
  PlanarMesh m;
  for (int j = 0; j <= nr; ++j)
    for (int i = 0; i < ntheta; ++i) {
      const double r = r0 + (r1 - r0) * j / nr;
      const double a = 2 * std::numbers::pi * i / ntheta;
      m.vertices.emplace_back(r * std::cos(a), r * std::sin(a));
    }
  auto id = [&](int i, int j) { return j * ntheta + (i % ntheta); };
  for (int j = 0; j < nr; ++j)
    for (int i = 0; i < ntheta; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return fibrepath::planar_layer(m);
}

// L-shaped layer: [0,2]^2 minus the open upper-right quadrant.
inline LayerMesh l_layer(int n) {
  PlanarMesh m = fibrepath::rectangle_mesh({0, 0}, {2, 2}, 2 * n, 2 * n);
  std::vector<std::array<int, 3>> keep;
  for (const auto& t : m.triangles) {
    const Vec2 c = (m.vertices[t[0]] + m.vertices[t[1]] + m.vertices[t[2]]) / 3.0;
    if (!(c.x() > 1 && c.y() > 1)) keep.push_back(t);
  }
  m.triangles = keep;
  return fibrepath::planar_layer(m);
}

inline std::vector<double> sample(const LayerMesh& layer, auto&& f) {
  std::vector<double> v;
  for (const auto& p : layer.vertices) v.push_back(f(p));
  return v;
}

}  // namespace fixtures
