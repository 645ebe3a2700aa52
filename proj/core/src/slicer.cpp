#include "fibrepath/slicer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <unordered_map>

namespace fibrepath {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

LayerMesh slice_at_height(const TetMesh& mesh, double z) {
  if (mesh.vertices.empty() || mesh.tets.empty()) throw SliceError("slice: empty mesh");
  double zmin = mesh.vertices[0].z(), zmax = zmin;
  for (const auto& v : mesh.vertices) {
    zmin = std::min(zmin, v.z());
    zmax = std::max(zmax, v.z());
  }
  if (!(z > zmin && z < zmax))
    throw SliceError("slice: plane z=" + format_double(z) + " does not intersect the solid (empty layer)");

  const double extent = zmax - zmin;
  for (int guard = 0; guard < 1000; ++guard) {
    const bool hits = std::any_of(mesh.vertices.begin(), mesh.vertices.end(),
                                  [&](const Vec3& v) { return std::abs(v.z() - z) <= 1e-9 * extent; });
    if (!hits) break;
    z += 1e-7 * extent;
  }

  const double weld = 1e-6 * extent;
  std::unordered_map<std::uint64_t, int> cut_vertex;
  std::vector<Vec2> verts;
  std::vector<std::array<int, 3>> tris;
  std::vector<int> source;

  auto cut = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = cut_vertex.find(key);
    if (it != cut_vertex.end()) return it->second;
    const Vec3& pa = mesh.vertices[std::min(a, b)];
    const Vec3& pb = mesh.vertices[std::max(a, b)];
    const double t = (z - pa.z()) / (pb.z() - pa.z());
    const Vec3 p = pa + t * (pb - pa);
    // Cuts right next to a mesh vertex (perturbed plane) weld onto that
    // vertex, otherwise the slivers around it fall below the area cutoff.
    int snap = -1;
    if ((p - pa).norm() <= weld) snap = std::min(a, b);
    else if ((p - pb).norm() <= weld) snap = std::max(a, b);
    if (snap >= 0) {
      const std::uint64_t vkey = (std::uint64_t{1} << 63) | static_cast<std::uint64_t>(snap);
      auto vt = cut_vertex.find(vkey);
      if (vt == cut_vertex.end()) {
        vt = cut_vertex.emplace(vkey, static_cast<int>(verts.size())).first;
        verts.emplace_back(mesh.vertices[snap].x(), mesh.vertices[snap].y());
      }
      cut_vertex.emplace(key, vt->second);
      return vt->second;
    }
    const int id = static_cast<int>(verts.size());
    verts.emplace_back(p.x(), p.y());
    cut_vertex.emplace(key, id);
    return id;
  };

  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    std::array<int, 4> below{}, above{};
    int nb = 0, na = 0;
    for (int v : mesh.tets[t]) {
      if (mesh.vertices[v].z() < z) below[nb++] = v;
      else above[na++] = v;
    }
    if (nb == 0 || na == 0) continue;
    const int src = static_cast<int>(t);
    if (nb == 1 || na == 1) {
      const int apex = nb == 1 ? below[0] : above[0];
      const auto& others = nb == 1 ? above : below;
      tris.push_back({cut(apex, others[0]), cut(apex, others[1]), cut(apex, others[2])});
      source.push_back(src);
      continue;
    }
    // Four cut points in cyclic order: ac, ad, bd, bc.
    const int a = below[0], b = below[1], c = above[0], d = above[1];
    const int q0 = cut(a, c), q1 = cut(a, d), q2 = cut(b, d), q3 = cut(b, c);
    const double d02 = (verts[q0] - verts[q2]).squaredNorm();
    const double d13 = (verts[q1] - verts[q3]).squaredNorm();
    if (d02 <= d13) {
      tris.push_back({q0, q1, q2});
      tris.push_back({q0, q2, q3});
    } else {
      tris.push_back({q1, q2, q3});
      tris.push_back({q1, q3, q0});
    }
    source.push_back(src);
    source.push_back(src);
  }
  if (tris.empty()) throw SliceError("slice: empty layer at z=" + format_double(z));

  // Drop faces collapsed by welding and any vertex left unused.
  {
    std::vector<std::array<int, 3>> kept;
    std::vector<int> kept_src;
    for (std::size_t f = 0; f < tris.size(); ++f) {
      const auto& t = tris[f];
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
      kept.push_back(t);
      kept_src.push_back(source[f]);
    }
    std::vector<int> remap(verts.size(), -1);
    std::vector<Vec2> used;
    for (auto& t : kept)
      for (int& v : t) {
        if (remap[v] < 0) {
          remap[v] = static_cast<int>(used.size());
          used.push_back(verts[v]);
        }
        v = remap[v];
      }
    verts = std::move(used);
    tris = std::move(kept);
    source = std::move(kept_src);
  }

  try {
    LayerMesh layer = LayerMesh::from_triangles(z, std::move(verts), std::move(tris), std::move(source));
    if (layer.triangles.empty()) throw SliceError("slice: all cut faces degenerate at z=" + format_double(z));
    return layer;
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const SliceError*>(&e)) throw;
    throw SliceError(std::string("slice: non-manifold weld: ") + e.what());
  }
}

std::vector<double> layer_heights(const TetMesh& mesh, double layer_height, double z_offset) {
  if (!(layer_height > 0.0)) throw std::invalid_argument("layer_heights: layer height must be positive");
  double zmin = mesh.vertices.at(0).z(), zmax = zmin;
  for (const auto& v : mesh.vertices) {
    zmin = std::min(zmin, v.z());
    zmax = std::max(zmax, v.z());
  }
  std::vector<double> zs;
  for (int k = 0;; ++k) {
    const double zk = zmin + z_offset + (k + 0.5) * layer_height;
    if (zk >= zmax) break;
    if (zk > zmin) zs.push_back(zk);
  }
  return zs;
}

FaceField project_field(const ElementField& field, const LayerMesh& layer) {
  FaceField ff;
  const std::size_t nf = layer.num_faces();
  ff.v.resize(nf, Vec2::Zero());
  ff.sigma.resize(nf);
  ff.status.resize(nf, FaceStatus::undefined);
  for (std::size_t f = 0; f < nf; ++f) {
    const int e = layer.face_source[f];
    if (e < 0 || static_cast<std::size_t>(e) >= field.size())
      throw std::invalid_argument("project_field: layer face has no valid source element");
    ff.sigma[f] = field.sigma[e];
    const Vec3& v = field.vectors[e];
    const Vec2 planar(v.x(), v.y());
    if (field.status[e] == VectorStatus::weak) {
      ff.sigma[f] = kWeakStress;
      continue;
    }
    if (field.status[e] == VectorStatus::defined && planar.norm() > kProjectionCutoff) {
      ff.v[f] = planar;
      ff.status[f] = FaceStatus::defined;
    }
  }
  return ff;
}

void write_layer_mesh(std::ostream& out, const LayerMesh& layer, const std::vector<double>* scalar) {
  out << "layer v1 " << format_double(layer.z) << ' ' << layer.num_vertices() << ' ' << layer.num_faces() << '\n';
  for (std::size_t i = 0; i < layer.num_vertices(); ++i) {
    out << "v " << format_double(layer.vertices[i].x()) << ' ' << format_double(layer.vertices[i].y());
    if (scalar) out << ' ' << format_double((*scalar)[i]);
    out << '\n';
  }
  for (const auto& t : layer.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace fibrepath
