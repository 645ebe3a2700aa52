#include "fibrepath/layer_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace fibrepath {

int LayerTopology::edge_index(int a, int b) const {
  const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
  auto it = std::lower_bound(edges.begin(), edges.end(), key);
  if (it == edges.end() || *it != key) return -1;
  return static_cast<int>(it - edges.begin());
}

Vec2 LayerMesh::face_centroid(std::size_t f) const {
  const auto& t = triangles[f];
  return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

double LayerMesh::mean_edge_length() const {
  if (topology.edges.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& e : topology.edges) sum += (vertices[e[0]] - vertices[e[1]]).norm();
  return sum / static_cast<double>(topology.edges.size());
}

double LayerMesh::total_area() const { return std::accumulate(face_area.begin(), face_area.end(), 0.0); }

namespace {

LayerTopology build_topology(const LayerMesh& m) {
  LayerTopology topo;
  const std::size_t nf = m.triangles.size();

  std::vector<std::array<int, 2>> all;
  all.reserve(3 * nf);
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) all.push_back({std::min(t[k], t[(k + 1) % 3]), std::max(t[k], t[(k + 1) % 3])});
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  topo.edges = std::move(all);

  topo.edge_faces.assign(topo.edges.size(), {-1, -1});
  topo.face_edges.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& t = m.triangles[f];
    for (int k = 0; k < 3; ++k) {
      const int e = topo.edge_index(t[k], t[(k + 1) % 3]);
      topo.face_edges[f][k] = e;
      auto& ef = topo.edge_faces[e];
      if (ef[0] < 0) ef[0] = static_cast<int>(f);
      else if (ef[1] < 0) ef[1] = static_cast<int>(f);
      else throw std::runtime_error("layer mesh edge shared by more than two faces");
    }
  }

  topo.face_neighbors.assign(nf, {});
  for (const auto& ef : topo.edge_faces) {
    if (ef[1] < 0) continue;
    topo.face_neighbors[ef[0]].push_back(ef[1]);
    topo.face_neighbors[ef[1]].push_back(ef[0]);
  }
  for (auto& nb : topo.face_neighbors) std::sort(nb.begin(), nb.end());

  topo.vertex_neighbors.assign(m.vertices.size(), {});
  for (const auto& e : topo.edges) {
    topo.vertex_neighbors[e[0]].push_back(e[1]);
    topo.vertex_neighbors[e[1]].push_back(e[0]);
  }
  for (auto& nb : topo.vertex_neighbors) std::sort(nb.begin(), nb.end());

  topo.face_component.assign(nf, -1);
  std::vector<int> stack;
  for (std::size_t f = 0; f < nf; ++f) {
    if (topo.face_component[f] >= 0) continue;
    const int c = topo.num_components++;
    topo.face_component[f] = c;
    stack.push_back(static_cast<int>(f));
    while (!stack.empty()) {
      const int g = stack.back();
      stack.pop_back();
      for (int h : topo.face_neighbors[g])
        if (topo.face_component[h] < 0) {
          topo.face_component[h] = c;
          stack.push_back(h);
        }
    }
  }
  // Faces touching only at a vertex are treated as separate components.
  topo.vertex_component.assign(m.vertices.size(), -1);
  for (std::size_t f = 0; f < nf; ++f)
    for (int v : m.triangles[f])
      if (topo.vertex_component[v] < 0) topo.vertex_component[v] = topo.face_component[f];
  return topo;
}

}  // namespace

LayerMesh LayerMesh::from_triangles(double z, std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                                    std::vector<int> face_source) {
  if (face_source.empty()) face_source.assign(triangles.size(), -1);
  if (face_source.size() != triangles.size())
    throw std::invalid_argument("LayerMesh::from_triangles: face_source size mismatch");

  LayerMesh m;
  m.z = z;
  m.vertices = std::move(vertices);
  for (std::size_t f = 0; f < triangles.size(); ++f) {
    auto t = triangles[f];
    for (int v : t)
      if (v < 0 || static_cast<std::size_t>(v) >= m.vertices.size())
        throw std::invalid_argument("LayerMesh::from_triangles: vertex index out of range");
    double area = signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
    if (area < 0.0) {
      std::swap(t[1], t[2]);
      area = -area;
    }
    if (area <= 1e-12) continue;
    m.triangles.push_back(t);
    m.face_area.push_back(area);
    m.face_source.push_back(face_source[f]);
  }
  m.topology = build_topology(m);

  for (std::size_t f = 0; f < m.triangles.size(); ++f) {
    const auto& t = m.triangles[f];
    for (int k = 0; k < 3; ++k)
      if (m.topology.is_boundary_edge(m.topology.face_edges[f][k])) m.boundary_edges.push_back({t[k], t[(k + 1) % 3]});
  }
  std::sort(m.boundary_edges.begin(), m.boundary_edges.end());
  return m;
}

std::vector<std::vector<int>> boundary_loops(const LayerMesh& layer) {
  std::multimap<int, int> next;
  for (const auto& e : layer.boundary_edges) next.emplace(e[0], e[1]);
  std::vector<std::vector<int>> loops;
  while (!next.empty()) {
    auto it = next.begin();
    const int start = it->first;
    std::vector<int> loop{start};
    int cur = it->second;
    next.erase(it);
    while (cur != start) {
      loop.push_back(cur);
      auto nx = next.find(cur);
      if (nx == next.end()) break;  // open chain; should not happen on a valid layer
      cur = nx->second;
      next.erase(nx);
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::vector<LayerComponent> split_components(const LayerMesh& layer) {
  const int nc = layer.topology.num_components;
  std::vector<LayerComponent> comps(static_cast<std::size_t>(nc));
  if (nc == 1) {
    comps[0].mesh = layer;
    comps[0].vertex_map.resize(layer.num_vertices());
    std::iota(comps[0].vertex_map.begin(), comps[0].vertex_map.end(), 0);
    comps[0].face_map.resize(layer.num_faces());
    std::iota(comps[0].face_map.begin(), comps[0].face_map.end(), 0);
    return comps;
  }
  std::vector<std::vector<std::array<int, 3>>> tris(nc);
  std::vector<std::vector<int>> src(nc);
  std::vector<int> local(layer.num_vertices(), -1);
  std::vector<std::vector<Vec2>> verts(nc);
  for (std::size_t f = 0; f < layer.num_faces(); ++f) {
    const int c = layer.topology.face_component[f];
    std::array<int, 3> t{};
    for (int k = 0; k < 3; ++k) {
      const int v = layer.triangles[f][k];
      if (local[v] < 0) {
        local[v] = static_cast<int>(comps[c].vertex_map.size());
        comps[c].vertex_map.push_back(v);
        verts[c].push_back(layer.vertices[v]);
      }
      t[k] = local[v];
    }
    tris[c].push_back(t);
    src[c].push_back(layer.face_source[f]);
    comps[c].face_map.push_back(static_cast<int>(f));
  }
  for (int c = 0; c < nc; ++c)
    comps[c].mesh = LayerMesh::from_triangles(layer.z, std::move(verts[c]), std::move(tris[c]), std::move(src[c]));
  return comps;
}

std::array<Vec2, 3> shape_gradients(const LayerMesh& layer, std::size_t face) {
  const auto& t = layer.triangles[face];
  const double twice_area = 2.0 * layer.face_area[face];
  std::array<Vec2, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Vec2 opposite = layer.vertices[t[(k + 2) % 3]] - layer.vertices[t[(k + 1) % 3]];
    g[k] = perp(opposite) / twice_area;
  }
  return g;
}

Vec2 face_gradient(const LayerMesh& layer, std::size_t face, const std::vector<double>& values) {
  const auto g = shape_gradients(layer, face);
  const auto& t = layer.triangles[face];
  return values[t[0]] * g[0] + values[t[1]] * g[1] + values[t[2]] * g[2];
}

FaceLocator::FaceLocator(const LayerMesh& layer) : layer_(&layer) {
  if (layer.vertices.empty() || layer.triangles.empty()) {
    origin_ = Vec2::Zero();
    cells_.resize(1);
    return;
  }
  Vec2 lo = layer.vertices[layer.triangles[0][0]], hi = lo;
  for (const auto& t : layer.triangles)
    for (int v : t) {
      lo = lo.cwiseMin(layer.vertices[v]);
      hi = hi.cwiseMax(layer.vertices[v]);
    }
  const double h = std::max(layer.mean_edge_length(), 1e-9);
  cell_ = 2.0 * h;
  origin_ = lo - Vec2::Constant(1e-9);
  nx_ = std::max(1, static_cast<int>(std::ceil((hi.x() - origin_.x()) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((hi.y() - origin_.y()) / cell_)) + 1);
  cells_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (std::size_t f = 0; f < layer.triangles.size(); ++f) {
    Vec2 flo = layer.vertices[layer.triangles[f][0]], fhi = flo;
    for (int v : layer.triangles[f]) {
      flo = flo.cwiseMin(layer.vertices[v]);
      fhi = fhi.cwiseMax(layer.vertices[v]);
    }
    const int x0 = std::clamp(static_cast<int>((flo.x() - origin_.x()) / cell_), 0, nx_ - 1);
    const int x1 = std::clamp(static_cast<int>((fhi.x() - origin_.x()) / cell_), 0, nx_ - 1);
    const int y0 = std::clamp(static_cast<int>((flo.y() - origin_.y()) / cell_), 0, ny_ - 1);
    const int y1 = std::clamp(static_cast<int>((fhi.y() - origin_.y()) / cell_), 0, ny_ - 1);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) cells_[static_cast<std::size_t>(y) * nx_ + x].push_back(static_cast<int>(f));
  }
}

std::optional<FaceLocator::Hit> FaceLocator::locate(const Vec2& p) const {
  const int x = static_cast<int>(std::floor((p.x() - origin_.x()) / cell_));
  const int y = static_cast<int>(std::floor((p.y() - origin_.y()) / cell_));
  if (x < 0 || y < 0 || x >= nx_ || y >= ny_) return std::nullopt;
  Hit best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int f : cells_[static_cast<std::size_t>(y) * nx_ + x]) {
    const auto& t = layer_->triangles[f];
    const Vec2& a = layer_->vertices[t[0]];
    const Vec2& b = layer_->vertices[t[1]];
    const Vec2& c = layer_->vertices[t[2]];
    const double area = layer_->face_area[f];
    std::array<double, 3> w{signed_area(p, b, c) / area, signed_area(a, p, c) / area, signed_area(a, b, p) / area};
    const double mn = std::min({w[0], w[1], w[2]});
    if (mn > best_min) {
      best_min = mn;
      best.face = f;
      best.bary = w;
    }
  }
  if (best.face < 0 || best_min < -1e-7) return std::nullopt;
  return best;
}

std::optional<double> FaceLocator::interpolate(const Vec2& p, const std::vector<double>& values) const {
  auto hit = locate(p);
  if (!hit) return std::nullopt;
  const auto& t = layer_->triangles[hit->face];
  return hit->bary[0] * values[t[0]] + hit->bary[1] * values[t[1]] + hit->bary[2] * values[t[2]];
}

}  // namespace fibrepath
