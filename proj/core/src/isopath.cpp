#include "fibrepath/isopath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace fibrepath {

const char* to_string(PathKind k) {
  switch (k) {
    case PathKind::stress: return "stress";
    case PathKind::boundary: return "boundary";
    case PathKind::connector: return "connector";
    case PathKind::zigzag: return "zigzag";
  }
  return "?";
}

std::optional<PathKind> parse_path_kind(std::string_view s) {
  if (s == "stress") return PathKind::stress;
  if (s == "boundary") return PathKind::boundary;
  if (s == "connector") return PathKind::connector;
  if (s == "zigzag") return PathKind::zigzag;
  return std::nullopt;
}

double total_length(const std::vector<Toolpath>& paths) {
  double sum = 0.0;
  for (const auto& p : paths) sum += p.length();
  return sum;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::pair<double, double> finite_range(std::span<const double> values) {
  double lo = kInf, hi = -kInf;
  for (double v : values)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  return {lo, hi};
}

void drop_near_duplicates(std::vector<Vec2>& pts, bool closed) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts)
    if (out.empty() || (p - out.back()).norm() > 1e-9) out.push_back(p);
  if (closed)
    while (out.size() > 1 && (out.front() - out.back()).norm() <= 1e-9) out.pop_back();
  pts = std::move(out);
}

// Uniform grid over the segments of a set of polylines; answers
// nearest-segment distance queries by expanding rings.
class SegmentGrid {
 public:
  SegmentGrid(const std::vector<std::vector<Vec2>>& polylines, const std::vector<char>& closed, Vec2 lo, Vec2 hi,
              double cell)
      : origin_(lo), cell_(cell) {
    nx_ = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / cell)) + 1);
    ny_ = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / cell)) + 1);
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (std::size_t c = 0; c < polylines.size(); ++c) {
      const auto& pl = polylines[c];
      const std::size_t nseg = closed[c] && pl.size() > 2 ? pl.size() : pl.size() - 1;
      for (std::size_t i = 0; i < nseg; ++i) {
        const Vec2& a = pl[i];
        const Vec2& b = pl[(i + 1) % pl.size()];
        const int id = static_cast<int>(segs_.size());
        segs_.push_back({a, b});
        const int x0 = cx(std::min(a.x(), b.x())), x1 = cx(std::max(a.x(), b.x()));
        const int y0 = cy(std::min(a.y(), b.y())), y1 = cy(std::max(a.y(), b.y()));
        for (int y = y0; y <= y1; ++y)
          for (int x = x0; x <= x1; ++x) cells_[static_cast<std::size_t>(y) * nx_ + x].push_back(id);
      }
    }
  }

  double nearest(const Vec2& p) const {
    const int px = cx(p.x()), py = cy(p.y());
    double best = kInf;
    const int max_ring = std::max(nx_, ny_);
    for (int r = 0; r <= max_ring; ++r) {
      if (best <= (r - 1) * cell_) break;
      for (int y = py - r; y <= py + r; ++y) {
        if (y < 0 || y >= ny_) continue;
        const bool edge_row = (y == py - r || y == py + r);
        for (int x = px - r; x <= px + r; x += (edge_row ? 1 : 2 * std::max(r, 1))) {
          if (x < 0 || x >= nx_) continue;
          for (int id : cells_[static_cast<std::size_t>(y) * nx_ + x])
            best = std::min(best, point_segment_distance(p, segs_[id][0], segs_[id][1]));
          if (r == 0) break;
        }
      }
    }
    return best;
  }

 private:
  int cx(double x) const { return std::clamp(static_cast<int>(std::floor((x - origin_.x()) / cell_)), 0, nx_ - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>(std::floor((y - origin_.y()) / cell_)), 0, ny_ - 1); }

  Vec2 origin_;
  double cell_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::array<Vec2, 2>> segs_;
  std::vector<std::vector<int>> cells_;
};

double group_distance(const std::vector<Toolpath>& a, const std::vector<Toolpath>& b, double spacing) {
  std::vector<std::vector<Vec2>> ra, rb;
  std::vector<char> ca, cb;
  Vec2 lo = Vec2::Constant(kInf), hi = Vec2::Constant(-kInf);
  auto collect = [&](const std::vector<Toolpath>& src, std::vector<std::vector<Vec2>>& dst, std::vector<char>& cl) {
    for (const auto& p : src) {
      if (p.points.size() < 2) continue;
      dst.push_back(resample_polyline(p.points, p.closed, spacing / 4.0));
      cl.push_back(p.closed ? 1 : 0);
      for (const auto& q : dst.back()) {
        lo = lo.cwiseMin(q);
        hi = hi.cwiseMax(q);
      }
    }
  };
  collect(a, ra, ca);
  collect(b, rb, cb);
  if (ra.empty() || rb.empty()) return kInf;

  const double cell = std::max(spacing, 1e-9);
  const SegmentGrid grid_a(ra, ca, lo, hi, cell);
  const SegmentGrid grid_b(rb, cb, lo, hi, cell);
  double best = kInf;
  for (const auto& pl : ra)
    for (const auto& p : pl) best = std::min(best, grid_b.nearest(p));
  for (const auto& pl : rb)
    for (const auto& p : pl) best = std::min(best, grid_a.nearest(p));
  return best;
}

}  // namespace

std::vector<Toolpath> extract_isocurves(const LayerMesh& layer, std::span<const double> values_in, double isovalue,
                                        PathKind kind) {
  if (values_in.size() != layer.num_vertices())
    throw std::invalid_argument("extract_isocurves: value count does not match vertex count");
  const auto [lo, hi] = finite_range(values_in);
  if (!(hi > lo) || !(isovalue > lo && isovalue < hi)) return {};

  std::vector<double> values(values_in.begin(), values_in.end());
  for (auto& v : values)
    if (v == isovalue) v += 1e-9 * (hi - lo);

  const auto& topo = layer.topology;
  const std::size_t ne = topo.edges.size();
  std::vector<char> crossed(ne, 0);
  std::vector<Vec2> crossing(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const int a = topo.edges[e][0], b = topo.edges[e][1];
    const double va = values[a], vb = values[b];
    if (!std::isfinite(va) || !std::isfinite(vb)) continue;
    if ((va < isovalue) == (vb < isovalue)) continue;
    const double t = (isovalue - va) / (vb - va);
    crossed[e] = 1;
    crossing[e] = layer.vertices[a] + t * (layer.vertices[b] - layer.vertices[a]);
  }

  // Each crossed face links exactly two crossed edges.
  std::vector<std::array<int, 2>> edge_faces(ne, {-1, -1});
  std::vector<std::array<int, 2>> face_link(layer.num_faces(), {-1, -1});
  std::vector<int> crossed_faces;
  for (std::size_t f = 0; f < layer.num_faces(); ++f) {
    const auto& t = layer.triangles[f];
    if (!std::isfinite(values[t[0]]) || !std::isfinite(values[t[1]]) || !std::isfinite(values[t[2]])) continue;
    int k = 0;
    for (int e : topo.face_edges[f])
      if (crossed[e] && k < 2) face_link[f][k++] = e;
    if (k != 2) continue;
    crossed_faces.push_back(static_cast<int>(f));
    for (int e : face_link[f]) {
      auto& ef = edge_faces[e];
      (ef[0] < 0 ? ef[0] : ef[1]) = static_cast<int>(f);
    }
  }

  std::vector<char> face_used(layer.num_faces(), 0);
  std::vector<Toolpath> curves;

  auto walk = [&](int start_edge, int first_face, bool closed) {
    Toolpath path;
    path.kind = kind;
    path.closed = closed;
    path.isovalue = isovalue;
    path.points.push_back(crossing[start_edge]);
    int edge = start_edge, face = first_face;
    while (face >= 0 && !face_used[face]) {
      face_used[face] = 1;
      const int next = face_link[face][0] == edge ? face_link[face][1] : face_link[face][0];
      if (closed && next == start_edge) break;
      path.points.push_back(crossing[next]);
      edge = next;
      face = edge_faces[edge][0] == face ? edge_faces[edge][1] : edge_faces[edge][0];
    }
    drop_near_duplicates(path.points, closed);
    if (path.points.size() >= 2) curves.push_back(std::move(path));
  };

  for (std::size_t e = 0; e < ne; ++e) {
    if (!crossed[e] || edge_faces[e][0] < 0 || edge_faces[e][1] >= 0) continue;
    if (face_used[edge_faces[e][0]]) continue;
    walk(static_cast<int>(e), edge_faces[e][0], false);
  }
  for (int f : crossed_faces) {
    if (face_used[f]) continue;
    const int e = face_link[f][0];
    const int other = edge_faces[e][0] == f ? edge_faces[e][1] : edge_faces[e][0];
    // Start on the shared edge so the loop closes back onto it.
    walk(e, other >= 0 ? other : f, true);
  }
  return curves;
}

std::vector<double> isovalue_ladder(double s_min, double s_max, int n) {
  std::vector<double> iso;
  iso.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) iso.push_back(s_min + (0.5 + i) / n * (s_max - s_min));
  return iso;
}

double min_neighbor_distance(const std::vector<std::vector<Toolpath>>& groups, double spacing) {
  if (groups.size() < 2) throw std::invalid_argument("min_neighbor_distance: need at least two isovalue groups");
  if (!(spacing > 0.0)) throw std::invalid_argument("min_neighbor_distance: spacing must be positive");
  double best = kInf;
  for (std::size_t i = 0; i + 1 < groups.size(); ++i)
    if (!groups[i].empty() && !groups[i + 1].empty())
      best = std::min(best, group_distance(groups[i], groups[i + 1], spacing));
  return best;
}

std::vector<double> graph_distance(const LayerMesh& layer, std::span<const int> sources) {
  std::vector<double> dist(layer.num_vertices(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int s : sources) {
    dist[s] = 0.0;
    heap.emplace(0.0, s);
  }
  const auto& nbrs = layer.topology.vertex_neighbors;
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (int w : nbrs[v]) {
      const double nd = d + (layer.vertices[v] - layer.vertices[w]).norm();
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.emplace(nd, w);
      }
    }
  }
  return dist;
}

std::vector<std::vector<Toolpath>> extract_ladder(const LayerMesh& layer, std::span<const double> values, int n) {
  const auto [lo, hi] = finite_range(values);
  std::vector<std::vector<Toolpath>> groups;
  for (double iso : isovalue_ladder(lo, hi, n)) {
    auto curves = extract_isocurves(layer, values, iso, PathKind::stress);
    std::erase_if(curves, [](const Toolpath& c) { return c.points.size() < 3; });
    groups.push_back(std::move(curves));
  }
  return groups;
}

LadderResult adaptive_ladder(const LayerMesh& component, std::span<const double> values, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("adaptive_extract: spacing must be positive");
  LadderResult res;
  const auto [lo, hi] = finite_range(values);
  if (!(hi > lo)) {
    res.warnings.push_back("constant scalar field; no isocurves extracted");
    return res;
  }
  const double range = hi - lo;
  std::vector<int> min_set, max_set;
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (component.topology.vertex_component[v] < 0 || !std::isfinite(values[v])) continue;
    if (std::abs(values[v] - lo) < 1e-9 * range) min_set.push_back(static_cast<int>(v));
    if (std::abs(values[v] - hi) < 1e-9 * range) max_set.push_back(static_cast<int>(v));
  }
  const auto dist = graph_distance(component, min_set);
  double D = 0.0;
  for (int v : max_set)
    if (std::isfinite(dist[v])) D = std::max(D, dist[v]);
  res.geodesic_extent = D;

  // Comparisons carry a relative tolerance so that spacing exactly equal to W
  // counts as too dense despite round-off.
  auto sparse_enough = [&](double d) { return d > spacing * (1.0 + 1e-9); };
  auto measure = [&](int n) {
    res.groups = extract_ladder(component, values, n);
    res.n = n;
    res.distance = n >= 2 ? min_neighbor_distance(res.groups, spacing) : kInf;
  };
  constexpr int kMaxCurves = 100000;

  measure(std::max(1, static_cast<int>(std::ceil(D / spacing))));
  while (sparse_enough(res.distance)) {
    const double grown = std::isinf(res.distance) ? 2.0 * res.n : std::ceil(res.n * res.distance / spacing);
    if (grown <= res.n) break;
    if (grown > kMaxCurves) {
      res.warnings.push_back("isocurve count capped at " + std::to_string(kMaxCurves));
      break;
    }
    measure(static_cast<int>(grown));
  }
  while (!sparse_enough(res.distance) && res.n > 1) measure(res.n - 1);
  if (res.n == 1) res.warnings.push_back("domain thinner than W; single mid-isovalue curve kept");
  return res;
}

IsoExtraction adaptive_extract(const LayerMesh& layer, const ScalarField& s, double spacing) {
  IsoExtraction out;
  out.min_distance = kInf;
  for (const auto& comp : split_components(layer)) {
    std::vector<double> local(comp.vertex_map.size());
    for (std::size_t i = 0; i < local.size(); ++i) local[i] = s.values[comp.vertex_map[i]];
    auto res = adaptive_ladder(comp.mesh, local, spacing);
    out.isocurve_counts.push_back(res.n);
    out.min_distance = std::min(out.min_distance, res.distance);
    for (auto& g : res.groups)
      for (auto& c : g) out.paths.push_back(std::move(c));
    for (auto& w : res.warnings) out.warnings.push_back(std::move(w));
  }
  return out;
}

}  // namespace fibrepath
