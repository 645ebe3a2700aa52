#include "fibrepath/boundary.hpp"

#include "fibrepath/field2d.hpp"
#include "fibrepath/isopath.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace fibrepath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<int> select_boundary_edges(const LayerMesh& layer, std::span<const Box2> boxes) {
  std::vector<int> out;
  for (std::size_t e = 0; e < layer.boundary_edges.size(); ++e) {
    const auto& be = layer.boundary_edges[e];
    const Vec2 mid = 0.5 * (layer.vertices[be[0]] + layer.vertices[be[1]]);
    if (std::any_of(boxes.begin(), boxes.end(), [&](const Box2& b) { return b.contains(mid); }))
      out.push_back(static_cast<int>(e));
  }
  return out;
}

DistanceField heat_distance(const LayerMesh& layer, std::span<const int> source_edges, double t_scale) {
  if (source_edges.empty()) throw std::invalid_argument("heat_distance: empty source");
  if (!(t_scale > 0.0)) throw std::invalid_argument("heat_distance: t_scale must be positive");
  const std::size_t nv = layer.num_vertices();

  DistanceField df;
  df.source_edges.assign(source_edges.begin(), source_edges.end());
  std::vector<char> is_source(nv, 0);
  for (int e : source_edges) {
    if (e < 0 || static_cast<std::size_t>(e) >= layer.boundary_edges.size())
      throw std::invalid_argument("heat_distance: source edge index out of range");
    for (int v : layer.boundary_edges[e]) is_source[v] = 1;
  }
  for (std::size_t v = 0; v < nv; ++v)
    if (is_source[v]) df.source_vertices.push_back(static_cast<int>(v));

  const double h = layer.mean_edge_length();
  const double t = t_scale * h * h;

  // (M + t K) u = M u0 with lumped mass M and stiffness K.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * layer.num_faces());
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
  for (std::size_t f = 0; f < layer.num_faces(); ++f) {
    const auto& tri = layer.triangles[f];
    const auto g = shape_gradients(layer, f);
    const double area = layer.face_area[f];
    for (int a = 0; a < 3; ++a) {
      mass[tri[a]] += area / 3.0;
      for (int b = 0; b < 3; ++b) trips.emplace_back(tri[a], tri[b], t * area * g[a].dot(g[b]));
    }
  }
  for (std::size_t v = 0; v < nv; ++v)
    trips.emplace_back(static_cast<int>(v), static_cast<int>(v), mass[v] > 0.0 ? mass[v] : 1.0);
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nv));
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
  for (int v : df.source_vertices) rhs[v] = mass[v];

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw SolveError("heat_distance: heat-step factorization failed");
  const Eigen::VectorXd u = solver.solve(rhs);
  const std::vector<double> heat(u.data(), u.data() + u.size());

  std::vector<Vec2> dir(layer.num_faces(), Vec2::Zero());
  for (std::size_t f = 0; f < layer.num_faces(); ++f) {
    const Vec2 g = face_gradient(layer, f, heat);
    const double n = g.norm();
    if (n > 0.0) dir[f] = -g / n;
  }

  std::vector<std::pair<int, double>> pins;
  for (int v : df.source_vertices) pins.emplace_back(v, 0.0);
  df.values = fit_gradient_field(layer, dir, pins);
  for (std::size_t v = 0; v < nv; ++v) {
    if (std::isinf(df.values[v])) {
      if (layer.topology.vertex_component[v] >= 0) df.has_unreachable = true;
    } else {
      df.values[v] = std::max(0.0, df.values[v]);
    }
  }
  return df;
}

BoundaryCurves conformal_curves(const DistanceField& df, const LayerMesh& layer, double spacing) {
  BoundaryCurves out;
  if (df.empty()) return out;
  auto extract = [&](double level, std::vector<Toolpath>& dst, const char* name) {
    dst = extract_isocurves(layer, df.values, level, PathKind::boundary);
    std::erase_if(dst, [](const Toolpath& c) { return c.points.size() < 2; });
    if (dst.empty()) out.warnings.push_back(std::string("boundary curve at ") + name + " is empty");
  };
  extract(1.5 * spacing, out.inner, "1.5W");
  extract(2.5 * spacing, out.outer, "2.5W");
  return out;
}

namespace {

struct Piece {
  std::vector<Vec2> pts;
  bool closed = false;
  bool new_start = false;
  bool new_end = false;
  double iso = std::numeric_limits<double>::quiet_NaN();
};

double field_at(const FaceLocator& loc, const LayerMesh& layer, const std::vector<double>& values, const Vec2& p) {
  auto hit = loc.locate(p);
  if (!hit) return kInf;
  const auto& t = layer.triangles[hit->face];
  double v = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (!std::isfinite(values[t[k]])) return kInf;
    v += hit->bary[k] * values[t[k]];
  }
  return v;
}

void push_distinct(std::vector<Vec2>& pts, const Vec2& p) {
  if (pts.empty() || (pts.back() - p).norm() > 1e-9) pts.push_back(p);
}

// Keeps the parts of an (already opened) polyline where d >= level.
void clip_polyline(const std::vector<Vec2>& pts, const std::vector<double>& d, double level, bool ends_are_new,
                   double iso, std::vector<Piece>& out) {
  Piece cur;
  bool open = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool inside = d[i] >= level;
    if (i > 0) {
      const bool prev_inside = d[i - 1] >= level;
      if (prev_inside != inside) {
        const double t = (level - d[i - 1]) / (d[i] - d[i - 1]);
        const Vec2 c = pts[i - 1] + t * (pts[i] - pts[i - 1]);
        if (prev_inside) {
          push_distinct(cur.pts, c);
          cur.new_end = true;
          out.push_back(std::move(cur));
          cur = Piece{};
          open = false;
        } else {
          cur = Piece{};
          cur.iso = iso;
          cur.new_start = true;
          cur.pts.push_back(c);
          open = true;
        }
      }
    }
    if (inside) {
      if (!open) {
        cur = Piece{};
        cur.iso = iso;
        cur.new_start = ends_are_new;
        open = true;
      }
      push_distinct(cur.pts, pts[i]);
    }
  }
  if (open) {
    cur.new_end = ends_are_new;
    out.push_back(std::move(cur));
  }
}

struct CurveParam {
  std::vector<double> cum;  // arc length at each vertex
  double perimeter = 0.0;
};

CurveParam parametrize(const Toolpath& c) {
  CurveParam p;
  p.cum.resize(c.points.size(), 0.0);
  for (std::size_t i = 1; i < c.points.size(); ++i) p.cum[i] = p.cum[i - 1] + (c.points[i] - c.points[i - 1]).norm();
  p.perimeter = p.cum.back() + (c.closed ? (c.points.front() - c.points.back()).norm() : 0.0);
  return p;
}

struct Projection {
  int curve = -1;
  double s = 0.0;
  double dist = kInf;
};

Projection project_onto(const std::vector<Toolpath>& curves, const std::vector<CurveParam>& params, const Vec2& p) {
  Projection best;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& pts = curves[c].points;
    const std::size_t nseg = curves[c].closed ? pts.size() : pts.size() - 1;
    for (std::size_t i = 0; i < nseg; ++i) {
      const Vec2& a = pts[i];
      const Vec2& b = pts[(i + 1) % pts.size()];
      double t = 0.0;
      const Vec2 q = closest_point_on_segment(p, a, b, &t);
      const double dist = (p - q).norm();
      if (dist < best.dist) {
        best.dist = dist;
        best.curve = static_cast<int>(c);
        best.s = params[c].cum[i] + t * (b - a).norm();
      }
    }
  }
  return best;
}

// Curve vertices strictly between arc parameters s0 and s1, walking forward
// (dir = +1) or backward (dir = -1), wrapping on closed curves.
std::vector<Vec2> arc_interior(const Toolpath& c, const CurveParam& p, double s0, double s1, int dir) {
  std::vector<Vec2> out;
  const std::size_t n = c.points.size();
  if (!c.closed) {
    const double lo = std::min(s0, s1), hi = std::max(s0, s1);
    for (std::size_t i = 0; i < n; ++i)
      if (p.cum[i] > lo && p.cum[i] < hi) out.push_back(c.points[i]);
    if (s0 > s1) std::reverse(out.begin(), out.end());
    return out;
  }
  const double P = p.perimeter;
  auto forward_offset = [&](double s) {  // distance from s0 walking in `dir`
    double d = dir > 0 ? s - s0 : s0 - s;
    d = std::fmod(d, P);
    if (d < 0) d += P;
    return d;
  };
  const double span = forward_offset(s1);
  std::vector<std::pair<double, std::size_t>> hits;
  for (std::size_t i = 0; i < n; ++i) {
    const double off = forward_offset(p.cum[i]);
    if (off > 1e-12 && off < span - 1e-12) hits.emplace_back(off, i);
  }
  std::sort(hits.begin(), hits.end());
  for (const auto& [off, i] : hits) out.push_back(c.points[i]);
  return out;
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross2(b - a, c - a), d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c), d4 = cross2(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

ConnectionResult truncate_and_connect(const std::vector<Toolpath>& stress, const BoundaryCurves& bnd,
                                      const DistanceField& df, const LayerMesh& layer, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("truncate_and_connect: spacing must be positive");
  ConnectionResult res;
  const double level = 2.5 * spacing;
  const bool truncate = !df.empty();

  // Step 2: clip against d >= 2.5W.
  std::vector<Piece> pieces;
  if (truncate) {
    const FaceLocator loc(layer);
    for (const auto& c : stress) {
      std::vector<double> d(c.points.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = field_at(loc, layer, df.values, c.points[i]);
      const bool all_in = std::all_of(d.begin(), d.end(), [&](double v) { return v >= level; });
      if (all_in) {
        pieces.push_back({c.points, c.closed, false, false, c.isovalue});
        continue;
      }
      if (!c.closed) {
        clip_polyline(c.points, d, level, false, c.isovalue, pieces);
        continue;
      }
      // Open the loop at an outside point and clip it as a polyline.
      const auto first_out =
          static_cast<std::size_t>(std::find_if(d.begin(), d.end(), [&](double v) { return v < level; }) - d.begin());
      std::vector<Vec2> pts;
      std::vector<double> dd;
      for (std::size_t k = 0; k <= c.points.size(); ++k) {
        const std::size_t i = (first_out + k) % c.points.size();
        pts.push_back(c.points[i]);
        dd.push_back(d[i]);
      }
      clip_polyline(pts, dd, level, false, c.isovalue, pieces);
    }
  } else {
    for (const auto& c : stress) pieces.push_back({c.points, c.closed, false, false, c.isovalue});
  }
  std::erase_if(pieces, [](const Piece& p) { return p.pts.size() < 2 || polyline_length(p.pts, false) <= 1e-9; });

  // Links between piece ends; node = 2 * piece + (0 start | 1 end).
  const std::size_t nn = 2 * pieces.size();
  std::vector<int> link(nn, -1);
  std::vector<std::vector<Vec2>> link_pts(nn);
  std::vector<char> link_straight(nn, 0);
  auto end_point = [&](int node) -> const Vec2& {
    const auto& p = pieces[node / 2].pts;
    return node % 2 == 0 ? p.front() : p.back();
  };

  // Step 3: pair new endpoints along the 2.5W curve.
  if (truncate && !bnd.outer.empty()) {
    std::vector<CurveParam> params;
    for (const auto& c : bnd.outer) params.push_back(parametrize(c));
    struct Endpoint {
      int node;
      Projection proj;
    };
    std::vector<Endpoint> ends;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (pieces[i].closed) continue;
      if (pieces[i].new_start) ends.push_back({static_cast<int>(2 * i), {}});
      if (pieces[i].new_end) ends.push_back({static_cast<int>(2 * i + 1), {}});
    }
    for (auto& e : ends) e.proj = project_onto(bnd.outer, params, end_point(e.node));

    std::vector<std::tuple<double, int, int, int>> cand;  // arc length, i, j, direction
    for (std::size_t i = 0; i < ends.size(); ++i)
      for (std::size_t j = i + 1; j < ends.size(); ++j) {
        const auto& a = ends[i].proj;
        const auto& b = ends[j].proj;
        if (a.curve < 0 || a.curve != b.curve) continue;
        const auto& curve = bnd.outer[a.curve];
        const double direct = std::abs(b.s - a.s);
        int dir = b.s >= a.s ? 1 : -1;
        double len = direct;
        if (curve.closed && params[a.curve].perimeter - direct < direct) {
          len = params[a.curve].perimeter - direct;
          dir = -dir;
        }
        cand.emplace_back(len, static_cast<int>(i), static_cast<int>(j), dir);
      }
    std::sort(cand.begin(), cand.end());
    std::vector<char> used(ends.size(), 0);
    for (const auto& [len, i, j, dir] : cand) {
      if (used[i] || used[j]) continue;
      used[i] = used[j] = 1;
      const int a = ends[i].node, b = ends[j].node;
      const int c = ends[i].proj.curve;
      auto arc = arc_interior(bnd.outer[c], params[c], ends[i].proj.s, ends[j].proj.s, dir);
      link[a] = b;
      link[b] = a;
      link_pts[a] = arc;
      std::reverse(arc.begin(), arc.end());
      link_pts[b] = std::move(arc);
      ++res.arc_connectors;
    }
    for (std::size_t i = 0; i < ends.size(); ++i)
      if (!used[i]) ++res.unpaired_endpoints;
    if (res.unpaired_endpoints > 0)
      res.warnings.push_back(std::to_string(res.unpaired_endpoints) + " truncated endpoint(s) without an arc partner");
  }

  // Step 4: join remaining open ends closer than 2W, shortest gap first.
  {
    std::vector<int> free_nodes;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (pieces[i].closed) continue;
      for (int k = 0; k < 2; ++k)
        if (link[2 * i + k] < 0) free_nodes.push_back(static_cast<int>(2 * i + k));
    }
    std::vector<std::tuple<double, int, int>> cand;
    for (std::size_t i = 0; i < free_nodes.size(); ++i)
      for (std::size_t j = i + 1; j < free_nodes.size(); ++j) {
        const int a = free_nodes[i], b = free_nodes[j];
        if (a / 2 == b / 2 && pieces[a / 2].pts.size() < 3) continue;
        const double gap = (end_point(a) - end_point(b)).norm();
        if (gap < 2.0 * spacing) cand.emplace_back(gap, a, b);
      }
    std::sort(cand.begin(), cand.end());
    // First pass keeps chains open so equal gaps give serpentines, not
    // two-curve loops; the second pass may close cycles.
    std::vector<int> root(pieces.size());
    for (std::size_t i = 0; i < root.size(); ++i) root[i] = static_cast<int>(i);
    auto find = [&](int x) {
      while (root[x] != x) x = root[x] = root[root[x]];
      return x;
    };
    for (std::size_t n = 0; n < nn; ++n)
      if (link[n] >= 0) root[find(static_cast<int>(n / 2))] = find(link[n] / 2);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& [gap, a, b] : cand) {
        if (link[a] >= 0 || link[b] >= 0) continue;
        if (pass == 0 && find(a / 2) == find(b / 2)) continue;
        link[a] = b;
        link[b] = a;
        root[find(a / 2)] = find(b / 2);
        link_straight[a] = link_straight[b] = 1;
        ++res.straight_connectors;
      }
  }

  // Assemble chains: open chains from free ends first, then cycles.
  std::vector<char> visited(pieces.size(), 0);
  auto append_piece = [&](Toolpath& path, int entry_node) {
    const auto& pts = pieces[entry_node / 2].pts;
    if (entry_node % 2 == 0) {
      for (const auto& p : pts) path.points.push_back(p);
    } else {
      for (auto it = pts.rbegin(); it != pts.rend(); ++it) path.points.push_back(*it);
    }
    return entry_node ^ 1;  // exit node
  };
  auto assemble = [&](int start_node, bool cyclic) {
    Toolpath path;
    path.kind = PathKind::stress;
    path.closed = cyclic;
    int node = start_node;
    int count = 0;
    while (true) {
      visited[node / 2] = 1;
      ++count;
      const int exit = append_piece(path, node);
      const int next = link[exit];
      if (next < 0) break;
      const std::size_t from = path.points.size() - 1;
      for (const auto& q : link_pts[exit]) path.points.push_back(q);
      if (next / 2 == start_node / 2 && next == start_node) {
        path.connectors.push_back({from, path.points.size()});  // closes onto point 0
        path.closed = true;
        break;
      }
      path.connectors.push_back({from, path.points.size()});
      node = next;
    }
    path.isovalue = count == 1 ? pieces[start_node / 2].iso : std::numeric_limits<double>::quiet_NaN();
    res.paths.push_back(std::move(path));
  };
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (visited[i]) continue;
    if (pieces[i].closed) {
      visited[i] = 1;
      Toolpath path;
      path.kind = PathKind::stress;
      path.closed = true;
      path.points = pieces[i].pts;
      path.isovalue = pieces[i].iso;
      res.paths.push_back(std::move(path));
      continue;
    }
    if (link[2 * i] < 0) assemble(static_cast<int>(2 * i), false);
    else if (link[2 * i + 1] < 0) assemble(static_cast<int>(2 * i + 1), false);
  }
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (!visited[i]) assemble(static_cast<int>(2 * i), true);

  // Clean up duplicate points at junctions and closure; keep connector ranges valid.
  for (auto& path : res.paths) {
    std::vector<Vec2> pts;
    std::vector<std::size_t> remap(path.points.size() + 1);
    for (std::size_t i = 0; i < path.points.size(); ++i) {
      if (pts.empty() || (pts.back() - path.points[i]).norm() > 1e-9) pts.push_back(path.points[i]);
      remap[i] = pts.size() - 1;
    }
    std::size_t n = pts.size();
    // A duplicated closing point is dropped; indices that referred to it now
    // equal the new size, which is the closure index.
    if (path.closed && n > 1 && (pts.front() - pts.back()).norm() <= 1e-9) {
      pts.pop_back();
      --n;
    }
    remap[path.points.size()] = n;
    for (auto& c : path.connectors) {
      c[0] = std::min(remap[c[0]], n);
      c[1] = c[1] >= path.points.size() ? n : remap[c[1]];
    }
    path.points = std::move(pts);
  }
  std::erase_if(res.paths, [](const Toolpath& p) { return p.points.size() < 2; });

  // Report straight connectors crossing other path segments.
  for (const auto& path : res.paths)
    for (const auto& c : path.connectors) {
      if (c[1] != c[0] + 1) continue;  // arcs follow the level set
      const Vec2& a = path.points[c[0]];
      const Vec2& b = path.points[c[1] % path.points.size()];
      for (const auto& other : res.paths) {
        const std::size_t nseg = other.closed ? other.points.size() : other.points.size() - 1;
        for (std::size_t i = 0; i < nseg; ++i)
          if (segments_cross(a, b, other.points[i], other.points[(i + 1) % other.points.size()]))
            ++res.connector_crossings;
      }
    }
  if (res.connector_crossings > 0)
    res.warnings.push_back(std::to_string(res.connector_crossings) + " connector crossing(s) with other paths");

  for (const auto& c : bnd.inner) res.paths.push_back(c);
  return res;
}

LengthFilterResult filter_min_length(std::vector<Toolpath> paths, double min_length) {
  if (!(min_length >= 0.0)) throw std::invalid_argument("filter_min_length: minimum length must be >= 0");
  LengthFilterResult res;
  res.length_before = total_length(paths);
  for (auto& p : paths) {
    if (p.length() >= min_length) res.kept.push_back(std::move(p));
    else ++res.removed_count;
  }
  res.length_after = total_length(res.kept);
  return res;
}

}  // namespace fibrepath
