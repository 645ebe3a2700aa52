#include "fibrepath/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fibrepath {

SymTensor3 kirsch_stress(const Vec2& p, double S, double a) {
  const double r = p.norm();
  if (r < a) throw std::domain_error("kirsch_stress: point lies inside the hole");
  const double th = std::atan2(p.y(), p.x());
  const double q2 = (a * a) / (r * r);
  const double q4 = q2 * q2;
  const double c2 = std::cos(2 * th), s2 = std::sin(2 * th);
  const double srr = S / 2 * (1 - q2) + S / 2 * (1 - 4 * q2 + 3 * q4) * c2;
  const double stt = S / 2 * (1 + q2) - S / 2 * (1 + 3 * q4) * c2;
  const double srt = -S / 2 * (1 + 2 * q2 - 3 * q4) * s2;

  const double c = std::cos(th), s = std::sin(th);
  SymTensor3 t;
  t.xx = srr * c * c + stt * s * s - 2 * srt * s * c;
  t.yy = srr * s * s + stt * c * c + 2 * srt * s * c;
  t.xy = (srr - stt) * s * c + srt * (c * c - s * s);
  return t;
}

SymTensor3 cantilever_stress(const Vec2& p, double P, double L, double b, double h) {
  const double I = b * h * h * h / 12.0;
  SymTensor3 t;
  t.xx = -P * (L - p.x()) * p.y() / I;
  t.xy = P * (h * h / 4.0 - p.y() * p.y()) / (2.0 * I);
  return t;
}

std::optional<SolidKind> parse_solid_kind(std::string_view s) {
  if (s == "box") return SolidKind::box;
  if (s == "plate_with_hole" || s == "kirsch" || s == "plate") return SolidKind::plate_with_hole;
  if (s == "cantilever") return SolidKind::cantilever;
  return std::nullopt;
}

const char* to_string(SolidKind k) {
  switch (k) {
    case SolidKind::box: return "box";
    case SolidKind::plate_with_hole: return "plate_with_hole";
    case SolidKind::cantilever: return "cantilever";
  }
  return "?";
}

PlanarMesh rectangle_mesh(const Vec2& lo, const Vec2& hi, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("rectangle_mesh: need at least one cell per axis");
  PlanarMesh m;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny);
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

namespace {

// Triangulates the band between two closed rings whose vertices are listed
// by increasing angle starting at angle 0.
void stitch_rings(PlanarMesh& m, const std::vector<int>& inner, const std::vector<int>& outer) {
  const std::size_t ni = inner.size(), no = outer.size();
  auto angle = [&](const std::vector<int>& ring, std::size_t k) {
    const std::size_t n = ring.size();
    const Vec2& p = m.vertices[ring[k % n]];
    double a = std::atan2(p.y(), p.x());
    if (a < -1e-12) a += 2 * std::numbers::pi;
    if (k >= n) a += 2 * std::numbers::pi;
    return a;
  };
  std::size_t i = 0, o = 0;
  while (i < ni || o < no) {
    const bool advance_inner = o >= no || (i < ni && angle(inner, i + 1) <= angle(outer, o + 1));
    if (advance_inner) {
      m.triangles.push_back({inner[i % ni], inner[(i + 1) % ni], outer[o % no]});
      ++i;
    } else {
      m.triangles.push_back({inner[i % ni], outer[(o + 1) % no], outer[o % no]});
      ++o;
    }
  }
}

}  // namespace

PlanarMesh disk_mesh(double radius, int rings) {
  if (rings < 1) throw std::invalid_argument("disk_mesh: need at least one ring");
  PlanarMesh m;
  m.vertices.emplace_back(0.0, 0.0);
  std::vector<int> prev;
  for (int k = 1; k <= rings; ++k) {
    std::vector<int> ring;
    const int n = 6 * k;
    const double r = radius * k / rings;
    for (int j = 0; j < n; ++j) {
      const double a = 2 * std::numbers::pi * j / n;
      ring.push_back(static_cast<int>(m.vertices.size()));
      m.vertices.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    if (k == 1) {
      for (int j = 0; j < n; ++j) m.triangles.push_back({0, ring[j], ring[(j + 1) % n]});
    } else {
      stitch_rings(m, prev, ring);
    }
    prev = std::move(ring);
  }
  return m;
}

PlanarMesh plate_with_hole_mesh(double size_x, double size_y, double hole_radius, double target_edge) {
  const double hx = size_x / 2, hy = size_y / 2, a = hole_radius;
  if (!(a > 0 && a < std::min(hx, hy))) throw std::invalid_argument("plate_with_hole_mesh: hole does not fit");
  const double mean_outer = 0.5 * (hx + hy);
  const int ntheta = std::max(16, static_cast<int>(std::ceil(std::numbers::pi * (a + mean_outer) / target_edge)));
  const int nr = std::max(2, static_cast<int>(std::ceil((mean_outer - a) / target_edge)));

  // Outer ring angles: corners included, points spread per side by angle.
  const double tc = std::atan2(hy, hx);
  const double pi = std::numbers::pi;
  const double sector_start[4] = {-tc, tc, pi - tc, pi + tc};
  const double sector_len[4] = {2 * tc, pi - 2 * tc, 2 * tc, pi - 2 * tc};
  std::vector<double> angles;
  for (int s = 0; s < 4; ++s) {
    const int count = std::max(2, static_cast<int>(std::lround(ntheta * sector_len[s] / (2 * pi))));
    for (int k = 0; k < count; ++k) angles.push_back(sector_start[s] + sector_len[s] * k / count);
  }
  const int na = static_cast<int>(angles.size());

  PlanarMesh m;
  for (int i = 0; i < na; ++i) {
    const double c = std::cos(angles[i]), s = std::sin(angles[i]);
    const double ro = std::min(std::abs(c) > 1e-15 ? hx / std::abs(c) : 1e300, std::abs(s) > 1e-15 ? hy / std::abs(s) : 1e300);
    Vec2 outer(ro * c, ro * s);
    // Snap corner rays exactly onto the corner.
    if (std::abs(std::abs(outer.x()) - hx) < 1e-9 * hx) outer.x() = std::copysign(hx, outer.x());
    if (std::abs(std::abs(outer.y()) - hy) < 1e-9 * hy) outer.y() = std::copysign(hy, outer.y());
    const Vec2 inner(a * c, a * s);
    for (int j = 0; j <= nr; ++j) m.vertices.push_back(inner + (outer - inner) * (static_cast<double>(j) / nr));
  }
  auto id = [&](int i, int j) { return (i % na) * (nr + 1) + j; };
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nr; ++j) {
      const int p00 = id(i, j), p10 = id(i + 1, j), p11 = id(i + 1, j + 1), p01 = id(i, j + 1);
      if ((m.vertices[p00] - m.vertices[p11]).squaredNorm() <= (m.vertices[p10] - m.vertices[p01]).squaredNorm()) {
        m.triangles.push_back({p00, p10, p11});
        m.triangles.push_back({p00, p11, p01});
      } else {
        m.triangles.push_back({p00, p10, p01});
        m.triangles.push_back({p10, p11, p01});
      }
    }
  return m;
}

TetMesh extrude(const PlanarMesh& base, double height, int layers) {
  if (layers < 1 || !(height > 0)) throw std::invalid_argument("extrude: invalid height or layer count");
  const int nv = static_cast<int>(base.vertices.size());
  TetMesh mesh;
  for (int l = 0; l <= layers; ++l)
    for (const auto& p : base.vertices) mesh.vertices.emplace_back(p.x(), p.y(), height * l / layers);

  for (int l = 0; l < layers; ++l)
    for (auto t : base.triangles) {
      std::sort(t.begin(), t.end());
      const int i0 = l * nv + t[0], j0 = l * nv + t[1], k0 = l * nv + t[2];
      const int i1 = i0 + nv, j1 = j0 + nv, k1 = k0 + nv;
      // Side quads are split from the larger bottom index to the smaller top
      // index, which matches across neighbouring prisms.
      for (std::array<int, 4> tet : {std::array<int, 4>{i0, j0, k0, i1}, std::array<int, 4>{j0, k0, i1, j1},
                                     std::array<int, 4>{k0, i1, j1, k1}}) {
        mesh.tets.push_back(tet);
        if (mesh.signed_volume(mesh.tets.size() - 1) < 0) std::swap(mesh.tets.back()[0], mesh.tets.back()[1]);
      }
    }
  return mesh;
}

LayerMesh planar_layer(const PlanarMesh& m, double z) { return LayerMesh::from_triangles(z, m.vertices, m.triangles); }

TestSolid build_test_solid(const SolidSpec& spec, double target_edge) {
  if (!(target_edge > 0)) throw std::invalid_argument("build_test_solid: target edge must be positive");
  if (!(spec.size_x > 0 && spec.size_y > 0 && spec.size_z > 0))
    throw std::invalid_argument("build_test_solid: dimensions must be positive");
  double feature = std::min(spec.size_x, spec.size_y);
  if (spec.kind == SolidKind::plate_with_hole)
    feature = std::min({feature, spec.hole_radius, std::min(spec.size_x, spec.size_y) / 2 - spec.hole_radius});
  if (target_edge > feature)
    throw std::invalid_argument("build_test_solid: target edge " + format_double(target_edge) +
                                " exceeds feature size " + format_double(feature));

  PlanarMesh base;
  const auto cells = [&](double len) { return std::max(1, static_cast<int>(std::ceil(len / target_edge - 1e-9))); };
  switch (spec.kind) {
    case SolidKind::box:
      base = rectangle_mesh({0, 0}, {spec.size_x, spec.size_y}, cells(spec.size_x), cells(spec.size_y));
      break;
    case SolidKind::cantilever:
      base = rectangle_mesh({0, -spec.size_y / 2}, {spec.size_x, spec.size_y / 2}, cells(spec.size_x),
                            cells(spec.size_y));
      break;
    case SolidKind::plate_with_hole:
      base = plate_with_hole_mesh(spec.size_x, spec.size_y, spec.hole_radius, target_edge);
      break;
  }
  TestSolid solid;
  solid.mesh = extrude(base, spec.size_z, cells(spec.size_z));
  solid.tensors.reserve(solid.mesh.num_tets());
  for (std::size_t t = 0; t < solid.mesh.num_tets(); ++t) {
    const Vec3 c = solid.mesh.centroid(t);
    Vec2 p(c.x(), c.y());
    switch (spec.kind) {
      case SolidKind::box: solid.tensors.push_back({spec.stress, 0, 0, 0, 0, 0}); break;
      case SolidKind::cantilever:
        solid.tensors.push_back(cantilever_stress(p, spec.load, spec.size_x, spec.size_z, spec.size_y));
        break;
      case SolidKind::plate_with_hole:
        // Centroids near the polygonal hole may sit just inside the true circle.
        if (p.norm() < spec.hole_radius) p *= spec.hole_radius / p.norm();
        solid.tensors.push_back(kirsch_stress(p, spec.stress, spec.hole_radius));
        break;
    }
  }
  return solid;
}

namespace {

struct Crossing {
  Vec2 point;
  double x = 0;   // coordinate along the scan direction
  int loop = 0;
  double param = 0;  // edge index + fraction along the loop
  int line = 0;
  int interval = -1;
};

struct ScanData {
  std::vector<std::vector<Vec2>> loops;
  std::vector<Crossing> crossings;
  std::vector<std::array<int, 2>> intervals;  // crossing ids, in scan direction
  std::vector<int> interval_line;
};

ScanData scan(const LayerMesh& layer, double spacing, double angle_deg) {
  if (!(spacing > 0)) throw std::invalid_argument("zigzag: spacing must be positive");
  ScanData sd;
  for (const auto& loop : boundary_loops(layer)) {
    std::vector<Vec2> pts;
    for (int v : loop) pts.push_back(layer.vertices[v]);
    sd.loops.push_back(std::move(pts));
  }
  if (sd.loops.empty()) return sd;

  const double th = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(th), s = std::sin(th);
  auto along = [&](const Vec2& p) { return c * p.x() + s * p.y(); };
  auto across = [&](const Vec2& p) { return -s * p.x() + c * p.y(); };

  double lo = INFINITY, hi = -INFINITY;
  for (const auto& l : sd.loops)
    for (const auto& p : l) {
      lo = std::min(lo, across(p));
      hi = std::max(hi, across(p));
    }

  for (int k = 0;; ++k) {
    const double y = lo + (k + 0.5) * spacing;
    if (y >= hi) break;
    std::vector<int> ids;
    for (std::size_t li = 0; li < sd.loops.size(); ++li) {
      const auto& l = sd.loops[li];
      for (std::size_t e = 0; e < l.size(); ++e) {
        const Vec2& a = l[e];
        const Vec2& b = l[(e + 1) % l.size()];
        const double ya = across(a), yb = across(b);
        if ((ya > y) == (yb > y)) continue;
        const double t = (y - ya) / (yb - ya);
        Crossing cr;
        cr.point = a + t * (b - a);
        cr.x = along(cr.point);
        cr.loop = static_cast<int>(li);
        cr.param = static_cast<double>(e) + t;
        cr.line = k;
        ids.push_back(static_cast<int>(sd.crossings.size()));
        sd.crossings.push_back(cr);
      }
    }
    std::sort(ids.begin(), ids.end(), [&](int a, int b) { return sd.crossings[a].x < sd.crossings[b].x; });
    for (std::size_t i = 0; i + 1 < ids.size(); i += 2) {
      const int iv = static_cast<int>(sd.intervals.size());
      sd.intervals.push_back({ids[i], ids[i + 1]});
      sd.interval_line.push_back(k);
      sd.crossings[ids[i]].interval = iv;
      sd.crossings[ids[i + 1]].interval = iv;
    }
  }
  return sd;
}

}  // namespace

std::vector<ScanInterval> scanline_intervals(const LayerMesh& layer, double spacing, double angle_deg) {
  const ScanData sd = scan(layer, spacing, angle_deg);
  std::vector<ScanInterval> out;
  for (std::size_t i = 0; i < sd.intervals.size(); ++i)
    out.push_back({sd.interval_line[i], sd.crossings[sd.intervals[i][0]].point, sd.crossings[sd.intervals[i][1]].point});
  return out;
}

std::vector<Toolpath> zigzag_infill(const LayerMesh& layer, double spacing, double angle_deg) {
  const ScanData sd = scan(layer, spacing, angle_deg);
  std::vector<Toolpath> paths;
  if (sd.intervals.empty()) return paths;

  // Cyclic order of crossings along each loop.
  std::vector<std::vector<int>> on_loop(sd.loops.size());
  for (std::size_t i = 0; i < sd.crossings.size(); ++i)
    if (sd.crossings[i].interval >= 0) on_loop[sd.crossings[i].loop].push_back(static_cast<int>(i));
  std::vector<int> pos(sd.crossings.size(), -1);
  for (auto& ids : on_loop) {
    std::sort(ids.begin(), ids.end(), [&](int a, int b) { return sd.crossings[a].param < sd.crossings[b].param; });
    for (std::size_t k = 0; k < ids.size(); ++k) pos[ids[k]] = static_cast<int>(k);
  }

  // Loop vertices strictly between two crossings, walking forward or backward.
  auto walk = [&](const Crossing& from, const Crossing& to, bool forward) {
    const auto& l = sd.loops[from.loop];
    const double n = static_cast<double>(l.size());
    auto offset = [&](double p) {
      double d = forward ? p - from.param : from.param - p;
      d = std::fmod(d, n);
      return d < 0 ? d + n : d;
    };
    const double end = offset(to.param);
    std::vector<std::pair<double, std::size_t>> hits;
    for (std::size_t v = 0; v < l.size(); ++v) {
      const double o = offset(static_cast<double>(v));
      if (o > 0 && o < end) hits.emplace_back(o, v);
    }
    std::sort(hits.begin(), hits.end());
    std::vector<Vec2> pts;
    for (const auto& h : hits) pts.push_back(l[h.second]);
    return pts;
  };

  std::vector<char> used(sd.intervals.size(), 0);
  for (std::size_t start = 0; start < sd.intervals.size(); ++start) {
    if (used[start]) continue;
    Toolpath path;
    path.kind = PathKind::zigzag;
    used[start] = 1;
    path.points.push_back(sd.crossings[sd.intervals[start][0]].point);
    path.points.push_back(sd.crossings[sd.intervals[start][1]].point);
    int end_id = sd.intervals[start][1];
    while (true) {
      const Crossing& cur = sd.crossings[end_id];
      const auto& ring = on_loop[cur.loop];
      const int n = static_cast<int>(ring.size());
      int best = -1;
      bool best_forward = true;
      std::size_t best_len = 0;
      for (bool forward : {true, false}) {
        const int nb = ring[((pos[end_id] + (forward ? 1 : -1)) % n + n) % n];
        const Crossing& c = sd.crossings[nb];
        if (nb == end_id || c.line != cur.line + 1 || used[c.interval]) continue;
        const std::size_t len = walk(cur, c, forward).size();
        if (best < 0 || len < best_len) {
          best = nb;
          best_forward = forward;
          best_len = len;
        }
      }
      if (best < 0) break;
      const Crossing& next = sd.crossings[best];
      for (const auto& p : walk(cur, next, best_forward)) path.points.push_back(p);
      used[next.interval] = 1;
      const auto& iv = sd.intervals[next.interval];
      const int other = iv[0] == best ? iv[1] : iv[0];
      path.points.push_back(next.point);
      path.points.push_back(sd.crossings[other].point);
      end_id = other;
    }
    std::vector<Vec2> clean;
    for (const auto& p : path.points)
      if (clean.empty() || (clean.back() - p).norm() > 1e-9) clean.push_back(p);
    path.points = std::move(clean);
    if (path.points.size() >= 2) paths.push_back(std::move(path));
  }
  return paths;
}

}  // namespace fibrepath
