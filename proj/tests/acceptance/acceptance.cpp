// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "fibrepath/boundary.hpp"
#include "fibrepath/field2d.hpp"
#include "fibrepath/isopath.hpp"
#include "fibrepath/pipeline.hpp"
#include "fibrepath/slicer.hpp"
#include "fibrepath/stress3d.hpp"
#include "fibrepath/synthetic.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace fibrepath;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), dt);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Layer-level field computation, stage by stage.
struct LayerField {
  LayerMesh layer;
  ScalarField s;
};

LayerField layer_field(const TestSolid& solid, double z, double p) {
  const TetMesh mesh = with_adjacency(solid.mesh);
  const ElementField ef = compute_element_field(mesh, solid.tensors);
  LayerField out{slice_at_height(mesh, z), {}};
  FaceField ff = project_field(ef, out.layer);
  ff = complete_and_smooth(ff, out.layer);
  ff = quarter_turn_targets(weight_vectors(ff, p));
  out.s = solve_scalar_field(out.layer, ff);
  return out;
}

SolidSpec box_spec() {
  SolidSpec s;
  s.kind = SolidKind::box;
  s.size_x = 60;
  s.size_y = 20;
  s.size_z = 2;
  s.stress = 1;
  return s;
}

SolidSpec plate_spec() {
  SolidSpec s;
  s.kind = SolidKind::plate_with_hole;
  s.size_x = 80;
  s.size_y = 80;
  s.size_z = 2;
  s.hole_radius = 8;
  s.stress = 1;
  return s;
}

SolidSpec cantilever_spec() {
  SolidSpec s;
  s.kind = SolidKind::cantilever;
  s.size_x = 80;
  s.size_y = 16;
  s.size_z = 2;
  s.load = 100;
  return s;
}

PipelineOptions quiet() {
  PipelineOptions o;
  o.write_outputs = false;
  return o;
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross2(b - a, c - a), d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c), d4 = cross2(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

int crossings(const std::vector<Toolpath>& paths, const Vec2& a, const Vec2& b) {
  int n = 0;
  for (const auto& p : paths) {
    const std::size_t m = p.points.size();
    for (std::size_t i = 0; i + 1 < m + (p.closed ? 1 : 0); ++i)
      if (segments_cross(a, b, p.points[i], p.points[(i + 1) % m])) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------

Outcome exact_gradient() {
  const LayerMesh l = fixtures::square_layer(49);
  FaceField ff;
  ff.v.assign(l.num_faces(), Vec2(1, 0));
  ff.sigma.assign(l.num_faces(), 1.0);
  ff.status.assign(l.num_faces(), FaceStatus::defined);
  const auto t0 = std::chrono::steady_clock::now();
  const ScalarField s = solve_scalar_field(l, weight_vectors(ff, 1.0));
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double xa = l.vertices[s.anchors.at(0)].x();
  double err = 0;
  for (std::size_t v = 0; v < l.num_vertices(); ++v) err = std::max(err, std::abs(s.values[v] - (l.vertices[v].x() - xa)));
  return {l.num_vertices() == 2500 && err < 1e-8 && dt < 1.0,
          fmt("%zu vertices, max error %.2e, solve %.3f s", l.num_vertices(), err, dt)};
}

Outcome spacing_guarantee() {
  const double W = 1.0;
  std::string detail;
  bool ok = true;
  for (const SolidSpec& spec : {box_spec(), plate_spec(), cantilever_spec()}) {
    const TestSolid solid = build_test_solid(spec, 1.0);
    PipelineConfig cfg;
    cfg.spacing = W;
    const PipelineResult r = run_pipeline(solid.mesh, solid.tensors, cfg, quiet());
    double dmin = INFINITY;
    for (const auto& l : r.report.layers) {
      dmin = std::min(dmin, l.min_distance);
      ok = ok && l.min_distance > W && l.isocurves >= 2;
    }
    detail += fmt("%s min d %.4f over %zu layers; ", to_string(spec.kind), dmin, r.report.layers.size());
  }
  // Maximality on the linear-field box: one more isovalue breaks the spacing.
  const LayerField lf = layer_field(build_test_solid(box_spec(), 1.0), 0.5, 1.0);
  const LadderResult lr = adaptive_ladder(lf.layer, lf.s.values, W);
  const double d_next = min_neighbor_distance(extract_ladder(lf.layer, lf.s.values, lr.n + 1), W);
  ok = ok && lr.distance > W && d_next <= W;
  detail += fmt("box n=%d d=%.4f, n+1 d=%.4f", lr.n, lr.distance, d_next);
  return {ok, detail};
}

Outcome uniform_density() {
  const LayerField lf = layer_field(build_test_solid(box_spec(), 1.0), 0.5, 0.0);
  const LadderResult lr = adaptive_ladder(lf.layer, lf.s.values, 1.0);
  std::vector<double> gaps;
  double worst_angle = 0;
  for (std::size_t g = 0; g + 1 < lr.groups.size(); ++g) {
    std::vector<std::vector<Vec2>> next;
    for (const auto& c : lr.groups[g + 1]) next.push_back(c.points);
    for (const auto& c : lr.groups[g]) {
      for (const auto& q : resample_polyline(c.points, c.closed, 0.5)) gaps.push_back(oracle::distance_to_paths(next, q));
      for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
        const Vec2 t = (c.points[i + 1] - c.points[i]).normalized();
        worst_angle = std::max(worst_angle, std::acos(std::min(1.0, std::abs(t.x()))) * 180 / std::numbers::pi);
      }
    }
  }
  double mean = 0, var = 0;
  for (double g : gaps) mean += g / gaps.size();
  for (double g : gaps) var += (g - mean) * (g - mean) / gaps.size();
  const double cv = std::sqrt(var) / mean;
  return {gaps.size() > 10 && cv < 0.10 && worst_angle < 5.0,
          fmt("%d curves, mean spacing %.4f, CV %.2e, max tangent deviation from tension axis %.2f deg", lr.n, mean,
              cv, worst_angle)};
}

Outcome adaptive_density() {
  const TestSolid solid = build_test_solid(plate_spec(), 1.0);
  const double a = plate_spec().hole_radius, H = plate_spec().size_y / 2;
  PipelineConfig cfg;
  PipelineOptions opt = quiet();
  opt.stop = StopAfter::paths;
  opt.layers = std::make_pair(0, 0);
  std::string detail;
  std::vector<double> ratios;
  std::vector<int> near_counts;
  for (double p : {0.0, 0.5, 1.0, 2.0}) {
    cfg.density_exponent = p;
    const PipelineResult r = run_pipeline(solid.mesh, solid.tensors, cfg, opt);
    const auto& paths = r.layers.at(0).paths;
    // Bands along the vertical through the hole centre: next to the hole
    // equator and at the far edge, equal width.
    int near = 0, far = 0;
    for (double sign : {1.0, -1.0}) {
      near += crossings(paths, {1e-3, sign * a}, {1e-3, sign * (a + a)});
      far += crossings(paths, {1e-3, sign * (H - a)}, {1e-3, sign * H});
    }
    near_counts.push_back(near);
    ratios.push_back(static_cast<double>(near) / std::max(far, 1));
    detail += fmt("p=%.1f near %d far %d; ", p, near, far);
  }
  bool ok = near_counts[2] > near_counts[0];
  for (std::size_t i = 1; i < ratios.size(); ++i) ok = ok && ratios[i] > ratios[i - 1];
  detail += fmt("ratios %.2f %.2f %.2f %.2f", ratios[0], ratios[1], ratios[2], ratios[3]);
  return {ok, detail};
}

Outcome alignment() {
  const SolidSpec spec = plate_spec();
  const TestSolid solid = build_test_solid(spec, 1.0);
  PipelineConfig cfg;
  PipelineOptions opt = quiet();
  opt.stop = StopAfter::paths;
  opt.layers = std::make_pair(0, 0);
  const PipelineResult r = run_pipeline(solid.mesh, solid.tensors, cfg, opt);
  std::vector<double> angles;
  for (const auto& p : r.layers.at(0).paths)
    for (std::size_t i = 0; i + 1 < p.points.size(); ++i) {
      const Vec2 m = 0.5 * (p.points[i] + p.points[i + 1]);
      if (m.norm() < spec.hole_radius) continue;
      const SymTensor3 t = kirsch_stress(m, spec.stress, spec.hole_radius);
      // Largest in-plane principal stress and its direction, closed form.
      const double c = 0.5 * (t.xx + t.yy), rr = std::hypot(0.5 * (t.xx - t.yy), t.xy);
      const double s1 = c + rr, s2 = c - rr;
      const bool tensile = (std::abs(s1) >= std::abs(s2) && s1 > 0) || (s2 < 0 && s1 > 0 && std::abs(s2 / s1) < 3.0);
      if (!tensile || s1 <= 0.2 * spec.stress) continue;
      const double phi = 0.5 * std::atan2(2 * t.xy, t.xx - t.yy);
      const Vec2 dir(std::cos(phi), std::sin(phi));
      const Vec2 tan = (p.points[i + 1] - p.points[i]).normalized();
      angles.push_back(std::acos(std::min(1.0, std::abs(tan.dot(dir)))) * 180 / std::numbers::pi);
    }
  if (angles.empty()) return {false, "no sample points"};
  std::sort(angles.begin(), angles.end());
  const double med = angles[angles.size() / 2];
  const double p90 = angles[angles.size() * 9 / 10];
  return {med < 15.0, fmt("%zu samples, median %.2f deg, 90th percentile %.2f deg", angles.size(), med, p90)};
}

Outcome reorientation() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> N;
  std::bernoulli_distribution flip(0.5);
  const TetMesh meshes[] = {with_adjacency(extrude(rectangle_mesh({0, 0}, {1, 1}, 1, 1), 1, 1)),
                            with_adjacency(extrude(rectangle_mesh({0, 0}, {2, 1}, 2, 1), 1, 1)),
                            with_adjacency(extrude(rectangle_mesh({0, 0}, {1, 1}, 1, 1), 2, 2))};
  int matched = 0;
  std::size_t max_elems = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const TetMesh& m = meshes[trial % 3];
    max_elems = std::max(max_elems, m.num_tets());
    const Vec3 d = Vec3(N(rng), N(rng), N(rng)).normalized();
    ElementField f;
    for (std::size_t i = 0; i < m.num_tets(); ++i) {
      Vec3 v = (d + 0.3 * Vec3(N(rng), N(rng), N(rng)).cwiseMin(1.0).cwiseMax(-1.0)).normalized();
      f.vectors.push_back(flip(rng) ? -v : v);
      f.sigma.push_back(0.5 + std::abs(N(rng)));
      f.status.push_back(VectorStatus::defined);
    }
    std::vector<std::array<int, 2>> pairs;
    for (std::size_t i = 0; i < m.num_tets(); ++i)
      for (int j : m.face_adjacency[i])
        if (j > static_cast<int>(i)) pairs.push_back({static_cast<int>(i), j});
    const auto best = oracle::brute_force_signs(f.vectors, pairs);
    const ElementField out = reorient_mst(f, m);
    bool same = false;
    for (const auto& s : best.assignments)
      for (int g : {1, -1}) {
        bool all = true;
        for (std::size_t i = 0; i < f.size(); ++i) all = all && out.vectors[i] == (g * s[i]) * f.vectors[i];
        same = same || all;
      }
    if (same) ++matched;
  }
  return {matched == 100, fmt("%d/100 trials match brute force (meshes up to %zu elements)", matched, max_elems)};
}

Outcome incompatibility_histogram() {
  const TestSolid solid = build_test_solid(plate_spec(), 1.0);
  const TetMesh mesh = with_adjacency(solid.mesh);
  ElementField f;
  for (const auto& t : solid.tensors) {
    const auto sel = select_tensile_vector(principal_decompose(t));
    f.vectors.push_back(sel.direction);
    f.sigma.push_back(sel.sigma);
    f.status.push_back(sel.status);
  }
  f = reorient_mst(f, mesh);
  std::size_t total = 0, middle = 0, low = 0;
  for (std::size_t i = 0; i < mesh.num_tets(); ++i)
    for (int j : mesh.vertex_adjacency[i]) {
      if (j <= static_cast<int>(i)) continue;
      const double d = f.vectors[i].dot(f.vectors[j]);
      ++total;
      if (d > 0.4 && d < 0.6) ++middle;
      if (d <= 0.4) ++low;
    }
  const double frac = static_cast<double>(middle) / total;
  return {frac < 0.05, fmt("%zu neighbour pairs, %.3f%% in (0.4, 0.6), %.3f%% at or below 0.4", total, 100 * frac,
                           100.0 * low / total)};
}

Outcome heat_accuracy() {
  const LayerMesh disk = planar_layer(disk_mesh(1.0, 20));
  std::vector<int> all(disk.boundary_edges.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  const double centre = heat_distance(disk, all).values[0];

  const LayerMesh rect = fixtures::rect_layer(10, 1, 80, 8);
  const std::vector<Box2> box = {{-0.01, 0.5, 0.01, 0.6}};
  const DistanceField df = heat_distance(rect, select_boundary_edges(rect, box));
  double far = 0;
  for (std::size_t v = 0; v < rect.num_vertices(); ++v)
    if (rect.vertices[v].x() == 10 && std::abs(rect.vertices[v].y() - 0.5) < 1e-9) far = df.values[v];
  const bool ok = std::abs(centre - 1.0) < 0.05 && std::abs(far - 10.0) < 0.5;
  return {ok, fmt("disk centre %.4f (exact 1), rectangle far end %.4f (exact 10)", centre, far)};
}

Outcome connection_contract() {
  const SolidSpec spec = plate_spec();
  const TestSolid solid = build_test_solid(spec, 1.0);
  const double W = 1.0, a = spec.hole_radius;
  PipelineConfig cfg;
  cfg.spacing = W;
  cfg.boundary_boxes = {{-a - 0.5, -a - 0.5, a + 0.5, a + 0.5}};
  PipelineOptions opt = quiet();
  opt.layers = std::make_pair(0, 0);
  const PipelineResult r = run_pipeline(solid.mesh, solid.tensors, cfg, opt);

  // Independent check of endpoint placement against the same layer and distance field.
  const LayerMesh layer = slice_at_height(with_adjacency(solid.mesh), r.layers.at(0).z);
  const DistanceField df = heat_distance(layer, select_boundary_edges(layer, cfg.boundary_boxes));
  FaceLocator loc(layer);
  std::vector<std::pair<Vec2, Vec2>> outline;
  for (const auto& e : layer.boundary_edges) outline.emplace_back(layer.vertices[e[0]], layer.vertices[e[1]]);
  auto on_outline = [&](const Vec2& p) {
    for (const auto& [x, y] : outline)
      if (point_segment_distance(p, x, y) < 1e-6) return true;
    return false;
  };

  int paths = 0, closed = 0, ends_outline = 0, ends_conformal = 0, bad_ends = 0, long_conn = 0, arcs = 0, shorts = 0;
  double min_len = INFINITY;
  for (const auto& p : r.layers.at(0).paths) {
    ++paths;
    min_len = std::min(min_len, p.length());
    if (p.length() < 42.0) ++shorts;
    for (const auto& [i, j] : p.connectors) {
      const Vec2& x = p.points[i];
      const Vec2& y = p.points[j % p.points.size()];
      if (j == i + 1) {
        if ((y - x).norm() > 2 * W) ++long_conn;
      } else {
        ++arcs;
      }
    }
    if (p.closed) {
      ++closed;
      continue;
    }
    for (const Vec2& e : {p.points.front(), p.points.back()}) {
      const auto d = loc.interpolate(e, df.values);
      if (d && (std::abs(*d - 1.5 * W) < 1e-3 || std::abs(*d - 2.5 * W) < 1e-3)) ++ends_conformal;
      else if (on_outline(e)) ++ends_outline;
      else ++bad_ends;
    }
  }
  const bool ok = paths > 0 && bad_ends == 0 && long_conn == 0 && shorts == 0 && arcs > 0;
  return {ok, fmt("%d paths (%d closed, %d arc joins), open ends: %d on conformal curves, %d on the part outline, %d "
                  "elsewhere; straight connectors > 2W: %d; shortest path %.1f mm",
                  paths, closed, arcs, ends_conformal, ends_outline, bad_ends, long_conn, min_len)};
}

Outcome performance() {
  SolidSpec spec = plate_spec();
  spec.size_x = 60;
  spec.size_y = 40;
  spec.hole_radius = 6;
  spec.size_z = 12;
  const TestSolid solid = build_test_solid(spec, 2.2);
  PipelineConfig cfg;
  cfg.boundary_boxes = {{-6.5, -6.5, 6.5, 6.5}};
  cfg.zigzag_spacing = 1.0;
  cfg.output_dir = fs::temp_directory_path() / "fibrepath_acceptance_perf";
  PipelineOptions opt;
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineResult r = run_pipeline(solid.mesh, solid.tensors, cfg, opt);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::size_t n = solid.mesh.num_tets();
  const bool ok = n >= 12000 && n <= 16000 && r.report.layers.size() == 12 && dt < 120.0;
  return {ok, fmt("%zu elements, %zu layers, %.2f s end to end", n, r.report.layers.size(), dt)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  SolidSpec spec = plate_spec();
  spec.size_x = 60;
  spec.size_y = 50;
  spec.hole_radius = 6;
  const TestSolid solid = build_test_solid(spec, 1.0);
  PipelineConfig cfg;
  cfg.boundary_boxes = {{-6.5, -6.5, 6.5, 6.5}};
  cfg.zigzag_spacing = 2.0;
  const fs::path root = fs::temp_directory_path() / "fibrepath_acceptance_det";
  fs::remove_all(root);
  cfg.output_dir = root / "a";
  const PipelineResult r1 = run_pipeline(solid.mesh, solid.tensors, cfg);
  cfg.output_dir = root / "b";
  run_pipeline(solid.mesh, solid.tensors, cfg);

  const bool same_tp = slurp(root / "a" / "toolpaths.txt") == slurp(root / "b" / "toolpaths.txt");
  const bool same_gc = slurp(root / "a" / "toolpaths.gcode") == slurp(root / "b" / "toolpaths.gcode");
  const bool same_svg = slurp(root / "a" / "layer_000.svg") == slurp(root / "b" / "layer_000.svg");

  std::ifstream tin(root / "a" / "toolpaths.txt");
  const auto tp = read_toolpaths(tin);
  bool tp_ok = tp.size() == r1.layers.size();
  for (std::size_t k = 0; tp_ok && k < tp.size(); ++k) {
    tp_ok = tp[k].z == r1.layers[k].z && tp[k].paths.size() == r1.layers[k].paths.size();
    for (std::size_t p = 0; tp_ok && p < tp[k].paths.size(); ++p) {
      const auto &x = tp[k].paths[p], &y = r1.layers[k].paths[p];
      tp_ok = x.points == y.points && x.kind == y.kind && x.closed == y.closed &&
              (x.isovalue == y.isovalue || (std::isnan(x.isovalue) && std::isnan(y.isovalue)));
    }
  }
  std::ifstream gin(root / "a" / "toolpaths.gcode");
  const auto gc = read_gcode(gin);
  bool gc_ok = gc.size() == r1.layers.size();
  for (std::size_t k = 0; gc_ok && k < gc.size(); ++k)
    for (std::size_t p = 0; gc_ok && p < gc[k].paths.size(); ++p) {
      auto expect = r1.layers[k].paths[p].points;
      if (r1.layers[k].paths[p].closed) expect.push_back(expect.front());
      gc_ok = gc[k].paths[p].points == expect && gc[k].paths[p].kind == r1.layers[k].paths[p].kind;
    }
  std::ifstream sin(root / "a" / "layer_000.svg");
  const auto sv = read_svg_paths(sin);
  bool svg_ok = sv.size() == r1.layers[0].paths.size();
  for (std::size_t p = 0; svg_ok && p < sv.size(); ++p)
    svg_ok = sv[p].points == r1.layers[0].paths[p].points && sv[p].closed == r1.layers[0].paths[p].closed;
  std::ifstream rin(root / "a" / "report.json");
  const PipelineReport rep = read_report(rin);
  bool rep_ok = rep.layers.size() == r1.report.layers.size();
  for (std::size_t k = 0; rep_ok && k < rep.layers.size(); ++k) {
    const auto &x = rep.layers[k], &y = r1.report.layers[k];
    rep_ok = x.min_distance == y.min_distance && x.fibre_length == y.fibre_length && x.isocurves == y.isocurves &&
             x.faces == y.faces && x.removed_length == y.removed_length && x.warnings == y.warnings;
  }
  const bool ok = same_tp && same_gc && same_svg && tp_ok && gc_ok && svg_ok && rep_ok;
  return {ok, fmt("identical toolpaths %d gcode %d svg %d; lossless toolpaths %d gcode %d svg %d report %d", same_tp,
                  same_gc, same_svg, tp_ok, gc_ok, svg_ok, rep_ok)};
}

}  // namespace

int main() {
  report("exact_gradient_recovery", exact_gradient);
  report("spacing_guarantee", spacing_guarantee);
  report("uniform_density_p0", uniform_density);
  report("adaptive_density_kirsch", adaptive_density);
  report("alignment_kirsch", alignment);
  report("reorientation_brute_force", reorientation);
  report("incompatibility_histogram", incompatibility_histogram);
  report("heat_method_accuracy", heat_accuracy);
  report("connection_contract", connection_contract);
  report("performance_envelope", performance);
  report("determinism_round_trip", determinism);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
