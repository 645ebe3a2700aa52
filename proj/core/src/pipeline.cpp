#include "fibrepath/pipeline.hpp"

#include "fibrepath/boundary.hpp"
#include "fibrepath/field2d.hpp"
#include "fibrepath/isopath.hpp"
#include "fibrepath/slicer.hpp"
#include "fibrepath/stress3d.hpp"
#include "fibrepath/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace fibrepath {

PipelineError::PipelineError(std::string stage, int layer, const std::string& cause)
    : std::runtime_error("stage '" + stage + "'" + (layer >= 0 ? " layer " + std::to_string(layer) : std::string()) +
                         ": " + cause),
      stage_(std::move(stage)),
      layer_(layer),
      cause_(cause) {}

double PipelineReport::fibre_length() const {
  double s = 0;
  for (const auto& l : layers) s += l.fibre_length;
  return s;
}

namespace {

using json = nlohmann::ordered_json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_or_inf(const json& j) { return j.is_null() ? INFINITY : j.get<double>(); }

// Accumulates wall time per stage in first-seen order.
class Timer {
 public:
  template <class F>
  auto run(const std::string& stage, int layer, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Record {
      Timer& self;
      const std::string& stage;
      std::chrono::steady_clock::time_point t0;
      ~Record() { self.add(stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()); }
    } rec{*this, stage, t0};
    try {
      return f();
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError(stage, layer, e.what());
    }
  }

  void add(const std::string& stage, double s) {
    auto it = index_.find(stage);
    if (it == index_.end()) {
      index_.emplace(stage, times_.size());
      times_.push_back({stage, s});
    } else {
      times_[it->second].seconds += s;
    }
  }

  const std::vector<StageTime>& times() const { return times_; }

 private:
  std::vector<StageTime> times_;
  std::map<std::string, std::size_t> index_;
};

std::string layer_name(int k, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "layer_%03d%s", k, suffix);
  return buf;
}

template <class F>
void write_file(const std::filesystem::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

bool is_fibre(PathKind k) { return k == PathKind::stress || k == PathKind::boundary || k == PathKind::connector; }

}  // namespace

void write_report(std::ostream& out, const PipelineReport& report) {
  json j;
  j["elements"] = report.elements;
  j["fibre_length_mm"] = report.fibre_length();
  j["total_seconds"] = report.total_seconds;
  json layers = json::array();
  for (const auto& l : report.layers) {
    layers.push_back({{"index", l.index},
                      {"z", l.z},
                      {"faces", l.faces},
                      {"isocurves", l.isocurves},
                      {"min_distance", number_or_null(l.min_distance)},
                      {"fibre_length_mm", l.fibre_length},
                      {"removed_length_mm", l.removed_length},
                      {"removed_paths", l.removed_paths},
                      {"paths", l.paths},
                      {"warnings", l.warnings}});
  }
  j["layers"] = std::move(layers);
  json timings = json::array();
  for (const auto& t : report.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  j["timings"] = std::move(timings);
  j["warnings"] = report.warnings;
  out << j.dump(2) << '\n';
}

PipelineReport read_report(std::istream& in) {
  PipelineReport r;
  try {
    const json j = json::parse(in);
    r.elements = j.at("elements").get<std::size_t>();
    r.total_seconds = j.at("total_seconds").get<double>();
    for (const auto& l : j.at("layers")) {
      LayerReport lr;
      lr.index = l.at("index").get<int>();
      lr.z = l.at("z").get<double>();
      lr.faces = l.at("faces").get<std::size_t>();
      lr.isocurves = l.at("isocurves").get<int>();
      lr.min_distance = number_or_inf(l.at("min_distance"));
      lr.fibre_length = l.at("fibre_length_mm").get<double>();
      lr.removed_length = l.at("removed_length_mm").get<double>();
      lr.removed_paths = l.at("removed_paths").get<int>();
      lr.paths = l.at("paths").get<int>();
      lr.warnings = l.at("warnings").get<std::vector<std::string>>();
      r.layers.push_back(std::move(lr));
    }
    for (const auto& t : j.at("timings")) r.timings.push_back({t.at("stage").get<std::string>(), t.at("seconds").get<double>()});
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what(), 0);
  }
  return r;
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineOptions& options) {
  TetMesh mesh;
  std::vector<SymTensor3> tensors;
  try {
    mesh = load_tet_mesh(cfg.mesh_path);
    tensors = load_stress_field(cfg.stress_path, mesh);
  } catch (const std::exception& e) {
    throw PipelineError("load", -1, e.what());
  }
  return run_pipeline(mesh, tensors, cfg, options);
}

PipelineResult run_pipeline(const TetMesh& input, const std::vector<SymTensor3>& tensors, const PipelineConfig& cfg,
                            const PipelineOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw PipelineError("config", -1, e.what());
  }
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  Timer timer;
  PipelineResult result;
  result.report.elements = input.num_tets();

  const TetMesh mesh = timer.run("adjacency", -1, [&] { return input.has_adjacency() ? input : with_adjacency(input); });
  const ElementField ef = timer.run("element_field", -1, [&] {
    return compute_element_field(mesh, tensors, cfg.ratio_threshold, cfg.compat_threshold);
  });
  const std::vector<double> heights =
      timer.run("layers", -1, [&] { return layer_heights(mesh, cfg.layer_height, cfg.z_offset); });
  log("elements: " + std::to_string(mesh.num_tets()) + ", layers: " + std::to_string(heights.size()));

  if (options.write_outputs) {
    timer.run("write", -1, [&] {
      std::filesystem::create_directories(cfg.output_dir);
      return 0;
    });
  }

  for (int k = 0; k < static_cast<int>(heights.size()); ++k) {
    if (options.layers && (k < options.layers->first || k > options.layers->second)) continue;
    const double z = heights[k];
    LayerReport rep;
    rep.index = k;
    rep.z = z;

    const LayerMesh layer = timer.run("slice", k, [&] { return slice_at_height(mesh, z); });
    rep.faces = layer.triangles.size();
    if (layer.triangles.empty()) {
      rep.warnings.push_back("empty layer");
      rep.min_distance = INFINITY;
      result.report.layers.push_back(std::move(rep));
      if (options.stop != StopAfter::field) result.layers.push_back({k, z, {}});
      result.scalar_fields.emplace_back();
      continue;
    }

    FaceField ff = timer.run("project", k, [&] { return project_field(ef, layer); });
    ff = timer.run("smooth", k, [&] { return complete_and_smooth(ff, layer, cfg.smoothing_iterations); });
    ff = timer.run("weight", k, [&] { return quarter_turn_targets(weight_vectors(ff, cfg.density_exponent)); });
    GradientFitOptions fit;
    fit.area_weight = cfg.area_weight;
    const ScalarField s = timer.run("scalar_field", k, [&] { return solve_scalar_field(layer, ff, fit); });
    result.scalar_fields.push_back(s.values);

    std::vector<Toolpath> paths;
    if (options.stop == StopAfter::field) {
      rep.min_distance = INFINITY;
      if (options.write_outputs) {
        timer.run("write", k, [&] {
          write_file(cfg.output_dir / layer_name(k, "_field.txt"), [&](std::ostream& o) { write_layer_mesh(o, layer, &s.values); });
          SvgOptions so;
          so.heat = &s.values;
          write_file(cfg.output_dir / layer_name(k, "_field.svg"), [&](std::ostream& o) { write_svg(o, layer, {}, so); });
          return 0;
        });
      }
    } else {
      IsoExtraction iso = timer.run("extract", k, [&] { return adaptive_extract(layer, s, cfg.spacing); });
      rep.min_distance = iso.min_distance;
      for (int n : iso.isocurve_counts) rep.isocurves += n;
      for (auto& w : iso.warnings) rep.warnings.push_back(std::move(w));

      if (options.stop == StopAfter::paths) {
        paths = std::move(iso.paths);
      } else {
        ConnectionResult conn = timer.run("boundary", k, [&] {
          DistanceField df;
          BoundaryCurves bnd;
          if (!cfg.boundary_boxes.empty()) {
            const auto edges = select_boundary_edges(layer, cfg.boundary_boxes);
            if (edges.empty()) {
              rep.warnings.push_back("no boundary edge inside the source boxes");
            } else {
              df = heat_distance(layer, edges, cfg.heat_t_scale);
              if (df.has_unreachable) rep.warnings.push_back("part of the layer is unreachable from the boundary source");
              bnd = conformal_curves(df, layer, cfg.spacing);
            }
          }
          auto c = truncate_and_connect(iso.paths, bnd, df, layer, cfg.spacing);
          for (auto& w : bnd.warnings) c.warnings.push_back(std::move(w));
          return c;
        });
        for (auto& w : conn.warnings) rep.warnings.push_back(std::move(w));
        LengthFilterResult kept =
            timer.run("filter", k, [&] { return filter_min_length(std::move(conn.paths), cfg.min_path_length); });
        rep.removed_length = kept.removed_length();
        rep.removed_paths = kept.removed_count;
        paths = std::move(kept.kept);
      }
      for (const auto& p : paths)
        if (is_fibre(p.kind)) rep.fibre_length += p.length();

      if (cfg.zigzag_spacing > 0 && options.stop == StopAfter::full) {
        auto zz = timer.run("zigzag", k, [&] {
          return zigzag_infill(layer, cfg.zigzag_spacing, cfg.zigzag_angle + (k % 2 ? 90.0 : 0.0));
        });
        for (auto& p : zz) paths.push_back(std::move(p));
      }
      for (auto& p : paths) p.layer = k;
      if (options.write_outputs) {
        timer.run("write", k, [&] {
          write_file(cfg.output_dir / layer_name(k, ".svg"), [&](std::ostream& o) { write_svg(o, layer, paths); });
          return 0;
        });
      }
    }
    rep.paths = static_cast<int>(paths.size());
    log("layer " + std::to_string(k) + " z=" + format_double(z) + ": faces " + std::to_string(rep.faces) +
        ", curves " + std::to_string(rep.isocurves) + ", paths " + std::to_string(rep.paths));
    if (options.stop != StopAfter::field) result.layers.push_back({k, z, std::move(paths)});
    result.report.layers.push_back(std::move(rep));
  }

  if (options.write_outputs && options.stop != StopAfter::field) {
    timer.run("write", -1, [&] {
      write_file(cfg.output_dir / "toolpaths.txt", [&](std::ostream& o) { write_toolpaths(o, result.layers); });
      write_file(cfg.output_dir / "toolpaths.gcode", [&](std::ostream& o) { write_gcode(o, result.layers); });
      return 0;
    });
  }
  result.report.timings = timer.times();
  result.report.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (options.write_outputs) {
    write_file(cfg.output_dir / "report.json", [&](std::ostream& o) { write_report(o, result.report); });
  }
  return result;
}

}  // namespace fibrepath
