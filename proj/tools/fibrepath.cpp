#include "fibrepath/pipeline.hpp"
#include "fibrepath/synthetic.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <regex>

using namespace fibrepath;

namespace {

struct RunArgs {
  std::string config;
  std::string out;
  std::string layers;
  bool verbose = false;
};

void add_run_flags(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--config", a.config, "pipeline config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "output directory (overrides output_dir)");
  cmd->add_option("--layers", a.layers, "inclusive layer range a..b");
  cmd->add_flag("--verbose", a.verbose, "per-layer progress on stderr");
}

std::pair<int, int> parse_range(const std::string& s) {
  static const std::regex re(R"((\d+)(?:\.\.(\d+))?)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw CLI::ValidationError("--layers", "expected a..b, got '" + s + "'");
  const int a = std::stoi(m[1]);
  const int b = m[2].matched ? std::stoi(m[2]) : a;
  if (b < a) throw CLI::ValidationError("--layers", "range end before start");
  return {a, b};
}

int run(const RunArgs& a, StopAfter stop) {
  PipelineConfig cfg = load_config(a.config);
  if (!a.out.empty()) cfg.output_dir = a.out;
  PipelineOptions opt;
  opt.stop = stop;
  if (!a.layers.empty()) opt.layers = parse_range(a.layers);
  if (a.verbose) opt.log = [](const std::string& m) { std::cerr << m << '\n'; };
  const PipelineResult res = run_pipeline(cfg, opt);
  for (const auto& l : res.report.layers)
    for (const auto& w : l.warnings) std::cerr << "warning: layer " << l.index << ": " << w << '\n';
  std::cout << "layers " << res.report.layers.size() << ", fibre length " << format_double(res.report.fibre_length())
            << " mm, " << format_double(res.report.total_seconds) << " s, output in " << cfg.output_dir.string()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stress-aligned continuous fibre toolpaths from tetrahedral stress fields"};
  app.require_subcommand(1);

  RunArgs full, field, paths;
  add_run_flags(app.add_subcommand("pipeline", "run every stage"), full);
  add_run_flags(app.add_subcommand("field", "stop after the scalar field, dump s per layer"), field);
  add_run_flags(app.add_subcommand("paths", "stop after isocurve extraction"), paths);

  auto* synth = app.add_subcommand("synth", "write a synthetic test solid with its analytic stress field");
  std::string kind = "box", out = "synth";
  SolidSpec spec;
  double edge = 1.0;
  synth->add_option("--kind", kind, "box | plate_with_hole | cantilever")->capture_default_str();
  synth->add_option("--edge", edge, "target edge length (mm)")->capture_default_str();
  synth->add_option("--size-x", spec.size_x)->capture_default_str();
  synth->add_option("--size-y", spec.size_y)->capture_default_str();
  synth->add_option("--size-z", spec.size_z)->capture_default_str();
  synth->add_option("--hole", spec.hole_radius, "hole radius (plate)")->capture_default_str();
  synth->add_option("--stress", spec.stress, "far-field tension S (MPa)")->capture_default_str();
  synth->add_option("--load", spec.load, "tip load P (N, cantilever)")->capture_default_str();
  synth->add_option("--out", out, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("pipeline")) return run(full, StopAfter::full);
    if (app.got_subcommand("field")) return run(field, StopAfter::field);
    if (app.got_subcommand("paths")) return run(paths, StopAfter::paths);

    const auto k = parse_solid_kind(kind);
    if (!k) throw std::invalid_argument("unknown solid kind '" + kind + "'");
    spec.kind = *k;
    const TestSolid solid = build_test_solid(spec, edge);
    const std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);
    save_tet_mesh(dir / "mesh.tet", solid.mesh);
    save_stress_field(dir / "stress.txt", solid.tensors);
    PipelineConfig cfg;
    cfg.mesh_path = "mesh.tet";
    cfg.stress_path = "stress.txt";
    cfg.output_dir = "out";
    std::ofstream c(dir / "config.txt");
    write_config(c, cfg);
    std::cout << to_string(spec.kind) << ": " << solid.mesh.num_tets() << " tets, " << solid.mesh.num_vertices()
              << " vertices -> " << dir.string() << '\n';
    return 0;
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
