#include "fibrepath/boundary.hpp"
#include "fibrepath/field2d.hpp"
#include "fibrepath/isopath.hpp"
#include "fibrepath/pipeline.hpp"
#include "fibrepath/slicer.hpp"
#include "fibrepath/stress3d.hpp"
#include "fibrepath/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <map>

namespace {

using namespace fibrepath;

const TestSolid& plate(double edge) {
  static std::map<double, TestSolid> cache;
  auto it = cache.find(edge);
  if (it == cache.end()) {
    SolidSpec spec;
    spec.kind = SolidKind::plate_with_hole;
    spec.size_x = 80;
    spec.size_y = 60;
    spec.size_z = 4;
    spec.hole_radius = 8;
    it = cache.emplace(edge, build_test_solid(spec, edge)).first;
  }
  return it->second;
}

struct LayerSetup {
  TetMesh mesh;
  ElementField elements;
  LayerMesh layer;
  FaceField faces;
  ScalarField s;
};

LayerSetup setup(double edge) {
  const TestSolid& solid = plate(edge);
  LayerSetup out;
  out.mesh = with_adjacency(solid.mesh);
  out.elements = compute_element_field(out.mesh, solid.tensors);
  out.layer = slice_at_height(out.mesh, 1.0);
  out.faces = quarter_turn_targets(weight_vectors(complete_and_smooth(project_field(out.elements, out.layer), out.layer), 1.0));
  out.s = solve_scalar_field(out.layer, out.faces);
  return out;
}

double edge_of(const benchmark::State& st) { return 2.0 / static_cast<double>(st.range(0)); }

void BM_ElementField(benchmark::State& st) {
  const TestSolid& solid = plate(edge_of(st));
  const TetMesh mesh = with_adjacency(solid.mesh);
  for (auto _ : st) benchmark::DoNotOptimize(compute_element_field(mesh, solid.tensors));
  st.counters["elements"] = static_cast<double>(mesh.num_tets());
}

void BM_Slice(benchmark::State& st) {
  const TetMesh mesh = with_adjacency(plate(edge_of(st)).mesh);
  for (auto _ : st) benchmark::DoNotOptimize(slice_at_height(mesh, 1.0));
}

void BM_Smooth(benchmark::State& st) {
  const LayerSetup ls = setup(edge_of(st));
  const FaceField projected = project_field(ls.elements, ls.layer);
  for (auto _ : st) benchmark::DoNotOptimize(complete_and_smooth(projected, ls.layer));
  st.counters["faces"] = static_cast<double>(ls.layer.num_faces());
}

void BM_ScalarField(benchmark::State& st) {
  const LayerSetup ls = setup(edge_of(st));
  for (auto _ : st) benchmark::DoNotOptimize(solve_scalar_field(ls.layer, ls.faces));
  st.counters["faces"] = static_cast<double>(ls.layer.num_faces());
}

void BM_AdaptiveExtract(benchmark::State& st) {
  const LayerSetup ls = setup(edge_of(st));
  for (auto _ : st) benchmark::DoNotOptimize(adaptive_extract(ls.layer, ls.s, 1.0));
}

void BM_HeatDistance(benchmark::State& st) {
  const LayerSetup ls = setup(edge_of(st));
  const std::vector<Box2> box = {{-8.5, -8.5, 8.5, 8.5}};
  const auto src = select_boundary_edges(ls.layer, box);
  for (auto _ : st) benchmark::DoNotOptimize(heat_distance(ls.layer, src));
}

void BM_Pipeline(benchmark::State& st) {
  const TestSolid& solid = plate(edge_of(st));
  PipelineConfig cfg;
  cfg.boundary_boxes = {{-8.5, -8.5, 8.5, 8.5}};
  PipelineOptions opt;
  opt.write_outputs = false;
  for (auto _ : st) benchmark::DoNotOptimize(run_pipeline(solid.mesh, solid.tensors, cfg, opt));
  st.counters["elements"] = static_cast<double>(solid.mesh.num_tets());
}

}  // namespace

BENCHMARK(BM_ElementField)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Slice)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Smooth)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScalarField)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdaptiveExtract)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HeatDistance)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pipeline)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
