#pragma once

#include "fibrepath/config.hpp"
#include "fibrepath/mesh_io.hpp"
#include "fibrepath/toolpath_io.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fibrepath {

/// Failure of a pipeline stage. `layer()` is -1 for whole-solid stages.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, int layer, const std::string& cause);
  const std::string& stage() const noexcept { return stage_; }
  int layer() const noexcept { return layer_; }
  const std::string& cause() const noexcept { return cause_; }

 private:
  std::string stage_;
  int layer_;
  std::string cause_;
};

struct LayerReport {
  int index = 0;
  double z = 0.0;
  std::size_t faces = 0;
  int isocurves = 0;                 // n summed over components
  double min_distance = 0.0;         // d, +inf when fewer than two curves
  double fibre_length = 0.0;         // stress + boundary + connector paths kept
  double removed_length = 0.0;       // dropped by the minimum length filter
  int removed_paths = 0;
  int paths = 0;
  std::vector<std::string> warnings;
};

struct StageTime {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineReport {
  std::size_t elements = 0;
  std::vector<LayerReport> layers;
  std::vector<StageTime> timings;
  double total_seconds = 0.0;
  std::vector<std::string> warnings;

  double fibre_length() const;
};

void write_report(std::ostream& out, const PipelineReport& report);
PipelineReport read_report(std::istream& in);

enum class StopAfter { field, paths, full };

struct PipelineOptions {
  StopAfter stop = StopAfter::full;
  std::optional<std::pair<int, int>> layers;  // inclusive index range
  bool write_outputs = true;
  std::function<void(const std::string&)> log;
};

struct PipelineResult {
  PipelineReport report;
  std::vector<LayerToolpaths> layers;
  std::vector<std::vector<double>> scalar_fields;  // per processed layer
};

/// Loads the mesh and stress files named in the config and runs every stage.
PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineOptions& options = {});
/// Same, on in-memory inputs; the config's input paths are ignored.
PipelineResult run_pipeline(const TetMesh& mesh, const std::vector<SymTensor3>& tensors, const PipelineConfig& cfg,
                            const PipelineOptions& options = {});

}  // namespace fibrepath
