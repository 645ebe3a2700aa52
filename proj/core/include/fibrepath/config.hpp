#pragma once

#include "fibrepath/boundary.hpp"
#include "fibrepath/field2d.hpp"
#include "fibrepath/isopath.hpp"
#include "fibrepath/stress3d.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fibrepath {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct PipelineConfig {
  std::filesystem::path mesh_path;
  std::filesystem::path stress_path;
  double spacing = kDefaultSpacing;                  // W
  double density_exponent = kDefaultDensityExponent; // p
  double ratio_threshold = kDefaultRatioThreshold;   // mu
  double compat_threshold = kDefaultCompatThreshold; // eta
  int smoothing_iterations = kDefaultSmoothingIterations;
  double layer_height = 1.0;
  double z_offset = 0.0;
  double min_path_length = kDefaultMinPathLength;
  std::vector<Box2> boundary_boxes;
  double heat_t_scale = 1.0;
  double zigzag_spacing = 0.0;  // 0 disables matrix infill
  double zigzag_angle = 0.0;    // degrees, alternates by 90 per layer
  std::filesystem::path output_dir = "out";
  bool area_weight = true;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Flat `key = value` text, `#` comments, lists in brackets:
///   boundary_source_boxes = [[xmin, ymin, xmax, ymax], ...]
/// Relative input paths resolve against `base_dir`.
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const PipelineConfig& cfg);

}  // namespace fibrepath
