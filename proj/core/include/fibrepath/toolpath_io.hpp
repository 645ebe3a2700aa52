#pragma once

#include "fibrepath/layer_mesh.hpp"
#include "fibrepath/toolpath.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace fibrepath {

struct LayerToolpaths {
  int index = 0;
  double z = 0.0;
  std::vector<Toolpath> paths;
};

/// `toolpaths v1 <nlayers>`, then per layer `layer <k> z=<z> <npaths>`, per
/// path `path <kind> <npoints> <closed> iso=<v|nan>` and `<x> <y>` lines.
/// Numbers use the shortest round-trip form, so re-reading is exact.
void write_toolpaths(std::ostream& out, const std::vector<LayerToolpaths>& layers);
std::vector<LayerToolpaths> read_toolpaths(std::istream& in);
void save_toolpaths(const std::filesystem::path& path, const std::vector<LayerToolpaths>& layers);
std::vector<LayerToolpaths> load_toolpaths(const std::filesystem::path& path);

struct SvgOptions {
  const std::vector<double>* heat = nullptr;  // per-vertex scalar drawn under the paths
  double stroke_width = 0.2;
};

/// One layer, 1 user unit = 1 mm, y up. Boundary loops in black, paths
/// coloured by kind.
void write_svg(std::ostream& out, const LayerMesh& layer, const std::vector<Toolpath>& paths,
               const SvgOptions& options = {});
/// Reads back the path polylines written by write_svg.
std::vector<Toolpath> read_svg_paths(std::istream& in);

/// Illustrative G-code: `;LAYER k Z<z>`, then per path `G0 X Y` travel,
/// `G1 X Y E<cumulative mm>` moves and a `;CUT` marker. Closed paths return
/// to their first point.
void write_gcode(std::ostream& out, const std::vector<LayerToolpaths>& layers);
/// Parses the subset written by write_gcode. Kinds and isovalues are not
/// stored in G-code; closed paths come back open with the first point repeated.
std::vector<LayerToolpaths> read_gcode(std::istream& in);

}  // namespace fibrepath
