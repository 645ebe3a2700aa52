#include "fibrepath/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace fibrepath {

ConfigError::ConfigError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + what : "config: " + what),
      line_(line) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_number(const std::string& s, int line) {
  double v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError("expected a number, got '" + s + "'", line);
  return v;
}

int to_int(const std::string& s, int line) {
  const double v = to_number(s, line);
  if (v != static_cast<double>(static_cast<long long>(v))) throw ConfigError("expected an integer, got '" + s + "'", line);
  return static_cast<int>(v);
}

bool to_bool(const std::string& s, int line) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("expected a boolean, got '" + s + "'", line);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
  return s;
}

// Parses "[[a,b,c,d], [..]]" or "[]" into groups of four numbers.
std::vector<Box2> to_boxes(const std::string& s, int line) {
  std::vector<Box2> boxes;
  std::vector<double> nums;
  int depth = 0;
  std::string tok;
  auto flush = [&] {
    const std::string t = trim(tok);
    if (!t.empty()) nums.push_back(to_number(t, line));
    tok.clear();
  };
  for (char c : s) {
    if (c == '[') {
      ++depth;
      if (depth > 2) throw ConfigError("list nested too deeply", line);
    } else if (c == ']') {
      flush();
      if (depth == 2) {
        if (nums.size() != 4) throw ConfigError("a box needs 4 numbers [xmin, ymin, xmax, ymax]", line);
        boxes.push_back({nums[0], nums[1], nums[2], nums[3]});
        nums.clear();
      }
      --depth;
      if (depth < 0) throw ConfigError("unbalanced brackets", line);
    } else if (c == ',') {
      flush();
    } else {
      if (depth < 2 && c != ' ' && c != '\t') throw ConfigError("unexpected character in box list", line);
      tok += c;
    }
  }
  if (depth != 0) throw ConfigError("unbalanced brackets", line);
  if (!nums.empty()) throw ConfigError("numbers outside a box", line);
  return boxes;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(spacing > 0)) throw ConfigError("spacing_w must be > 0");
  if (!(density_exponent >= 0)) throw ConfigError("density_exponent must be >= 0");
  if (!(ratio_threshold > 0)) throw ConfigError("ratio_mu must be > 0");
  if (!(compat_threshold > 0 && compat_threshold < 1)) throw ConfigError("compat_eta must lie in (0, 1)");
  if (smoothing_iterations < 1) throw ConfigError("smoothing_iterations must be >= 1");
  if (!(layer_height > 0)) throw ConfigError("layer_height must be > 0");
  if (!std::isfinite(z_offset)) throw ConfigError("z_offset must be finite");
  if (!(min_path_length >= 0)) throw ConfigError("min_path_length_mm must be >= 0");
  if (!(heat_t_scale > 0)) throw ConfigError("heat_t_scale must be > 0");
  if (!(zigzag_spacing >= 0)) throw ConfigError("zigzag_spacing must be >= 0");
  for (const auto& b : boundary_boxes)
    if (!(b.xmin <= b.xmax && b.ymin <= b.ymax)) throw ConfigError("boundary box has min > max");
}

PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  PipelineConfig cfg;
  std::string raw;
  int line = 0;
  auto resolve = [&](const std::string& v) {
    std::filesystem::path p = unquote(v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(text.substr(0, eq));
    const std::string val = trim(text.substr(eq + 1));
    if (val.empty()) throw ConfigError("missing value for '" + key + "'", line);

    if (key == "mesh_path") cfg.mesh_path = resolve(val);
    else if (key == "stress_path") cfg.stress_path = resolve(val);
    else if (key == "output_dir") cfg.output_dir = resolve(val);
    else if (key == "spacing_w") cfg.spacing = to_number(val, line);
    else if (key == "density_exponent") cfg.density_exponent = to_number(val, line);
    else if (key == "ratio_mu") cfg.ratio_threshold = to_number(val, line);
    else if (key == "compat_eta") cfg.compat_threshold = to_number(val, line);
    else if (key == "smoothing_iterations") cfg.smoothing_iterations = to_int(val, line);
    else if (key == "layer_height") cfg.layer_height = to_number(val, line);
    else if (key == "z_offset") cfg.z_offset = to_number(val, line);
    else if (key == "min_path_length_mm") cfg.min_path_length = to_number(val, line);
    else if (key == "boundary_source_boxes") cfg.boundary_boxes = to_boxes(val, line);
    else if (key == "heat_t_scale") cfg.heat_t_scale = to_number(val, line);
    else if (key == "zigzag_spacing") cfg.zigzag_spacing = to_number(val, line);
    else if (key == "zigzag_angle") cfg.zigzag_angle = to_number(val, line);
    else if (key == "eq6_area_weight") cfg.area_weight = to_bool(val, line);
    else throw ConfigError("unknown key '" + key + "'", line);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return parse_config(in, path.parent_path());
}

void write_config(std::ostream& out, const PipelineConfig& cfg) {
  out << "mesh_path = " << cfg.mesh_path.string() << '\n'
      << "stress_path = " << cfg.stress_path.string() << '\n'
      << "output_dir = " << cfg.output_dir.string() << '\n'
      << "spacing_w = " << format_double(cfg.spacing) << '\n'
      << "density_exponent = " << format_double(cfg.density_exponent) << '\n'
      << "ratio_mu = " << format_double(cfg.ratio_threshold) << '\n'
      << "compat_eta = " << format_double(cfg.compat_threshold) << '\n'
      << "smoothing_iterations = " << cfg.smoothing_iterations << '\n'
      << "layer_height = " << format_double(cfg.layer_height) << '\n'
      << "z_offset = " << format_double(cfg.z_offset) << '\n'
      << "min_path_length_mm = " << format_double(cfg.min_path_length) << '\n'
      << "heat_t_scale = " << format_double(cfg.heat_t_scale) << '\n'
      << "zigzag_spacing = " << format_double(cfg.zigzag_spacing) << '\n'
      << "zigzag_angle = " << format_double(cfg.zigzag_angle) << '\n'
      << "eq6_area_weight = " << (cfg.area_weight ? "true" : "false") << '\n'
      << "boundary_source_boxes = [";
  for (std::size_t i = 0; i < cfg.boundary_boxes.size(); ++i) {
    const auto& b = cfg.boundary_boxes[i];
    out << (i ? ", " : "") << '[' << format_double(b.xmin) << ", " << format_double(b.ymin) << ", "
        << format_double(b.xmax) << ", " << format_double(b.ymax) << ']';
  }
  out << "]\n";
}

}  // namespace fibrepath
