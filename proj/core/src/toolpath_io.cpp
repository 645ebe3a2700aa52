#include "fibrepath/toolpath_io.hpp"

#include "fibrepath/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

namespace fibrepath {

namespace {

double parse_num(std::string_view s, int line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("bad number '" + std::string(s) + "'", line);
  return v;
}

long parse_count(std::string_view s, int line) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
    throw FormatError("bad count '" + std::string(s) + "'", line);
  return v;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

std::string_view after_prefix(std::string_view tok, std::string_view prefix, int line) {
  if (tok.substr(0, prefix.size()) != prefix)
    throw FormatError("expected '" + std::string(prefix) + "...', got '" + std::string(tok) + "'", line);
  return tok.substr(prefix.size());
}

const char* color(PathKind k) {
  switch (k) {
    case PathKind::stress: return "blue";
    case PathKind::boundary: return "green";
    case PathKind::connector: return "red";
    case PathKind::zigzag: return "gray";
  }
  return "black";
}

// Maps t in [0,1] to a blue-to-red ramp.
std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 * t));
  const int b = 255 - r;
  const int g = static_cast<int>(std::lround(255 * (1 - std::abs(2 * t - 1)) * 0.6));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

void write_toolpaths(std::ostream& out, const std::vector<LayerToolpaths>& layers) {
  out << "toolpaths v1 " << layers.size() << '\n';
  for (const auto& l : layers) {
    out << "layer " << l.index << " z=" << format_double(l.z) << ' ' << l.paths.size() << '\n';
    for (const auto& p : l.paths) {
      out << "path " << to_string(p.kind) << ' ' << p.points.size() << ' ' << (p.closed ? 1 : 0)
          << " iso=" << format_double(p.isovalue) << '\n';
      for (const auto& q : p.points) out << format_double(q.x()) << ' ' << format_double(q.y()) << '\n';
    }
  }
}

std::vector<LayerToolpaths> read_toolpaths(std::istream& in) {
  int line = 0;
  std::string raw;
  auto next = [&]() -> std::vector<std::string> {
    while (std::getline(in, raw)) {
      ++line;
      auto t = split_ws(raw);
      if (!t.empty()) return t;
    }
    throw FormatError("unexpected end of file", line);
  };
  auto head = next();
  if (head.size() != 3 || head[0] != "toolpaths" || head[1] != "v1") throw FormatError("expected 'toolpaths v1 <n>'", line);
  const long nl = parse_count(head[2], line);
  std::vector<LayerToolpaths> layers;
  for (long i = 0; i < nl; ++i) {
    auto t = next();
    if (t.size() != 4 || t[0] != "layer") throw FormatError("expected 'layer <k> z=<z> <npaths>'", line);
    LayerToolpaths l;
    l.index = static_cast<int>(parse_count(t[1], line));
    l.z = parse_num(after_prefix(t[2], "z=", line), line);
    const long np = parse_count(t[3], line);
    for (long j = 0; j < np; ++j) {
      auto h = next();
      if (h.size() != 5 || h[0] != "path") throw FormatError("expected 'path <kind> <n> <closed> iso=<v>'", line);
      Toolpath p;
      const auto kind = parse_path_kind(h[1]);
      if (!kind) throw FormatError("unknown path kind '" + h[1] + "'", line);
      p.kind = *kind;
      const long n = parse_count(h[2], line);
      if (h[3] != "0" && h[3] != "1") throw FormatError("closed flag must be 0 or 1", line);
      p.closed = h[3] == "1";
      p.isovalue = parse_num(after_prefix(h[4], "iso=", line), line);
      p.layer = l.index;
      p.points.reserve(n);
      for (long k = 0; k < n; ++k) {
        auto c = next();
        if (c.size() != 2) throw FormatError("expected '<x> <y>'", line);
        p.points.emplace_back(parse_num(c[0], line), parse_num(c[1], line));
      }
      l.paths.push_back(std::move(p));
    }
    layers.push_back(std::move(l));
  }
  while (std::getline(in, raw)) {
    ++line;
    if (!split_ws(raw).empty()) throw FormatError("trailing content", line);
  }
  return layers;
}

void save_toolpaths(const std::filesystem::path& path, const std::vector<LayerToolpaths>& layers) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_toolpaths(out, layers);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<LayerToolpaths> load_toolpaths(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_toolpaths(in);
}

void write_svg(std::ostream& out, const LayerMesh& layer, const std::vector<Toolpath>& paths,
               const SvgOptions& options) {
  double xmin = 0, ymin = 0, xmax = 1, ymax = 1;
  if (!layer.vertices.empty()) {
    xmin = ymin = INFINITY;
    xmax = ymax = -INFINITY;
    for (const auto& p : layer.vertices) {
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
  }
  const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin) + 1e-3;
  const double w = xmax - xmin + 2 * pad, h = ymax - ymin + 2 * pad;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(w) << "mm\" height=\""
      << format_double(h) << "mm\" viewBox=\"" << format_double(xmin - pad) << ' ' << format_double(-ymax - pad) << ' '
      << format_double(w) << ' ' << format_double(h) << "\">\n";
  out << "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-linejoin=\"round\">\n";

  if (options.heat && options.heat->size() == layer.vertices.size()) {
    double lo = INFINITY, hi = -INFINITY;
    for (double v : *options.heat)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    const double range = hi > lo ? hi - lo : 1.0;
    out << "<g class=\"heat\" stroke=\"none\">\n";
    for (const auto& t : layer.triangles) {
      double mean = 0;
      bool ok = true;
      for (int v : t) {
        ok = ok && std::isfinite((*options.heat)[v]);
        mean += (*options.heat)[v] / 3;
      }
      out << "<polygon fill=\"" << (ok ? heat_color((mean - lo) / range) : std::string("#cccccc")) << "\" points=\"";
      for (int k = 0; k < 3; ++k)
        out << (k ? " " : "") << format_double(layer.vertices[t[k]].x()) << ',' << format_double(layer.vertices[t[k]].y());
      out << "\"/>\n";
    }
    out << "</g>\n";
  }

  out << "<g class=\"outline\" stroke=\"black\" stroke-width=\"" << format_double(options.stroke_width / 2) << "\">\n";
  for (const auto& loop : boundary_loops(layer)) {
    out << "<polygon points=\"";
    for (std::size_t k = 0; k < loop.size(); ++k)
      out << (k ? " " : "") << format_double(layer.vertices[loop[k]].x()) << ','
          << format_double(layer.vertices[loop[k]].y());
    out << "\"/>\n";
  }
  out << "</g>\n";

  out << "<g class=\"paths\" stroke-width=\"" << format_double(options.stroke_width) << "\">\n";
  for (const auto& p : paths) {
    out << '<' << (p.closed ? "polygon" : "polyline") << " class=\"" << to_string(p.kind) << "\" stroke=\""
        << color(p.kind) << "\" points=\"";
    for (std::size_t k = 0; k < p.points.size(); ++k)
      out << (k ? " " : "") << format_double(p.points[k].x()) << ',' << format_double(p.points[k].y());
    out << "\"/>\n";
  }
  out << "</g>\n</g>\n</svg>\n";
}

std::vector<Toolpath> read_svg_paths(std::istream& in) {
  static const std::regex re(R"re(<(polyline|polygon) class="(\w+)" stroke="\w+" points="([^"]*)"/>)re");
  std::vector<Toolpath> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::smatch m;
    if (!std::regex_search(raw, m, re)) continue;
    Toolpath p;
    const auto kind = parse_path_kind(m[2].str());
    if (!kind) continue;  // outline polygons carry no kind class
    p.kind = *kind;
    p.closed = m[1] == "polygon";
    for (const auto& tok : split_ws(m[3].str())) {
      const auto comma = tok.find(',');
      if (comma == std::string::npos) throw FormatError("bad SVG point '" + tok + "'", line);
      p.points.emplace_back(parse_num(std::string_view(tok).substr(0, comma), line),
                            parse_num(std::string_view(tok).substr(comma + 1), line));
    }
    out.push_back(std::move(p));
  }
  return out;
}

void write_gcode(std::ostream& out, const std::vector<LayerToolpaths>& layers) {
  out << "; fibrepath toolpaths, simplified G-code\n";
  out << "G21\nG90\nM83\n";
  double e = 0;
  for (const auto& l : layers) {
    out << ";LAYER " << l.index << " Z" << format_double(l.z) << '\n';
    for (const auto& p : l.paths) {
      if (p.points.empty()) continue;
      out << ";PATH " << to_string(p.kind) << '\n';
      out << "G0 X" << format_double(p.points[0].x()) << " Y" << format_double(p.points[0].y()) << '\n';
      const std::size_t n = p.points.size() + (p.closed && p.points.size() > 2 ? 1 : 0);
      for (std::size_t k = 1; k < n; ++k) {
        const Vec2& a = p.points[k - 1];
        const Vec2& b = p.points[k % p.points.size()];
        e += (b - a).norm();
        out << "G1 X" << format_double(b.x()) << " Y" << format_double(b.y()) << " E" << format_double(e) << '\n';
      }
      out << ";CUT\n";
    }
  }
}

std::vector<LayerToolpaths> read_gcode(std::istream& in) {
  std::vector<LayerToolpaths> layers;
  std::string raw;
  int line = 0;
  Toolpath* cur = nullptr;
  auto coord = [&](const std::vector<std::string>& t, char axis) {
    for (const auto& s : t)
      if (!s.empty() && s[0] == axis) return parse_num(std::string_view(s).substr(1), line);
    throw FormatError(std::string("missing ") + axis + " word", line);
  };
  PathKind kind = PathKind::stress;
  while (std::getline(in, raw)) {
    ++line;
    const auto t = split_ws(raw);
    if (t.empty()) continue;
    if (t[0] == ";LAYER") {
      if (t.size() != 3) throw FormatError("bad layer line", line);
      LayerToolpaths l;
      l.index = static_cast<int>(parse_count(t[1], line));
      l.z = parse_num(after_prefix(t[2], "Z", line), line);
      layers.push_back(std::move(l));
      cur = nullptr;
    } else if (t[0] == ";PATH" && t.size() == 2) {
      const auto k = parse_path_kind(t[1]);
      if (!k) throw FormatError("unknown path kind", line);
      kind = *k;
    } else if (t[0] == "G0") {
      if (layers.empty()) throw FormatError("move before first layer", line);
      layers.back().paths.emplace_back();
      cur = &layers.back().paths.back();
      cur->kind = kind;
      cur->layer = layers.back().index;
      cur->points.emplace_back(coord(t, 'X'), coord(t, 'Y'));
    } else if (t[0] == "G1") {
      if (!cur) throw FormatError("extrusion without travel", line);
      cur->points.emplace_back(coord(t, 'X'), coord(t, 'Y'));
    } else if (t[0] == ";CUT") {
      cur = nullptr;
    }
  }
  return layers;
}

}  // namespace fibrepath
