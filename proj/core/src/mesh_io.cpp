#include "fibrepath/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

namespace fibrepath {

FormatError::FormatError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

double TetMesh::signed_volume(std::size_t tet) const {
  const auto& t = tets[tet];
  const Vec3 a = vertices[t[1]] - vertices[t[0]];
  const Vec3 b = vertices[t[2]] - vertices[t[0]];
  const Vec3 c = vertices[t[3]] - vertices[t[0]];
  return a.dot(b.cross(c)) / 6.0;
}

Vec3 TetMesh::centroid(std::size_t tet) const {
  const auto& t = tets[tet];
  return 0.25 * (vertices[t[0]] + vertices[t[1]] + vertices[t[2]] + vertices[t[3]]);
}

Eigen::Matrix3d SymTensor3::matrix() const {
  Eigen::Matrix3d m;
  m << xx, xy, xz,
       xy, yy, yz,
       xz, yz, zz;
  return m;
}

SymTensor3 SymTensor3::from_matrix(const Eigen::Matrix3d& m) {
  return {m(0, 0), m(1, 1), m(2, 2), 0.5 * (m(0, 1) + m(1, 0)), 0.5 * (m(1, 2) + m(2, 1)),
          0.5 * (m(0, 2) + m(2, 0))};
}

bool SymTensor3::finite() const {
  return std::isfinite(xx) && std::isfinite(yy) && std::isfinite(zz) && std::isfinite(xy) &&
         std::isfinite(yz) && std::isfinite(xz);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

// Line reader that skips blank and '#' comment lines and tracks line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string_view>& tokens) {
    while (std::getline(in_, line_)) {
      ++lineno_;
      tokenize();
      if (tokens_.empty() || tokens_.front().front() == '#') continue;
      tokens = tokens_;
      return true;
    }
    return false;
  }

  // The header must be the very first line.
  bool header(std::vector<std::string_view>& tokens) {
    if (!std::getline(in_, line_)) return false;
    ++lineno_;
    tokenize();
    tokens = tokens_;
    return true;
  }

  int line() const { return lineno_; }

 private:
  void tokenize() {
    tokens_.clear();
    std::string_view sv(line_);
    std::size_t i = 0;
    while (i < sv.size()) {
      while (i < sv.size() && std::isspace(static_cast<unsigned char>(sv[i]))) ++i;
      std::size_t j = i;
      while (j < sv.size() && !std::isspace(static_cast<unsigned char>(sv[j]))) ++j;
      if (j > i) tokens_.push_back(sv.substr(i, j - i));
      i = j;
    }
  }

  std::istream& in_;
  std::string line_;
  std::vector<std::string_view> tokens_;
  int lineno_ = 0;
};

double parse_double(std::string_view s, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // from_chars rejects "inf"/"nan" spellings on some libstdc++ versions.
    if (s == "nan" || s == "NaN") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw FormatError("invalid number '" + std::string(s) + "'", line);
  }
  return v;
}

long long parse_int(std::string_view s, int line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError("invalid integer '" + std::string(s) + "'", line);
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

TetMesh read_tet_mesh(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string_view> tok;
  if (!reader.header(tok) || tok.size() != 4 || tok[0] != "tetmesh" || tok[1] != "v1")
    throw FormatError("expected header 'tetmesh v1 <nv> <nt>'", reader.line());
  const long long nv = parse_int(tok[2], reader.line());
  const long long nt = parse_int(tok[3], reader.line());
  if (nv < 0 || nt < 0) throw FormatError("negative count in header", reader.line());

  TetMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  mesh.tets.reserve(static_cast<std::size_t>(nt));
  for (long long i = 0; i < nv; ++i) {
    if (!reader.next(tok)) throw FormatError("unexpected end of file in vertex block", reader.line());
    if (tok.size() != 4 || tok[0] != "v") throw FormatError("expected 'v <x> <y> <z>'", reader.line());
    Vec3 p(parse_double(tok[1], reader.line()), parse_double(tok[2], reader.line()),
           parse_double(tok[3], reader.line()));
    if (!p.allFinite()) throw FormatError("non-finite vertex coordinate", reader.line());
    mesh.vertices.push_back(p);
  }
  for (long long i = 0; i < nt; ++i) {
    if (!reader.next(tok)) throw FormatError("unexpected end of file in tet block", reader.line());
    if (tok.size() != 5 || tok[0] != "t") throw FormatError("expected 't <i0> <i1> <i2> <i3>'", reader.line());
    std::array<int, 4> t{};
    for (int k = 0; k < 4; ++k) {
      const long long idx = parse_int(tok[k + 1], reader.line());
      if (idx < 0 || idx >= nv)
        throw FormatError("vertex index " + std::to_string(idx) + " out of range [0," + std::to_string(nv) + ")",
                          reader.line());
      t[k] = static_cast<int>(idx);
    }
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (t[a] == t[b]) throw FormatError("tet has repeated vertex index", reader.line());
    mesh.tets.push_back(t);
    const double vol = mesh.signed_volume(mesh.tets.size() - 1);
    if (!(vol > 0.0))
      throw FormatError("tet " + std::to_string(i) + " is inverted or degenerate (volume " + format_double(vol) + ")",
                        reader.line());
  }
  if (reader.next(tok)) throw FormatError("trailing data after tet block", reader.line());
  return mesh;
}

TetMesh load_tet_mesh(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_tet_mesh(in);
}

void write_tet_mesh(std::ostream& out, const TetMesh& mesh) {
  out << "tetmesh v1 " << mesh.vertices.size() << ' ' << mesh.tets.size() << '\n';
  for (const auto& v : mesh.vertices)
    out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
  for (const auto& t : mesh.tets) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
}

void save_tet_mesh(const std::filesystem::path& path, const TetMesh& mesh) {
  auto out = open_output(path);
  write_tet_mesh(out, mesh);
}

std::vector<SymTensor3> read_stress_field(std::istream& in, const TetMesh& mesh) {
  LineReader reader(in);
  std::vector<std::string_view> tok;
  if (!reader.header(tok) || tok.size() != 3 || tok[0] != "stress" || tok[1] != "v1")
    throw FormatError("expected header 'stress v1 <nt>'", reader.line());
  const long long nt = parse_int(tok[2], reader.line());
  if (nt != static_cast<long long>(mesh.num_tets()))
    throw FormatError("stress count " + std::to_string(nt) + " does not match mesh tet count " +
                          std::to_string(mesh.num_tets()),
                      reader.line());
  std::vector<SymTensor3> out;
  out.reserve(static_cast<std::size_t>(nt));
  for (long long i = 0; i < nt; ++i) {
    if (!reader.next(tok))
      throw FormatError("stress count mismatch: file ends after " + std::to_string(i) + " of " +
                            std::to_string(nt) + " tensors",
                        reader.line());
    if (tok.size() != 6) throw FormatError("expected 6 stress components", reader.line());
    double c[6];
    for (int k = 0; k < 6; ++k) c[k] = parse_double(tok[k], reader.line());
    SymTensor3 t{c[0], c[1], c[2], c[3], c[4], c[5]};
    if (!t.finite()) throw FormatError("non-finite stress component", reader.line());
    out.push_back(t);
  }
  if (reader.next(tok)) throw FormatError("stress count mismatch: trailing tensor data", reader.line());
  return out;
}

std::vector<SymTensor3> load_stress_field(const std::filesystem::path& path, const TetMesh& mesh) {
  auto in = open_input(path);
  return read_stress_field(in, mesh);
}

void write_stress_field(std::ostream& out, const std::vector<SymTensor3>& tensors) {
  out << "stress v1 " << tensors.size() << '\n';
  for (const auto& t : tensors)
    out << format_double(t.xx) << ' ' << format_double(t.yy) << ' ' << format_double(t.zz) << ' '
        << format_double(t.xy) << ' ' << format_double(t.yz) << ' ' << format_double(t.xz) << '\n';
}

void save_stress_field(const std::filesystem::path& path, const std::vector<SymTensor3>& tensors) {
  auto out = open_output(path);
  write_stress_field(out, tensors);
}

void build_adjacency(TetMesh& mesh) {
  const std::size_t nt = mesh.tets.size();
  static constexpr int kFaces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};

  std::map<std::array<int, 3>, std::vector<int>> faces;
  for (std::size_t t = 0; t < nt; ++t) {
    for (const auto& f : kFaces) {
      std::array<int, 3> key{mesh.tets[t][f[0]], mesh.tets[t][f[1]], mesh.tets[t][f[2]]};
      std::sort(key.begin(), key.end());
      faces[key].push_back(static_cast<int>(t));
    }
  }

  std::vector<std::vector<int>> face_adj(nt);
  for (const auto& [key, owners] : faces) {
    if (owners.size() > 2)
      throw MeshError("non-manifold face (" + std::to_string(key[0]) + "," + std::to_string(key[1]) + "," +
                      std::to_string(key[2]) + ") shared by " + std::to_string(owners.size()) + " tets");
    if (owners.size() == 2) {
      face_adj[owners[0]].push_back(owners[1]);
      face_adj[owners[1]].push_back(owners[0]);
    }
  }

  std::vector<std::vector<int>> vertex_tets(mesh.vertices.size());
  for (std::size_t t = 0; t < nt; ++t)
    for (int v : mesh.tets[t]) vertex_tets[v].push_back(static_cast<int>(t));

  std::vector<std::vector<int>> vert_adj(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    auto& nb = vert_adj[t];
    for (int v : mesh.tets[t])
      for (int o : vertex_tets[v])
        if (o != static_cast<int>(t)) nb.push_back(o);
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    std::sort(face_adj[t].begin(), face_adj[t].end());
  }
  mesh.face_adjacency = std::move(face_adj);
  mesh.vertex_adjacency = std::move(vert_adj);
}

TetMesh with_adjacency(TetMesh mesh) {
  build_adjacency(mesh);
  return mesh;
}

}  // namespace fibrepath
