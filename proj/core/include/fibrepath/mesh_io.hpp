#pragma once

#include "fibrepath/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fibrepath {

/// Raised for malformed mesh/stress/toolpath files. `line()` is 1-based, 0 if
/// the error is not tied to a line.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, int line);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tetrahedral solid. Adjacency lists are empty until build_adjacency() runs.
struct TetMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<std::vector<int>> face_adjacency;
  std::vector<std::vector<int>> vertex_adjacency;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_tets() const { return tets.size(); }
  bool has_adjacency() const { return face_adjacency.size() == tets.size() && !tets.empty(); }

  double signed_volume(std::size_t tet) const;
  Vec3 centroid(std::size_t tet) const;
};

/// Symmetric Cauchy stress tensor (MPa), six independent components.
struct SymTensor3 {
  double xx = 0, yy = 0, zz = 0, xy = 0, yz = 0, xz = 0;

  Eigen::Matrix3d matrix() const;
  static SymTensor3 from_matrix(const Eigen::Matrix3d& m);
  bool finite() const;
  friend bool operator==(const SymTensor3&, const SymTensor3&) = default;
};

TetMesh read_tet_mesh(std::istream& in);
TetMesh load_tet_mesh(const std::filesystem::path& path);
void write_tet_mesh(std::ostream& out, const TetMesh& mesh);
void save_tet_mesh(const std::filesystem::path& path, const TetMesh& mesh);

std::vector<SymTensor3> read_stress_field(std::istream& in, const TetMesh& mesh);
std::vector<SymTensor3> load_stress_field(const std::filesystem::path& path, const TetMesh& mesh);
void write_stress_field(std::ostream& out, const std::vector<SymTensor3>& tensors);
void save_stress_field(const std::filesystem::path& path, const std::vector<SymTensor3>& tensors);

/// Fills face and vertex adjacency. Idempotent. Throws MeshError when a
/// triangle face is shared by more than two tets.
void build_adjacency(TetMesh& mesh);
TetMesh with_adjacency(TetMesh mesh);

// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace fibrepath
