#pragma once

#include "fibrepath/geometry.hpp"
#include "fibrepath/mesh_io.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace fibrepath {

/// Principal stresses sorted by descending absolute value (ties: larger
/// signed value first), with unit principal directions.
struct PrincipalStress {
  std::array<double, 3> values{};
  std::array<Vec3, 3> directions{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
};

enum class VectorStatus : unsigned char { defined, undefined, weak };

const char* to_string(VectorStatus s);

/// Stress weight assigned to elements without a usable tensile direction.
inline constexpr double kWeakStress = 1e-5;
inline constexpr double kDefaultRatioThreshold = 3.0;  // mu
inline constexpr double kDefaultCompatThreshold = 0.5; // eta

struct TensileSelection {
  Vec3 direction = Vec3::Zero();
  double sigma = kWeakStress;
  VectorStatus status = VectorStatus::weak;
};

/// Per-element tensile direction field on a tet mesh.
struct ElementField {
  std::vector<Vec3> vectors;
  std::vector<double> sigma;
  std::vector<VectorStatus> status;

  std::size_t size() const { return vectors.size(); }
  bool has_vector(std::size_t e) const { return status[e] != VectorStatus::undefined; }
};

PrincipalStress principal_decompose(const SymTensor3& t);

TensileSelection select_tensile_vector(const PrincipalStress& p, double mu = kDefaultRatioThreshold);

/// Weight of a graph edge between two elements: 1 - |cos angle|.
double orientation_edge_weight(const Vec3& a, const Vec3& b);

/// Flips vector signs so that face-adjacent elements agree, propagating along
/// a minimum spanning tree of the face-adjacency graph (Prim, seeded at the
/// most stressed element of each connected component).
ElementField reorient_mst(const ElementField& field, const TetMesh& mesh);

/// Marks elements whose vector disagrees (dot <= eta) with every
/// vertex-sharing neighbour as undefined. Single pass over a frozen copy.
ElementField remove_incompatible(const ElementField& field, const TetMesh& mesh,
                                 double eta = kDefaultCompatThreshold);

ElementField compute_element_field(const TetMesh& mesh, const std::vector<SymTensor3>& tensors,
                                   double mu = kDefaultRatioThreshold, double eta = kDefaultCompatThreshold);

/// `<id> <status> <vx> <vy> <vz> <sigma>` per element.
void write_element_field(std::ostream& out, const ElementField& field);

}  // namespace fibrepath
