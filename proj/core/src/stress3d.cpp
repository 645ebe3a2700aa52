#include "fibrepath/stress3d.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace fibrepath {

const char* to_string(VectorStatus s) {
  switch (s) {
    case VectorStatus::defined: return "defined";
    case VectorStatus::undefined: return "undefined";
    case VectorStatus::weak: return "weak";
  }
  return "?";
}

namespace {

// Eigenvector sign is arbitrary; pin it so the largest component is positive.
Vec3 canonical_sign(Vec3 v) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[k]) + 1e-12) k = i;
  return v[k] < 0.0 ? Vec3(-v) : v;
}

}  // namespace

PrincipalStress principal_decompose(const SymTensor3& t) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(t.matrix());
  const Eigen::Vector3d& vals = solver.eigenvalues();
  const Eigen::Matrix3d& vecs = solver.eigenvectors();

  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double aa = std::abs(vals[a]), ab = std::abs(vals[b]);
    if (aa != ab) return aa > ab;
    return vals[a] > vals[b];
  });

  PrincipalStress p;
  for (int i = 0; i < 3; ++i) {
    p.values[i] = vals[order[i]];
    p.directions[i] = canonical_sign(vecs.col(order[i]).normalized());
  }
  return p;
}

TensileSelection select_tensile_vector(const PrincipalStress& p, double mu) {
  const double s1 = p.values[0];
  const double s2 = p.values[1];
  if (s1 > 0.0) return {p.directions[0], s1, VectorStatus::defined};
  if (s1 < 0.0 && s2 > 0.0 && std::abs(s1 / s2) < mu) return {p.directions[1], s2, VectorStatus::defined};
  return {p.directions[0], kWeakStress, VectorStatus::weak};
}

double orientation_edge_weight(const Vec3& a, const Vec3& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return std::clamp(1.0 - std::abs(a.dot(b) / (na * nb)), 0.0, 1.0);
}

ElementField reorient_mst(const ElementField& field, const TetMesh& mesh) {
  if (!mesh.has_adjacency()) throw std::invalid_argument("reorient_mst: mesh adjacency not built");
  const std::size_t n = field.size();
  ElementField out = field;

  std::vector<int> seeds;
  for (std::size_t e = 0; e < n; ++e)
    if (field.has_vector(e)) seeds.push_back(static_cast<int>(e));
  if (seeds.empty()) throw std::invalid_argument("reorient_mst: no element carries a vector");
  std::stable_sort(seeds.begin(), seeds.end(), [&](int a, int b) { return field.sigma[a] > field.sigma[b]; });

  using Edge = std::tuple<double, int, int>;  // weight, target, source
  std::priority_queue<Edge, std::vector<Edge>, std::greater<>> heap;
  std::vector<char> visited(n, 0);

  auto push_edges = [&](int from) {
    for (int to : mesh.face_adjacency[from]) {
      if (visited[to] || !field.has_vector(to)) continue;
      heap.emplace(orientation_edge_weight(out.vectors[from], out.vectors[to]), to, from);
    }
  };

  for (int seed : seeds) {
    if (visited[seed]) continue;
    visited[seed] = 1;
    push_edges(seed);
    while (!heap.empty()) {
      auto [w, to, from] = heap.top();
      heap.pop();
      if (visited[to]) continue;
      visited[to] = 1;
      if (out.vectors[from].dot(out.vectors[to]) < 0.0) out.vectors[to] = -out.vectors[to];
      push_edges(to);
    }
  }
  return out;
}

ElementField remove_incompatible(const ElementField& field, const TetMesh& mesh, double eta) {
  if (!mesh.has_adjacency()) throw std::invalid_argument("remove_incompatible: mesh adjacency not built");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("remove_incompatible: eta must lie in (0,1)");
  ElementField out = field;
  for (std::size_t e = 0; e < field.size(); ++e) {
    if (!field.has_vector(e)) continue;
    bool any_neighbour = false;
    bool compatible = false;
    for (int o : mesh.vertex_adjacency[e]) {
      if (!field.has_vector(o)) continue;
      any_neighbour = true;
      if (field.vectors[e].dot(field.vectors[o]) > eta) {
        compatible = true;
        break;
      }
    }
    if (any_neighbour && !compatible) out.status[e] = VectorStatus::undefined;
  }
  return out;
}

ElementField compute_element_field(const TetMesh& mesh, const std::vector<SymTensor3>& tensors, double mu,
                                   double eta) {
  if (tensors.size() != mesh.num_tets())
    throw std::invalid_argument("compute_element_field: tensor count does not match tet count");
  if (!(mu > 0.0)) throw std::invalid_argument("compute_element_field: mu must be positive");

  ElementField field;
  field.vectors.resize(tensors.size());
  field.sigma.resize(tensors.size());
  field.status.resize(tensors.size());
  for (std::size_t e = 0; e < tensors.size(); ++e) {
    const auto sel = select_tensile_vector(principal_decompose(tensors[e]), mu);
    field.vectors[e] = sel.direction;
    field.sigma[e] = sel.sigma;
    field.status[e] = sel.status;
  }
  return remove_incompatible(reorient_mst(field, mesh), mesh, eta);
}

void write_element_field(std::ostream& out, const ElementField& field) {
  for (std::size_t e = 0; e < field.size(); ++e) {
    const Vec3& v = field.vectors[e];
    out << e << ' ' << to_string(field.status[e]) << ' ' << format_double(v.x()) << ' ' << format_double(v.y())
        << ' ' << format_double(v.z()) << ' ' << format_double(field.sigma[e]) << '\n';
  }
}

}  // namespace fibrepath
