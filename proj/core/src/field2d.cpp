#include "fibrepath/field2d.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fibrepath {

void smoothing_sweep(FaceField& ff, const LayerMesh& layer, const std::vector<char>& pinned) {
  const auto& nbrs = layer.topology.face_neighbors;
  const std::vector<Vec2> v_old = ff.v;
  const std::vector<double> s_old = ff.sigma;
  for (std::size_t f = 0; f < ff.size(); ++f) {
    if (pinned[f] || nbrs[f].empty()) continue;
    Vec2 v = Vec2::Zero();
    double s = 0.0;
    for (int g : nbrs[f]) {
      v += v_old[g];
      s += s_old[g];
    }
    const double inv = 1.0 / static_cast<double>(nbrs[f].size());
    ff.v[f] = v * inv;
    ff.sigma[f] = s * inv;
  }
}

double sigma_energy(const FaceField& ff, const LayerMesh& layer) {
  double e = 0.0;
  const auto& nbrs = layer.topology.face_neighbors;
  for (std::size_t f = 0; f < ff.size(); ++f) {
    if (nbrs[f].empty()) continue;
    double local = 0.0;
    for (int g : nbrs[f]) local += (ff.sigma[f] - ff.sigma[g]) * (ff.sigma[f] - ff.sigma[g]);
    e += local / static_cast<double>(nbrs[f].size());
  }
  return e;
}

double vector_energy(const FaceField& ff, const LayerMesh& layer) {
  double e = 0.0;
  const auto& nbrs = layer.topology.face_neighbors;
  for (std::size_t f = 0; f < ff.size(); ++f) {
    if (nbrs[f].empty()) continue;
    double local = 0.0;
    for (int g : nbrs[f]) local += (ff.v[f] - ff.v[g]).squaredNorm();
    e += local / static_cast<double>(nbrs[f].size());
  }
  return e;
}

FaceField complete_and_smooth(const FaceField& ff, const LayerMesh& layer, int iterations) {
  if (iterations < 1) throw std::invalid_argument("complete_and_smooth: iterations must be >= 1");
  if (ff.size() != layer.num_faces()) throw std::invalid_argument("complete_and_smooth: field/layer size mismatch");
  const auto& topo = layer.topology;

  FaceField out = ff;
  out.u.clear();
  std::vector<int> pin_of_component(static_cast<std::size_t>(topo.num_components), -1);
  for (std::size_t f = 0; f < ff.size(); ++f) {
    if (ff.status[f] != FaceStatus::defined) {
      out.v[f] = Vec2::Zero();
      continue;
    }
    int& pin = pin_of_component[topo.face_component[f]];
    if (pin < 0 || ff.sigma[f] > ff.sigma[pin]) pin = static_cast<int>(f);
  }
  int global_pin = -1;
  for (int pin : pin_of_component)
    if (pin >= 0 && (global_pin < 0 || ff.sigma[pin] > ff.sigma[global_pin])) global_pin = pin;
  if (global_pin < 0) throw SolveError("complete_and_smooth: no defined face on the layer");

  std::vector<char> pinned(ff.size(), 0);
  for (int pin : pin_of_component)
    if (pin >= 0) pinned[pin] = 1;

  for (int it = 0; it < iterations; ++it) smoothing_sweep(out, layer, pinned);

  // Faces the diffusion front has not reached yet take the mean of their
  // reached neighbours, one ring at a time.
  auto unreached = [&](std::size_t f) { return out.v[f].squaredNorm() < 1e-24; };
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::pair<int, Vec2>> updates;
    for (std::size_t f = 0; f < out.size(); ++f) {
      if (!unreached(f)) continue;
      Vec2 sum = Vec2::Zero();
      Vec2 first = Vec2::Zero();
      for (int g : topo.face_neighbors[f])
        if (!unreached(g)) {
          if (first.squaredNorm() == 0.0) first = out.v[g];
          sum += out.v[g].normalized();
        }
      if (first.squaredNorm() == 0.0) continue;
      updates.emplace_back(static_cast<int>(f), sum.squaredNorm() > 1e-24 ? sum : first);
    }
    for (const auto& [f, v] : updates) {
      out.v[f] = v;
      changed = true;
    }
  }
  for (std::size_t f = 0; f < out.size(); ++f) {
    if (unreached(f)) out.v[f] = ff.v[global_pin];  // component without any defined face
    out.v[f].normalize();
    out.status[f] = FaceStatus::defined;
  }
  return out;
}

FaceField weight_vectors(const FaceField& ff, double p) {
  if (!(p >= 0.0)) throw std::invalid_argument("weight_vectors: exponent must be >= 0");
  FaceField out = ff;
  out.u.resize(ff.size());
  for (std::size_t f = 0; f < ff.size(); ++f) {
    const double n = ff.v[f].norm();
    if (!(n > 0.0)) throw SolveError("weight_vectors: zero vector on face " + std::to_string(f));
    out.u[f] = std::pow(ff.sigma[f], p) * ff.v[f] / n;
  }
  return out;
}

FaceField quarter_turn_targets(const FaceField& ff) {
  FaceField out = ff;
  for (auto& u : out.u) u = perp(u);
  return out;
}

std::vector<double> fit_gradient_field(const LayerMesh& layer, const std::vector<Vec2>& targets,
                                       const std::vector<std::pair<int, double>>& pinned,
                                       const GradientFitOptions& options) {
  const std::size_t nv = layer.num_vertices();
  const std::size_t nf = layer.num_faces();
  if (targets.size() != nf) throw std::invalid_argument("fit_gradient_field: target count mismatch");
  const auto& topo = layer.topology;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> values(nv, kInf);
  std::vector<char> is_pinned(nv, 0);
  std::vector<char> component_pinned(static_cast<std::size_t>(topo.num_components), 0);
  for (const auto& [v, val] : pinned) {
    if (v < 0 || static_cast<std::size_t>(v) >= nv) throw std::invalid_argument("fit_gradient_field: bad pin");
    is_pinned[v] = 1;
    values[v] = val;
    if (topo.vertex_component[v] >= 0) component_pinned[topo.vertex_component[v]] = 1;
  }

  std::vector<int> unknown(nv, -1);
  int n = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    const int c = topo.vertex_component[v];
    if (c >= 0 && component_pinned[c] && !is_pinned[v]) unknown[v] = n++;
  }
  if (n == 0) return values;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * nf);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& t = layer.triangles[f];
    const int c = topo.face_component[f];
    if (!component_pinned[c]) continue;
    const double w = options.area_weight ? layer.face_area[f] : 1.0;
    const auto g = shape_gradients(layer, f);
    for (int a = 0; a < 3; ++a) {
      const int ia = unknown[t[a]];
      if (ia < 0) continue;
      rhs[ia] += w * g[a].dot(targets[f]);
      for (int b = 0; b < 3; ++b) {
        const double k = w * g[a].dot(g[b]);
        const int ib = unknown[t[b]];
        if (ib >= 0) trips.emplace_back(ia, ib, k);
        else if (is_pinned[t[b]]) rhs[ia] -= k * values[t[b]];
      }
    }
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trips.begin(), trips.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(K);
  if (solver.info() != Eigen::Success) throw SolveError("fit_gradient_field: factorization failed");
  Eigen::VectorXd x = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !x.allFinite())
    throw SolveError("fit_gradient_field: singular system after anchoring");

  const double bnorm = rhs.norm();
  if (bnorm > 0.0) {
    double rel = (K * x - rhs).norm() / bnorm;
    for (int refine = 0; refine < 3 && rel > options.residual_tolerance; ++refine) {
      x += solver.solve(rhs - K * x);
      rel = (K * x - rhs).norm() / bnorm;
    }
    if (rel > options.residual_tolerance)
      throw SolveError("fit_gradient_field: relative residual " + std::to_string(rel) + " above tolerance");
  }
  for (std::size_t v = 0; v < nv; ++v)
    if (unknown[v] >= 0) values[v] = x[unknown[v]];
  return values;
}

double gradient_fit_residual(const LayerMesh& layer, const std::vector<double>& s, const std::vector<Vec2>& targets,
                             bool area_weight) {
  double r = 0.0;
  for (std::size_t f = 0; f < layer.num_faces(); ++f) {
    const double w = area_weight ? layer.face_area[f] : 1.0;
    r += w * (face_gradient(layer, f, s) - targets[f]).squaredNorm();
  }
  return r;
}

ScalarField solve_scalar_field(const LayerMesh& layer, const FaceField& ff, const GradientFitOptions& options) {
  if (ff.u.size() != layer.num_faces()) throw std::invalid_argument("solve_scalar_field: weighted field missing");
  const auto& topo = layer.topology;
  std::vector<int> best(static_cast<std::size_t>(topo.num_components), -1);
  for (std::size_t f = 0; f < layer.num_faces(); ++f) {
    int& b = best[topo.face_component[f]];
    if (b < 0 || ff.sigma[f] > ff.sigma[b]) b = static_cast<int>(f);
  }
  ScalarField out;
  std::vector<std::pair<int, double>> pins;
  for (int f : best) {
    const auto& t = layer.triangles[f];
    const int anchor = std::min({t[0], t[1], t[2]});
    out.anchors.push_back(anchor);
    pins.emplace_back(anchor, 0.0);
  }
  out.values = fit_gradient_field(layer, ff.u, pins, options);
  for (auto& v : out.values)
    if (!std::isfinite(v)) v = 0.0;  // vertices referenced by no face
  out.residual = gradient_fit_residual(layer, out.values, ff.u, options.area_weight);
  return out;
}

}  // namespace fibrepath
