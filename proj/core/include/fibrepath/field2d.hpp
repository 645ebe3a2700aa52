#pragma once

#include "fibrepath/layer_mesh.hpp"
#include "fibrepath/slicer.hpp"

#include <stdexcept>
#include <vector>

namespace fibrepath {

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultSmoothingIterations = 50;
inline constexpr double kDefaultDensityExponent = 1.0;

/// Piecewise-linear per-vertex scalar field on a layer.
struct ScalarField {
  std::vector<double> values;
  double residual = 0.0;         // final least-squares objective
  std::vector<int> anchors;      // one pinned vertex per connected component
};

/// Laplacian completion/smoothing of sigma and v over edge-neighbour faces.
/// The defined face of maximal sigma (per component) is held fixed. Returns a
/// field with every face defined and unit vectors.
FaceField complete_and_smooth(const FaceField& ff, const LayerMesh& layer,
                              int iterations = kDefaultSmoothingIterations);

/// One Jacobi sweep; exposed for energy monitoring. `pinned[f]` faces keep their values.
void smoothing_sweep(FaceField& ff, const LayerMesh& layer, const std::vector<char>& pinned);

/// Mean-over-neighbours smoothness energies for sigma and v.
double sigma_energy(const FaceField& ff, const LayerMesh& layer);
double vector_energy(const FaceField& ff, const LayerMesh& layer);

/// u_f = sigma_f^p v_f / |v_f|.
FaceField weight_vectors(const FaceField& ff, double p = kDefaultDensityExponent);

/// Rotates every u_f by a quarter turn so the fitted field's level sets run
/// along v_f rather than across it.
FaceField quarter_turn_targets(const FaceField& ff);

struct GradientFitOptions {
  bool area_weight = true;
  double residual_tolerance = 1e-10;
};

/// Least-squares fit of a piecewise-linear field whose per-face gradient
/// matches `targets`, with Dirichlet values at `pinned` vertices. Components
/// with no pinned vertex are left at +infinity.
std::vector<double> fit_gradient_field(const LayerMesh& layer, const std::vector<Vec2>& targets,
                                       const std::vector<std::pair<int, double>>& pinned,
                                       const GradientFitOptions& options = {});

/// Objective sum_f w_f |grad s - u_f|^2.
double gradient_fit_residual(const LayerMesh& layer, const std::vector<double>& s, const std::vector<Vec2>& targets,
                             bool area_weight = true);

/// Fits s to the weighted field `ff.u`, anchoring the lowest-index vertex of
/// the max-sigma face of each component to zero.
ScalarField solve_scalar_field(const LayerMesh& layer, const FaceField& ff, const GradientFitOptions& options = {});

}  // namespace fibrepath
