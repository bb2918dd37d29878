#pragma once

#include "cabbage/mesh.hpp"

namespace cabbage {

/// Moves each interior vertex a fraction alpha toward the normalized
/// (R^2 + t)/A - weighted mean of its one-ring face centers: circumcenters
/// for interior faces, barycenters for boundary faces. Jacobi-style; all
/// targets come from pre-update positions.
void smooth_interior(Mesh& mesh, Real alpha, Real t);

/// Moves each boundary vertex a fraction beta toward the midpoint of its two
/// boundary neighbors. Jacobi-style.
void smooth_boundary(Mesh& mesh, Real beta);

/// The same update rules restricted to the given vertices (interior rule for
/// interior members, boundary rule for boundary members).
void smooth_subset(Mesh& mesh, const std::vector<Index>& vertices, Real alpha, Real beta, Real t);

}  // namespace cabbage
