#pragma once

#include "cabbage/mesh.hpp"

#include <cstdint>
#include <variant>

namespace cabbage {

/// Parameters of the two-branch growth response. The exponent c = 2/(1-s) - 1
/// is >= 1 for s in [0,1); s = 0 reduces the response to the identity.
struct GrowthParams {
  Real cutoff = 0.5;     // branch point p, strictly inside (0,1)
  Real steepness = 0.5;  // s in [0,1)
  bool high_at_sources = true;

  Real exponent() const { return Real(2) / (Real(1) - steepness) - Real(1); }
  void check() const;
};

/// Per-vertex geodesic distance, normalized distance, and growth factor,
/// all indexed by vertex slot (dead slots are zero).
struct GrowthField {
  Eigen::VectorXd distance;
  Eigen::VectorXd normalized;
  Eigen::VectorXd factor;
};

struct AllBoundaryPolicy {};
struct ExplicitPolicy {
  std::vector<Index> vertices;
};
struct RandomBoundaryPolicy {
  Index count = 1;
  std::uint64_t seed = 0;
};
using SourcePolicy = std::variant<AllBoundaryPolicy, ExplicitPolicy, RandomBoundaryPolicy>;

struct SourceSet {
  std::vector<Index> vertices;  // sorted, unique, alive
};

/// Deterministic source selection for a given (mesh, policy, seed).
SourceSet select_sources(const Mesh& mesh, const SourcePolicy& policy);

/// Graph-geodesic distances (edge-length weighted shortest paths) to the
/// nearest source. Deterministic; ties broken by vertex handle.
Eigen::VectorXd geodesic_distances(const Mesh& mesh, const SourceSet& sources);

/// Normalizes distances by their maximum and applies the growth response.
/// With `high_at_sources` the normalized distance is reversed first, so the
/// factor peaks at the sources and decays away from them.
GrowthField growth_factors(const Mesh& mesh, const Eigen::VectorXd& distances,
                           const GrowthParams& params);

}  // namespace cabbage
