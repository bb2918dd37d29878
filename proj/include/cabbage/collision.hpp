#pragma once

#include "cabbage/forces.hpp"
#include "cabbage/growth.hpp"
#include "cabbage/mesh.hpp"

#include <unordered_map>

namespace cabbage {

/// Uniform hash grid over points. Queries return sorted supersets of the true
/// in-range sets; callers filter by exact distance.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  SpatialIndex(const std::vector<Vec3>& positions, const std::vector<char>& alive, Real cell);

  std::vector<Index> query(const Vec3& center, Real radius) const;
  Real cell_size() const { return cell_; }

 private:
  std::int64_t cell_coord(Real x) const { return static_cast<std::int64_t>(std::floor(x / cell_)); }
  static std::uint64_t cell_key(std::int64_t x, std::int64_t y, std::int64_t z);

  std::unordered_map<std::uint64_t, std::vector<Index>> buckets_;
  const std::vector<Vec3>* positions_ = nullptr;
  Real cell_ = 1;
};

SpatialIndex spatial_index(const std::vector<Vec3>& positions, const std::vector<char>& alive,
                           Real cell);

/// Per-vertex ellipsoidal colliders oriented along vertex normals.
/// normal radius = normal_factor * L0; tangent radius = tangent_factor *
/// median incident edge length.
struct ColliderSet {
  Eigen::VectorXd normal_radius;
  Eigen::VectorXd tangent_radius;
  std::vector<Vec3> normal;
};

ColliderSet build_colliders(const Mesh& mesh, Real rest_length, Real normal_factor = 0.25,
                            Real tangent_factor = 0.9);

struct CollisionOutcome {
  ForceField force;           // after the one-ring blend; applied as displacements
  ForceField raw_force;       // equal-and-opposite pair forces before blending
  std::vector<char> involved; // vertices participating in at least one event
  Index event_count = 0;
};

/// Penetration response between non-adjacent vertex pairs. Pairs are
/// evaluated with the lower handle supplying the reference normal and receive
/// equal-and-opposite forces; `both_orders` instead evaluates and applies
/// each orientation of the pair.
CollisionOutcome corrective_collision(const Mesh& mesh, const ColliderSet& colliders,
                                      Real stiffness, Real lambda, bool both_orders = false);

/// Spherical-collider growth forces (radius L0) between all vertex pairs with
/// enough growth; g_min = 0 disables the growth-factor filter.
ForceField growth_collision(const Mesh& mesh, const RestState& rest, Real stiffness,
                            const GrowthField& growth, Real g_min,
                            Index* coincident_pairs = nullptr);

}  // namespace cabbage
