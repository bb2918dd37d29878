#include "cabbage/collision.hpp"

#include <algorithm>
#include <cmath>

namespace cabbage {

SpatialIndex::SpatialIndex(const std::vector<Vec3>& positions, const std::vector<char>& alive,
                           Real cell)
    : positions_(&positions), cell_(cell) {
  if (!(cell > 0)) throw Error(ErrorCode::InvalidParams, "grid cell must be positive");
  for (Index i = 0; i < static_cast<Index>(positions.size()); ++i) {
    if (!alive.empty() && !alive[i]) continue;
    const Vec3& p = positions[i];
    if (!p.allFinite()) throw Error(ErrorCode::InvalidParams, "non-finite position in grid");
    buckets_[cell_key(cell_coord(p.x()), cell_coord(p.y()), cell_coord(p.z()))].push_back(i);
  }
}

std::uint64_t SpatialIndex::cell_key(std::int64_t x, std::int64_t y, std::int64_t z) {
  // Collisions only widen the candidate superset.
  const std::uint64_t a = static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull;
  const std::uint64_t b = static_cast<std::uint64_t>(y) * 0xC2B2AE3D27D4EB4Full;
  const std::uint64_t c = static_cast<std::uint64_t>(z) * 0x165667B19E3779F9ull;
  return a ^ (b >> 1) ^ (c << 1);
}

std::vector<Index> SpatialIndex::query(const Vec3& center, Real radius) const {
  std::vector<Index> out;
  const std::int64_t x0 = cell_coord(center.x() - radius), x1 = cell_coord(center.x() + radius);
  const std::int64_t y0 = cell_coord(center.y() - radius), y1 = cell_coord(center.y() + radius);
  const std::int64_t z0 = cell_coord(center.z() - radius), z1 = cell_coord(center.z() + radius);
  for (std::int64_t x = x0; x <= x1; ++x)
    for (std::int64_t y = y0; y <= y1; ++y)
      for (std::int64_t z = z0; z <= z1; ++z) {
        auto it = buckets_.find(cell_key(x, y, z));
        if (it != buckets_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SpatialIndex spatial_index(const std::vector<Vec3>& positions, const std::vector<char>& alive,
                           Real cell) {
  return SpatialIndex(positions, alive, cell);
}

ColliderSet build_colliders(const Mesh& mesh, Real rest_length, Real normal_factor,
                            Real tangent_factor) {
  const Index n = mesh.vertex_slots();
  ColliderSet set;
  set.normal_radius = Eigen::VectorXd::Zero(n);
  set.tangent_radius = Eigen::VectorXd::Zero(n);
  set.normal.assign(n, Vec3::Zero());
  std::vector<Real> lengths;
  for (Index v = 0; v < n; ++v) {
    if (!mesh.vertex_alive(v)) continue;
    lengths.clear();
    for (Index h : mesh.outgoing_halfedges(v))
      lengths.push_back((mesh.position(mesh.dest(h)) - mesh.position(v)).norm());
    std::sort(lengths.begin(), lengths.end());
    const std::size_t m = lengths.size();
    const Real median =
        m % 2 == 1 ? lengths[m / 2] : Real(0.5) * (lengths[m / 2 - 1] + lengths[m / 2]);
    set.normal_radius[v] = normal_factor * rest_length;
    set.tangent_radius[v] = tangent_factor * median;
    set.normal[v] = vertex_normal(mesh, v);
  }
  return set;
}

namespace {

std::vector<std::vector<Index>> sorted_neighbors(const Mesh& mesh) {
  std::vector<std::vector<Index>> nbrs(mesh.vertex_slots());
  for (Index v = 0; v < mesh.vertex_slots(); ++v) {
    if (!mesh.vertex_alive(v)) continue;
    nbrs[v] = mesh.vertex_neighbors(v);
    std::sort(nbrs[v].begin(), nbrs[v].end());
  }
  return nbrs;
}

bool adjacent(const std::vector<std::vector<Index>>& nbrs, Index i, Index j) {
  return std::binary_search(nbrs[i].begin(), nbrs[i].end(), j);
}

std::vector<char> alive_flags(const Mesh& mesh) {
  std::vector<char> alive(mesh.vertex_slots(), 0);
  for (Index v = 0; v < mesh.vertex_slots(); ++v) alive[v] = mesh.vertex_alive(v);
  return alive;
}

}  // namespace

CollisionOutcome corrective_collision(const Mesh& mesh, const ColliderSet& colliders,
                                      Real stiffness, Real lambda, bool both_orders) {
  const Index n = mesh.vertex_slots();
  CollisionOutcome out;
  out.force.assign(n, Vec3::Zero());
  out.raw_force.assign(n, Vec3::Zero());
  out.involved.assign(n, 0);

  Real max_r = 0;
  for (Index v = 0; v < n; ++v)
    if (mesh.vertex_alive(v))
      max_r = std::max({max_r, colliders.normal_radius[v], colliders.tangent_radius[v]});
  if (max_r <= 0) return out;

  const std::vector<char> alive = alive_flags(mesh);
  const SpatialIndex grid(mesh.positions(), alive, max_r);
  const std::vector<std::vector<Index>> nbrs = sorted_neighbors(mesh);
  const Real reach = std::sqrt(Real(2)) * max_r;

  // Penetration measure for the ordered pair (i, j) against i's normal.
  auto penetration = [&](Index i, Index j, const Vec3& d) {
    const Vec3& ni = colliders.normal[i];
    const Real dn = d.dot(ni);
    const Real rn = std::max(colliders.normal_radius[i], colliders.normal_radius[j]);
    const Real rt = std::max(colliders.tangent_radius[i], colliders.tangent_radius[j]);
    const Real delta_n = std::abs(dn) / rn;
    const Real delta_t = (d - dn * ni).norm() / rt;
    return delta_n * delta_n + delta_t * delta_t;
  };

  for (Index i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    for (Index j : grid.query(mesh.position(i), reach)) {
      if (j <= i || adjacent(nbrs, i, j)) continue;
      const Vec3 d = mesh.position(j) - mesh.position(i);
      Vec3 dir = d;
      const Real dist = dir.norm();
      // Coincident vertices leave the direction undefined; fall back to the
      // reference normal so the response stays deterministic.
      dir = dist > Real(1e-300) ? Vec3(dir / dist) : colliders.normal[i];

      bool hit = false;
      Vec3 impulse = Vec3::Zero();
      const Real p_ij = penetration(i, j, d);
      if (p_ij < 1) {
        impulse += stiffness * (Real(1) - p_ij) * dir;
        hit = true;
      }
      if (both_orders) {
        const Real p_ji = penetration(j, i, -d);
        if (p_ji < 1) {
          impulse += stiffness * (Real(1) - p_ji) * dir;
          hit = true;
        }
      }
      if (hit) {
        out.raw_force[i] -= impulse;
        out.raw_force[j] += impulse;
        out.involved[i] = 1;
        out.involved[j] = 1;
        ++out.event_count;
      }
    }
  }

  // Blend each vertex toward the mean raw force over its one-ring.
  for (Index v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    Vec3 mean = Vec3::Zero();
    for (Index u : nbrs[v]) mean += out.raw_force[u];
    if (!nbrs[v].empty()) mean /= static_cast<Real>(nbrs[v].size());
    out.force[v] = (Real(1) - lambda) * out.raw_force[v] + lambda * mean;
  }
  return out;
}

ForceField growth_collision(const Mesh& mesh, const RestState& rest, Real stiffness,
                            const GrowthField& growth, Real g_min, Index* coincident_pairs) {
  const Index n = mesh.vertex_slots();
  ForceField force(n, Vec3::Zero());
  const Real radius = rest.rest_length;
  const std::vector<char> alive = alive_flags(mesh);
  const SpatialIndex grid(mesh.positions(), alive, radius);
  Index coincident = 0;

  for (Index i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    for (Index j : grid.query(mesh.position(i), radius)) {
      if (j <= i) continue;
      if (std::max(growth.factor[i], growth.factor[j]) < g_min) continue;
      const Vec3 d = mesh.position(j) - mesh.position(i);
      const Real dist = d.norm();
      if (dist >= radius) continue;
      Vec3 dir;
      if (dist > Real(1e-12) * radius) {
        dir = d / dist;
      } else {
        dir = Vec3::UnitX();  // deterministic separation axis, lower handle pushed to -x
        ++coincident;
      }
      const Vec3 f = stiffness * (radius - dist) * dir;
      force[i] -= f;
      force[j] += f;
    }
  }
  if (coincident_pairs) *coincident_pairs = coincident;
  return force;
}

}  // namespace cabbage
