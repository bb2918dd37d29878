#include "cabbage/remesh.hpp"

#include <cmath>
#include <numbers>

namespace cabbage {

namespace {

constexpr Real kAngleEps = 1e-9;

Real sector_angle(const Vec3& apex, const Vec3& a, const Vec3& b) {
  const Vec3 u = a - apex, v = b - apex;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

}  // namespace

Index subdivide_pass(Mesh& mesh, GrowthField& growth, const RestState& rest, Real k,
                     SplitLengthMode mode) {
  std::vector<Index> candidates;
  for (Index e = 0; e < mesh.edge_slots(); ++e) {
    if (!mesh.edge_alive(e)) continue;
    const auto [i, j] = mesh.edge_vertices(e);
    const Real len = mesh.edge_length(e);
    const Real ref = mode == SplitLengthMode::RestLength ? rest.rest_length : len;
    const Real g_mean = Real(0.5) * (growth.factor[i] + growth.factor[j]);
    if (len > k * ref / (Real(1) + g_mean)) candidates.push_back(e);
  }

  auto append_scalar = [](Eigen::VectorXd& x, Real value) {
    x.conservativeResize(x.size() + 1);
    x[x.size() - 1] = value;
  };

  Index splits = 0;
  for (Index e : candidates) {
    const auto [i, j] = mesh.edge_vertices(e);
    Vec3 pos;
    if (mesh.is_boundary_edge(e)) {
      pos = Real(0.5) * (mesh.position(i) + mesh.position(j));
    } else {
      const Index h0 = 2 * e, h1 = h0 ^ 1;
      const Vec3& v3 = mesh.position(mesh.origin(mesh.prev(h0)));
      const Vec3& v4 = mesh.position(mesh.origin(mesh.prev(h1)));
      pos = Real(3. / 8.) * (mesh.position(i) + mesh.position(j)) + Real(1. / 8.) * (v3 + v4);
    }
    mesh.split_edge(e, pos);
    append_scalar(growth.distance, Real(0.5) * (growth.distance[i] + growth.distance[j]));
    append_scalar(growth.normalized, Real(0.5) * (growth.normalized[i] + growth.normalized[j]));
    append_scalar(growth.factor, Real(0.5) * (growth.factor[i] + growth.factor[j]));
    ++splits;
  }
  return splits;
}

Index delaunay_flip_pass(Mesh& mesh) {
  const Index snapshot = mesh.edge_slots();
  Index flips = 0;
  for (Index e = 0; e < snapshot; ++e) {
    if (!mesh.edge_alive(e) || mesh.is_boundary_edge(e)) continue;
    const Index h0 = 2 * e, h1 = h0 ^ 1;
    const Vec3& p0 = mesh.position(mesh.origin(h0));
    const Vec3& p1 = mesh.position(mesh.origin(h1));
    const Vec3& p2 = mesh.position(mesh.origin(mesh.prev(h0)));
    const Vec3& p3 = mesh.position(mesh.origin(mesh.prev(h1)));
    const Real angle_sum = sector_angle(p2, p0, p1) + sector_angle(p3, p0, p1);
    if (angle_sum > std::numbers::pi_v<Real> + kAngleEps)
      if (mesh.flip_edge(e) == FlipStatus::Flipped) ++flips;
  }
  return flips;
}

Index collapse_pass(Mesh& mesh, Real threshold, Index* refused) {
  const Index snapshot = mesh.edge_slots();
  Index collapses = 0, refusals = 0;
  for (Index e = 0; e < snapshot; ++e) {
    if (!mesh.edge_alive(e)) continue;
    if (!(mesh.edge_length(e) < threshold)) continue;
    if (mesh.collapse_edge(e).ok())
      ++collapses;
    else
      ++refusals;
  }
  if (refused) *refused = refusals;
  return collapses;
}

Index ear_removal_pass(Mesh& mesh) {
  Index removed = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    const Index snapshot = mesh.vertex_slots();
    for (Index v = 0; v < snapshot; ++v) {
      if (!mesh.vertex_alive(v) || mesh.valence(v) != 2) continue;
      if (mesh.remove_vertex(v) == EarStatus::Removed) {
        ++removed;
        changed = true;
      }
    }
  }
  return removed;
}

}  // namespace cabbage
