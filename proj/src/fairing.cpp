#include "cabbage/fairing.hpp"

#include <cmath>

namespace cabbage {

namespace {

/// Stability clamp: a smoothing update never moves a vertex farther than its
/// mean incident edge length. Healthy one-rings stay far under this bound;
/// degenerate ones cannot catapult the vertex.
Vec3 clamp_step(const Mesh& mesh, const std::vector<Vec3>& snapshot, Index v,
                const Vec3& target) {
  Real mean_edge = 0;
  Index n = 0;
  for (Index h : mesh.outgoing_halfedges(v)) {
    mean_edge += (snapshot[mesh.dest(h)] - snapshot[v]).norm();
    ++n;
  }
  mean_edge /= std::max<Index>(n, 1);
  const Vec3 delta = target - snapshot[v];
  const Real len = delta.norm();
  if (len <= mean_edge || len == 0) return target;
  return snapshot[v] + delta * (mean_edge / len);
}

Vec3 interior_target(const Mesh& mesh, const std::vector<Vec3>& snapshot,
                     const BoundaryFlags& flags, Index v, Real t) {
  Vec3 weighted = Vec3::Zero();
  Real total = 0;
  for (Index f : mesh.vertex_faces(v)) {
    const auto [i, j, k] = mesh.face_vertices(f);
    const Vec3 &a = snapshot[i], &b = snapshot[j], &c = snapshot[k];
    const FaceGeometry g = triangle_geometry(a, b, c);
    const Real sq_sum =
        (b - a).squaredNorm() + (c - a).squaredNorm() + (c - b).squaredNorm();
    const Real perimeter = (b - a).norm() + (c - a).norm() + (c - b).norm();
    // Degenerate-face clamps: floor the area, and keep the center and the
    // weight radius within one perimeter of the face so a sliver cannot throw
    // the target arbitrarily far. Inactive for healthy triangles.
    const Real area = std::max(g.area, Real(1e-12) * sq_sum);
    const Real radius = std::min(g.circumradius, perimeter);
    Vec3 phi = flags.face[f] ? g.barycenter : g.circumcenter;
    const Vec3 off = phi - g.barycenter;
    if (off.norm() > perimeter) phi = g.barycenter + off * (perimeter / off.norm());
    const Real w = (radius * radius + t) / std::max(area, Real(1e-300));
    weighted += w * phi;
    total += w;
  }
  return total > 0 ? Vec3(weighted / total) : snapshot[v];
}

Vec3 boundary_target(const Mesh& mesh, const std::vector<Vec3>& snapshot, Index v) {
  const Index out = mesh.vertex_halfedge(v);
  if (!mesh.is_boundary_halfedge(out))
    throw Error(ErrorCode::MalformedBoundary, "boundary vertex without boundary half-edge");
  const Index succ = mesh.dest(out);
  const Index pred = mesh.origin(mesh.prev(out));
  return Real(0.5) * (snapshot[succ] + snapshot[pred]);
}

}  // namespace

void smooth_interior(Mesh& mesh, Real alpha, Real t) {
  if (alpha == 0) return;
  const std::vector<Vec3> snapshot = mesh.positions();
  const BoundaryFlags flags = boundary_classification(mesh);
  std::vector<std::pair<Index, Vec3>> updates;
  for (Index v = 0; v < mesh.vertex_slots(); ++v) {
    if (!mesh.vertex_alive(v) || flags.vertex[v]) continue;
    updates.emplace_back(v, interior_target(mesh, snapshot, flags, v, t));
  }
  for (const auto& [v, target] : updates)
    mesh.set_position(
        v, clamp_step(mesh, snapshot, v, (Real(1) - alpha) * snapshot[v] + alpha * target));
}

void smooth_boundary(Mesh& mesh, Real beta) {
  if (beta == 0) return;
  const std::vector<Vec3> snapshot = mesh.positions();
  std::vector<std::pair<Index, Vec3>> updates;
  for (Index v = 0; v < mesh.vertex_slots(); ++v) {
    if (!mesh.vertex_alive(v) || !mesh.is_boundary_vertex(v)) continue;
    updates.emplace_back(v, boundary_target(mesh, snapshot, v));
  }
  for (const auto& [v, target] : updates)
    mesh.set_position(
        v, clamp_step(mesh, snapshot, v, (Real(1) - beta) * snapshot[v] + beta * target));
}

void smooth_subset(Mesh& mesh, const std::vector<Index>& vertices, Real alpha, Real beta,
                   Real t) {
  if (vertices.empty()) return;
  const std::vector<Vec3> snapshot = mesh.positions();
  const BoundaryFlags flags = boundary_classification(mesh);
  std::vector<std::pair<Index, Vec3>> updates;
  for (Index v : vertices) {
    if (!mesh.vertex_alive(v)) continue;
    if (flags.vertex[v]) {
      if (beta != 0)
        updates.emplace_back(v, (Real(1) - beta) * snapshot[v] +
                                    beta * boundary_target(mesh, snapshot, v));
    } else if (alpha != 0) {
      updates.emplace_back(v, (Real(1) - alpha) * snapshot[v] +
                               alpha * interior_target(mesh, snapshot, flags, v, t));
    }
  }
  for (const auto& [v, target] : updates)
    mesh.set_position(v, clamp_step(mesh, snapshot, v, target));
}

}  // namespace cabbage
