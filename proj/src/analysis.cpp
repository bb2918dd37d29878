#include "cabbage/analysis.hpp"

#include "cabbage/tri_tri.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace cabbage {

namespace {

struct Aabb {
  Vec3 lo, hi;
  bool overlaps(const Aabb& o, Real pad) const {
    return (lo.array() - pad <= o.hi.array()).all() && (o.lo.array() - pad <= hi.array()).all();
  }
};

std::uint64_t pack_cell(std::int64_t x, std::int64_t y, std::int64_t z) {
  const std::uint64_t a = static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull;
  const std::uint64_t b = static_cast<std::uint64_t>(y) * 0xC2B2AE3D27D4EB4Full;
  const std::uint64_t c = static_cast<std::uint64_t>(z) * 0x165667B19E3779F9ull;
  return a ^ (b >> 1) ^ (c << 1);
}

}  // namespace

Index count_self_intersections(const Mesh& mesh, Real rest_length) {
  const Real tol = Real(1e-10) * rest_length;

  std::vector<Index> faces;
  for (Index f = 0; f < mesh.face_slots(); ++f)
    if (mesh.face_alive(f)) faces.push_back(f);
  if (faces.size() < 2) return 0;

  std::vector<Aabb> boxes(faces.size());
  std::vector<std::array<Index, 3>> verts(faces.size());
  Real mean_extent = 0;
  for (std::size_t k = 0; k < faces.size(); ++k) {
    verts[k] = mesh.face_vertices(faces[k]);
    const Vec3 &a = mesh.position(verts[k][0]), &b = mesh.position(verts[k][1]),
               &c = mesh.position(verts[k][2]);
    boxes[k].lo = a.cwiseMin(b).cwiseMin(c);
    boxes[k].hi = a.cwiseMax(b).cwiseMax(c);
    mean_extent += (boxes[k].hi - boxes[k].lo).maxCoeff();
  }
  mean_extent /= static_cast<Real>(faces.size());
  const Real cell = std::max(Real(2) * mean_extent, Real(1e-12) * std::max(rest_length, Real(1)));

  std::unordered_map<std::uint64_t, std::vector<Index>> grid;
  auto coord = [cell](Real x) { return static_cast<std::int64_t>(std::floor(x / cell)); };
  for (std::size_t k = 0; k < faces.size(); ++k) {
    for (std::int64_t x = coord(boxes[k].lo.x()); x <= coord(boxes[k].hi.x()); ++x)
      for (std::int64_t y = coord(boxes[k].lo.y()); y <= coord(boxes[k].hi.y()); ++y)
        for (std::int64_t z = coord(boxes[k].lo.z()); z <= coord(boxes[k].hi.z()); ++z)
          grid[pack_cell(x, y, z)].push_back(static_cast<Index>(k));
  }

  std::vector<std::pair<Index, Index>> candidates;
  for (auto& [key, bucket] : grid)
    for (std::size_t s = 0; s < bucket.size(); ++s)
      for (std::size_t u = s + 1; u < bucket.size(); ++u)
        candidates.emplace_back(std::min(bucket[s], bucket[u]), std::max(bucket[s], bucket[u]));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  Index count = 0;
  for (auto [s, u] : candidates) {
    if (!boxes[s].overlaps(boxes[u], tol)) continue;
    bool share = false;
    for (Index vs : verts[s])
      for (Index vu : verts[u])
        if (vs == vu) share = true;
    if (share) continue;
    if (tri_tri_intersect(mesh.position(verts[s][0]), mesh.position(verts[s][1]),
                          mesh.position(verts[s][2]), mesh.position(verts[u][0]),
                          mesh.position(verts[u][1]), mesh.position(verts[u][2]), tol))
      ++count;
  }
  return count;
}

MetricsReport metrics(const Mesh& mesh) {
  MetricsReport r;
  r.vertices = mesh.vertex_count();
  r.edges = mesh.edge_count();
  r.faces = mesh.face_count();

  Real q_sum = 0;
  for (Index f = 0; f < mesh.face_slots(); ++f) {
    if (!mesh.face_alive(f)) continue;
    const auto [i, j, k] = mesh.face_vertices(f);
    q_sum += triangle_geometry(mesh.position(i), mesh.position(j), mesh.position(k)).quality;
  }
  r.mean_quality = r.faces > 0 ? q_sum / r.faces : Real(0);

  Index val_sum = 0;
  for (Index v = 0; v < mesh.vertex_slots(); ++v)
    if (mesh.vertex_alive(v)) val_sum += mesh.valence(v);
  r.mean_valence = r.vertices > 0 ? static_cast<Real>(val_sum) / r.vertices : Real(0);

  Index interior = 0;
  for (Index e = 0; e < mesh.edge_slots(); ++e) {
    if (!mesh.edge_alive(e) || mesh.is_boundary_edge(e)) continue;
    ++interior;
    // Hinges with a degenerate wing have no usable angle; they contribute 0
    // here and are caught by detect_failure instead.
    const Index h0 = 2 * e, h1 = h0 ^ 1;
    const Vec3& x0 = mesh.position(mesh.origin(h0));
    const Vec3& x1 = mesh.position(mesh.origin(h1));
    const Vec3& x2 = mesh.position(mesh.origin(mesh.prev(h0)));
    const Vec3& x3 = mesh.position(mesh.origin(mesh.prev(h1)));
    const Vec3 nA = (x1 - x0).cross(x2 - x0);
    const Vec3 nB = (x0 - x1).cross(x3 - x1);
    const Real el = (x1 - x0).norm();
    if (nA.norm() < Real(1e-300) || nB.norm() < Real(1e-300) || el < Real(1e-300)) continue;
    const Real theta = std::atan2(nB.normalized().cross(nA.normalized()).dot((x1 - x0) / el),
                                  nA.normalized().dot(nB.normalized()));
    r.sum_sq_dihedral += theta * theta;
  }
  r.mean_sq_dihedral = interior > 0 ? r.sum_sq_dihedral / interior : Real(0);
  return r;
}

FailureCheck detect_failure(const Mesh& mesh, Real rest_length) {
  for (Index v = 0; v < mesh.vertex_slots(); ++v)
    if (mesh.vertex_alive(v) && !mesh.position(v).allFinite())
      return {true, "non-finite"};

  const Real area_eps = Real(1e-12) * rest_length * rest_length;
  for (Index f = 0; f < mesh.face_slots(); ++f) {
    if (!mesh.face_alive(f)) continue;
    const auto [i, j, k] = mesh.face_vertices(f);
    const Vec3 &a = mesh.position(i), &b = mesh.position(j), &c = mesh.position(k);
    const Real area = Real(0.5) * (b - a).cross(c - a).norm();
    const Real max_edge = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    if (area < area_eps && max_edge > Real(10) * rest_length)
      return {true, "degenerate-long-edge"};
  }

  const std::vector<std::string> issues = mesh.validate();
  if (!issues.empty()) return {true, "invalid: " + issues.front()};
  return {};
}

MetricsReport full_report(const Mesh& mesh, Real rest_length) {
  MetricsReport r = metrics(mesh);
  r.self_intersections = count_self_intersections(mesh, rest_length);
  const FailureCheck check = detect_failure(mesh, rest_length);
  r.failed = check.failed;
  r.failure_reason = check.reason;
  return r;
}

}  // namespace cabbage
