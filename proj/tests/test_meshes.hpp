#pragma once

#include "cabbage/mesh.hpp"
#include "cabbage/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

namespace cabbage::testing {

inline void require_valid(const Mesh& mesh) {
  const std::vector<std::string> issues = mesh.validate();
  for (const std::string& issue : issues) MESSAGE(issue);
  REQUIRE(issues.empty());
}

inline Mesh make_triangle() {
  return build_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{{0, 1, 2}}});
}

/// Unit square, diagonal 0-2 interior.
inline Mesh make_square() {
  return build_mesh({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}},
                    {{{0, 1, 2}}, {{0, 2, 3}}});
}

/// Regular hexagon fan: center vertex 0, ring 1..6.
inline Mesh make_hex_fan(Real scale = 1) {
  std::vector<Vec3> pos = {{0, 0, 0}};
  for (int k = 0; k < 6; ++k) {
    const Real a = std::numbers::pi_v<Real> / 3 * k;
    pos.emplace_back(scale * std::cos(a), scale * std::sin(a), 0);
  }
  std::vector<std::array<Index, 3>> faces;
  for (Index k = 1; k <= 6; ++k) faces.push_back({0, k, Index(k % 6 + 1)});
  return build_mesh(pos, faces);
}

/// Equilateral triangular-lattice patch: all points within `rings` lattice
/// steps of the center, unit edge length.
inline Mesh make_hex_patch(int rings, Real edge = 1) {
  std::map<std::pair<int, int>, Index> ids;
  std::vector<Vec3> pos;
  auto hex_dist = [](int i, int j) { return std::max({std::abs(i), std::abs(j), std::abs(i + j)}); };
  for (int i = -rings; i <= rings; ++i)
    for (int j = -rings; j <= rings; ++j) {
      if (hex_dist(i, j) > rings) continue;
      ids[{i, j}] = static_cast<Index>(pos.size());
      pos.emplace_back(edge * (i + Real(0.5) * j), edge * (std::sqrt(Real(3)) / 2) * j, 0);
    }
  std::vector<std::array<Index, 3>> faces;
  for (int i = -rings; i <= rings; ++i)
    for (int j = -rings; j <= rings; ++j) {
      auto in = [&](int a, int b) { return ids.count({a, b}) > 0; };
      if (in(i, j) && in(i + 1, j) && in(i, j + 1))
        faces.push_back({ids[{i, j}], ids[{i + 1, j}], ids[{i, j + 1}]});
      if (in(i + 1, j) && in(i + 1, j + 1) && in(i, j + 1))
        faces.push_back({ids[{i + 1, j}], ids[{i + 1, j + 1}], ids[{i, j + 1}]});
    }
  return build_mesh(pos, faces);
}

/// Strip of `quads` unit squares along x, each split into two triangles.
inline Mesh make_strip(int quads) {
  std::vector<Vec3> pos;
  for (int k = 0; k <= quads; ++k) {
    pos.emplace_back(k, 0, 0);
    pos.emplace_back(k, 1, 0);
  }
  std::vector<std::array<Index, 3>> faces;
  for (Index k = 0; k < quads; ++k) {
    const Index a = 2 * k, b = 2 * k + 1, c = 2 * k + 2, d = 2 * k + 3;
    faces.push_back({a, c, b});
    faces.push_back({b, c, d});
  }
  return build_mesh(pos, faces);
}

inline Mesh make_tetrahedron() {
  return build_mesh({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}},
                    {{{0, 1, 2}}, {{0, 2, 3}}, {{0, 3, 1}}, {{1, 3, 2}}});
}

inline Mesh make_octahedron() {
  return build_mesh(
      {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}},
      {{{0, 2, 4}}, {{2, 1, 4}}, {{1, 3, 4}}, {{3, 0, 4}},
       {{2, 0, 5}}, {{1, 2, 5}}, {{3, 1, 5}}, {{0, 3, 5}}});
}

inline Eigen::Matrix3d random_rotation(Rng& rng) {
  const Real a = rng.uniform(0, 2 * std::numbers::pi_v<Real>);
  const Real b = rng.uniform(0, 2 * std::numbers::pi_v<Real>);
  const Real c = rng.uniform(0, 2 * std::numbers::pi_v<Real>);
  return (Eigen::AngleAxisd(a, Vec3::UnitZ()) * Eigen::AngleAxisd(b, Vec3::UnitY()) *
          Eigen::AngleAxisd(c, Vec3::UnitX()))
      .toRotationMatrix();
}

inline void transform(Mesh& mesh, const Eigen::Matrix3d& rot, const Vec3& shift) {
  for (Index v = 0; v < mesh.vertex_slots(); ++v)
    if (mesh.vertex_alive(v)) mesh.set_position(v, rot * mesh.position(v) + shift);
}

/// Small random open mesh: a jittered lattice patch, optionally lifted out of
/// plane. 15-30 vertices for rings=2.
inline Mesh make_random_patch(Rng& rng, int rings = 2, Real lift = 0.3) {
  Mesh mesh = make_hex_patch(rings);
  for (Index v = 0; v < mesh.vertex_slots(); ++v) {
    const Vec3 jitter(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-lift, lift));
    mesh.set_position(v, mesh.position(v) + jitter);
  }
  return mesh;
}

}  // namespace cabbage::testing
