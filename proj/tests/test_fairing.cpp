#include "cabbage/fairing.hpp"

#include "test_meshes.hpp"

#include <doctest.h>

#include <cmath>

using namespace cabbage;
using namespace cabbage::testing;

namespace {

constexpr Real kTol = 1e-8;  // fairing t for unit-edge meshes

Real quality_variance(const Mesh& m, const std::vector<Index>& faces) {
  Real mean = 0;
  for (Index f : faces) {
    const auto [i, j, k] = m.face_vertices(f);
    mean += triangle_geometry(m.position(i), m.position(j), m.position(k)).quality;
  }
  mean /= faces.size();
  Real var = 0;
  for (Index f : faces) {
    const auto [i, j, k] = m.face_vertices(f);
    const Real q = triangle_geometry(m.position(i), m.position(j), m.position(k)).quality;
    var += (q - mean) * (q - mean);
  }
  return var / faces.size();
}

Real boundary_turning(const Mesh& m) {
  Real total = 0;
  for (Index v = 0; v < m.vertex_slots(); ++v) {
    if (!m.vertex_alive(v) || !m.is_boundary_vertex(v)) continue;
    const Index out = m.vertex_halfedge(v);
    const Vec3& succ = m.position(m.dest(out));
    const Vec3& pred = m.position(m.origin(m.prev(out)));
    const Vec3 u = (m.position(v) - pred).normalized();
    const Vec3 w = (succ - m.position(v)).normalized();
    total += std::acos(std::clamp(u.dot(w), -1.0, 1.0));
  }
  return total;
}

}  // namespace

TEST_CASE("smooth_interior") {
  SUBCASE("regular fan center does not move") {
    Mesh m = make_hex_fan();
    const Vec3 before = m.position(0);
    smooth_interior(m, 0.75, kTol);
    CHECK((m.position(0) - before).norm() < 1e-12);
  }

  SUBCASE("alpha zero is the exact identity") {
    Rng rng(7);
    Mesh m = make_random_patch(rng, 2);
    const std::vector<Vec3> before = m.positions();
    smooth_interior(m, 0.0, kTol);
    for (Index v = 0; v < m.vertex_slots(); ++v)
      CHECK((m.position(v) - before[v]).norm() == 0);
  }

  SUBCASE("perturbed interior vertex: incident quality variance shrinks") {
    Mesh m = make_hex_patch(2);
    // find the center vertex (at the origin)
    Index center = kInvalid;
    for (Index v = 0; v < m.vertex_slots(); ++v)
      if (m.position(v).norm() < 1e-9) center = v;
    REQUIRE(center != kInvalid);
    m.set_position(center, m.position(center) + Vec3(0.3, 0.2, 0));
    const std::vector<Index> ring = m.vertex_faces(center);
    const Real before = quality_variance(m, ring);
    smooth_interior(m, 0.75, kTol);
    CHECK(quality_variance(m, ring) < before);
  }

  SUBCASE("flat meshes stay in plane") {
    Mesh m = make_hex_patch(3);
    smooth_interior(m, 0.75, kTol);
    for (Index v = 0; v < m.vertex_slots(); ++v)
      if (m.vertex_alive(v)) CHECK(std::abs(m.position(v).z()) < 1e-12);
  }

  SUBCASE("rigid equivariance") {
    Rng rng(13);
    Mesh m = make_random_patch(rng, 2);
    Mesh moved = m;
    const Eigen::Matrix3d rot = random_rotation(rng);
    const Vec3 shift(0.4, 2.0, -1.0);
    transform(moved, rot, shift);
    smooth_interior(m, 0.75, kTol);
    smooth_interior(moved, 0.75, kTol);
    for (Index v = 0; v < m.vertex_slots(); ++v)
      CHECK((moved.position(v) - (rot * m.position(v) + shift)).norm() < 1e-9);
  }
}

TEST_CASE("smooth_boundary") {
  SUBCASE("collinear boundary vertices stay put") {
    Mesh m = make_strip(4);
    const Vec3 before = m.position(4);  // (2, 0): flanked by (1,0) and (3,0)
    smooth_boundary(m, 0.5);
    CHECK((m.position(4) - before).norm() < 1e-15);
  }

  SUBCASE("beta zero is the exact identity") {
    Mesh m = make_hex_fan();
    const std::vector<Vec3> before = m.positions();
    smooth_boundary(m, 0.0);
    for (Index v = 0; v < m.vertex_slots(); ++v)
      CHECK((m.position(v) - before[v]).norm() == 0);
  }

  SUBCASE("zig-zag boundary turning decreases") {
    Mesh m = make_strip(6);
    for (Index v = 0; v < m.vertex_slots(); ++v) {
      Vec3 p = m.position(v);
      if (p.y() < 0.5) p.y() += (static_cast<int>(p.x()) % 2 ? 0.15 : -0.15);
      m.set_position(v, p);
    }
    const Real before = boundary_turning(m);
    smooth_boundary(m, 0.1);
    CHECK(boundary_turning(m) < before);
  }
}

TEST_CASE("smooth_subset") {
  SUBCASE("empty subset changes nothing") {
    Rng rng(3);
    Mesh m = make_random_patch(rng, 2);
    const std::vector<Vec3> before = m.positions();
    smooth_subset(m, {}, 0.75, 0.1, kTol);
    for (Index v = 0; v < m.vertex_slots(); ++v)
      CHECK((m.position(v) - before[v]).norm() == 0);
  }

  SUBCASE("full interior subset matches smooth_interior") {
    Rng rng(5);
    Mesh a = make_random_patch(rng, 2);
    Mesh b = a;
    std::vector<Index> interior;
    for (Index v = 0; v < a.vertex_slots(); ++v)
      if (a.vertex_alive(v) && !a.is_boundary_vertex(v)) interior.push_back(v);
    smooth_interior(a, 0.75, kTol);
    smooth_subset(b, interior, 0.75, 0.0, kTol);
    for (Index v = 0; v < a.vertex_slots(); ++v)
      CHECK((a.position(v) - b.position(v)).norm() == 0);
  }

  SUBCASE("singleton matches the full-pass displacement of that vertex") {
    Rng rng(8);
    Mesh a = make_random_patch(rng, 2);
    Mesh b = a;
    Index center = 9;  // interior for rings=2 (19 vertices)
    REQUIRE_FALSE(a.is_boundary_vertex(center));
    smooth_interior(a, 0.75, kTol);
    smooth_subset(b, {center}, 0.75, 0.0, kTol);
    CHECK((a.position(center) - b.position(center)).norm() == 0);
  }

  SUBCASE("topology is never changed by smoothing") {
    Rng rng(12);
    Mesh m = make_random_patch(rng, 2);
    const Index v0 = m.vertex_count(), e0 = m.edge_count(), f0 = m.face_count();
    smooth_interior(m, 0.75, kTol);
    smooth_boundary(m, 0.1);
    smooth_subset(m, {0, 1, 2}, 0.75, 0.1, kTol);
    require_valid(m);
    CHECK(m.vertex_count() == v0);
    CHECK(m.edge_count() == e0);
    CHECK(m.face_count() == f0);
  }
}
