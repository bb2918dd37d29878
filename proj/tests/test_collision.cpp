#include "cabbage/collision.hpp"

#include "test_meshes.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace cabbage;
using namespace cabbage::testing;

namespace {

/// Two far-apart triangles whose first vertices face each other across a gap
/// along z. All other cross pairs sit tens of units away.
Mesh make_facing_pair(Real gap) {
  return build_mesh(
      {{0, 0, 0}, {10, 0, 0}, {0, 10, 0}, {0, 0, 0.0 + gap}, {-10, 0, gap}, {0, -10, gap}},
      {{{0, 1, 2}}, {{3, 5, 4}}});
}

/// Combined mesh holding two laterally offset hex patches stacked along z.
Mesh make_two_sheets(Real gap, Real lateral) {
  Mesh a = make_hex_patch(2);
  std::vector<Vec3> pos(a.positions().begin(), a.positions().end());
  std::vector<std::array<Index, 3>> faces;
  for (Index f = 0; f < a.face_slots(); ++f) faces.push_back(a.face_vertices(f));
  const Index shift = a.vertex_slots();
  for (Index v = 0; v < shift; ++v)
    pos.push_back(a.position(v) + Vec3(lateral, 0.5 * lateral, gap));
  for (Index f = 0; f < a.face_slots(); ++f) {
    const auto [i, j, k] = a.face_vertices(f);
    faces.push_back({i + shift, j + shift, k + shift});
  }
  return build_mesh(pos, faces);
}

}  // namespace

TEST_CASE("spatial_index") {
  SUBCASE("single point is always found") {
    std::vector<Vec3> pts = {{1, 2, 3}};
    const SpatialIndex grid(pts, {}, 0.5);
    const std::vector<Index> hits = grid.query(pts[0], 0.1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0] == 0);
  }

  SUBCASE("10^3 grid queries match the brute-force neighbor oracle") {
    std::vector<Vec3> pts;
    Rng rng(404);
    for (int x = 0; x < 10; ++x)
      for (int y = 0; y < 10; ++y)
        for (int z = 0; z < 10; ++z)
          pts.emplace_back(x + rng.uniform(-0.2, 0.2), y + rng.uniform(-0.2, 0.2),
                           z + rng.uniform(-0.2, 0.2));
    const Real radius = 1.4;
    const SpatialIndex grid(pts, {}, 1.0);
    for (int probe = 0; probe < 25; ++probe) {
      const Vec3 center = pts[rng.below(pts.size())];
      std::vector<Index> expect;
      for (Index i = 0; i < static_cast<Index>(pts.size()); ++i)
        if ((pts[i] - center).norm() <= radius) expect.push_back(i);
      std::vector<Index> got;
      for (Index i : grid.query(center, radius))
        if ((pts[i] - center).norm() <= radius) got.push_back(i);
      CHECK(got == expect);
    }
  }

  SUBCASE("radius zero keeps only exact matches after filtering") {
    std::vector<Vec3> pts = {{0, 0, 0}, {0.1, 0, 0}, {0, 0, 0}};
    const SpatialIndex grid(pts, {}, 1.0);
    std::vector<Index> got;
    for (Index i : grid.query(pts[0], 0.0))
      if ((pts[i] - pts[0]).norm() <= 0.0) got.push_back(i);
    CHECK(got == std::vector<Index>{0, 2});
  }
}

TEST_CASE("build_colliders") {
  SUBCASE("uniform equilateral mesh: tangent radius 0.9 L0 everywhere") {
    Mesh m = make_hex_patch(2);
    const ColliderSet set = build_colliders(m, 1.0);
    for (Index v = 0; v < m.vertex_slots(); ++v) {
      if (!m.vertex_alive(v)) continue;
      CHECK(set.tangent_radius[v] == doctest::Approx(0.9).epsilon(1e-9));
      CHECK(set.normal_radius[v] == doctest::Approx(0.25).epsilon(1e-12));
    }
  }

  SUBCASE("median incident length shrugs off outliers") {
    Mesh m = make_hex_fan();
    // ring radii {0.1, 1, 1, 1, 1, 10}: median incident length at the hub is 1
    m.set_position(1, Vec3(0.1, 0, 0));
    m.set_position(4, Vec3(-10, 0, 0));
    const ColliderSet set = build_colliders(m, 2.0, 0.25, 0.9);
    CHECK(set.tangent_radius[0] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(set.normal_radius[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("corrective_collision") {
  SUBCASE("purely normal separation at exactly r_n: no event (strict boundary)") {
    Mesh m = make_facing_pair(0.25);
    const ColliderSet set = build_colliders(m, 1.0);  // r_n = 0.25, normals +z
    const CollisionOutcome out = corrective_collision(m, set, 0.5, 0.0);
    CHECK(out.event_count == 0);
  }

  SUBCASE("half the normal radius: p = 0.25 and force 0.75 k, directed apart") {
    Mesh m = make_facing_pair(0.125);
    const ColliderSet set = build_colliders(m, 1.0);
    const CollisionOutcome out = corrective_collision(m, set, 0.5, 0.0);
    CHECK(out.event_count == 1);
    CHECK(out.raw_force[0].norm() == doctest::Approx(0.5 * 0.75).epsilon(1e-12));
    CHECK(out.raw_force[3].norm() == doctest::Approx(0.5 * 0.75).epsilon(1e-12));
    // vertex 0 sits below vertex 3: pushed down, 3 pushed up
    CHECK(out.raw_force[0].z() < 0);
    CHECK(out.raw_force[3].z() > 0);
    CHECK(out.involved[0]);
    CHECK(out.involved[3]);
    CHECK_FALSE(out.involved[1]);
  }

  SUBCASE("adjacent vertices never generate events") {
    // a tiny triangle: all pairs adjacent and deeply overlapping
    Mesh m = build_mesh({{0, 0, 0}, {0.01, 0, 0}, {0, 0.01, 0}}, {{{0, 1, 2}}});
    const ColliderSet set = build_colliders(m, 1.0);
    const CollisionOutcome out = corrective_collision(m, set, 0.5, 0.5);
    CHECK(out.event_count == 0);
  }

  SUBCASE("raw pair forces conserve momentum") {
    Mesh m = make_two_sheets(0.2, 0.3);
    const ColliderSet set = build_colliders(m, 1.0);
    const CollisionOutcome out = corrective_collision(m, set, 0.5, 0.5);
    CHECK(out.event_count > 0);
    Vec3 net = Vec3::Zero();
    Real scale = 0;
    for (Index v = 0; v < m.vertex_slots(); ++v) {
      net += out.raw_force[v];
      scale += out.raw_force[v].norm();
    }
    CHECK(net.norm() <= 1e-8 * std::max(scale, 1e-12));
  }

  SUBCASE("blending spreads forces over the one-ring") {
    Mesh m = make_two_sheets(0.2, 0.3);
    const ColliderSet set = build_colliders(m, 1.0);
    const CollisionOutcome raw = corrective_collision(m, set, 0.5, 0.0);
    const CollisionOutcome mixed = corrective_collision(m, set, 0.5, 0.5);
    for (Index v = 0; v < m.vertex_slots(); ++v) {
      if (!m.vertex_alive(v)) continue;
      Vec3 mean = Vec3::Zero();
      const std::vector<Index> nbrs = m.vertex_neighbors(v);
      for (Index u : nbrs) mean += raw.raw_force[u];
      mean /= static_cast<Real>(nbrs.size());
      CHECK((mixed.force[v] - (0.5 * raw.raw_force[v] + 0.5 * mean)).norm() < 1e-12);
    }
  }

  SUBCASE("no forces when everything is far apart (broad-phase soundness)") {
    Mesh m = make_two_sheets(5.0, 0.0);
    const ColliderSet set = build_colliders(m, 1.0);
    const CollisionOutcome out = corrective_collision(m, set, 0.5, 0.5);
    CHECK(out.event_count == 0);
    for (Index v = 0; v < m.vertex_slots(); ++v) CHECK(out.force[v].norm() == 0);
  }

  SUBCASE("identical inputs give identical outcomes") {
    Mesh m = make_two_sheets(0.2, 0.4);
    const ColliderSet set = build_colliders(m, 1.0);
    const CollisionOutcome a = corrective_collision(m, set, 0.5, 0.5);
    const CollisionOutcome b = corrective_collision(m, set, 0.5, 0.5);
    CHECK(a.event_count == b.event_count);
    for (Index v = 0; v < m.vertex_slots(); ++v)
      CHECK((a.force[v] - b.force[v]).norm() == 0);
  }

  SUBCASE("both-orders mode also conserves momentum") {
    Mesh m = make_two_sheets(0.2, 0.3);
    const ColliderSet set = build_colliders(m, 1.0);
    const CollisionOutcome out = corrective_collision(m, set, 0.5, 0.0, true);
    Vec3 net = Vec3::Zero();
    for (Index v = 0; v < m.vertex_slots(); ++v) net += out.raw_force[v];
    CHECK(net.norm() <= 1e-8);
  }
}

TEST_CASE("growth_collision") {
  RestState rest;
  rest.rest_length = 1.0;

  SUBCASE("pairs at exactly L0 produce no force") {
    Mesh m = make_hex_patch(1);  // unit edges, diagonals > 1
    GrowthField g;
    g.factor = Eigen::VectorXd::Ones(m.vertex_slots());
    const ForceField f = growth_collision(m, rest, 2.0, g, 0.0);
    for (Index v = 0; v < m.vertex_slots(); ++v) CHECK(f[v].norm() < 1e-12);
  }

  SUBCASE("half separation at k=2 gives magnitude L0") {
    Mesh m = make_facing_pair(0.5);
    GrowthField g;
    g.factor = Eigen::VectorXd::Ones(m.vertex_slots());
    const ForceField f = growth_collision(m, rest, 2.0, g, 0.1);
    CHECK(f[0].norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f[3].norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f[0].z() < 0);  // repulsive
    CHECK(f[3].z() > 0);
  }

  SUBCASE("low growth factors are filtered by g_min") {
    Mesh m = make_facing_pair(0.5);
    GrowthField g;
    g.factor = Eigen::VectorXd::Constant(m.vertex_slots(), 0.05);
    const ForceField f = growth_collision(m, rest, 2.0, g, 0.1);
    for (Index v = 0; v < m.vertex_slots(); ++v) CHECK(f[v].norm() == 0);
    // and g_min = 0 disables the filter
    const ForceField f2 = growth_collision(m, rest, 2.0, g, 0.0);
    CHECK(f2[0].norm() > 0);
  }

  SUBCASE("all pairs beyond L0: zero field") {
    Mesh m = make_facing_pair(3.0);
    GrowthField g;
    g.factor = Eigen::VectorXd::Ones(m.vertex_slots());
    const ForceField f = growth_collision(m, rest, 2.0, g, 0.0);
    for (Index v = 0; v < m.vertex_slots(); ++v) CHECK(f[v].norm() == 0);
  }

  SUBCASE("coincident vertices get a deterministic axis separation") {
    Mesh m = make_facing_pair(0.0);  // vertices 0 and 3 coincide
    GrowthField g;
    g.factor = Eigen::VectorXd::Ones(m.vertex_slots());
    Index coincident = 0;
    const ForceField f = growth_collision(m, rest, 2.0, g, 0.0, &coincident);
    CHECK(coincident == 1);
    CHECK(f[0].x() == doctest::Approx(-2.0).epsilon(1e-12));  // k * L0 along -x
    CHECK(f[3].x() == doctest::Approx(2.0).epsilon(1e-12));
  }
}
