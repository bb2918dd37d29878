#include "cabbage/remesh.hpp"

#include "test_meshes.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

using namespace cabbage;
using namespace cabbage::testing;

namespace {

GrowthField constant_growth(const Mesh& m, Real g) {
  GrowthField field;
  field.distance = Eigen::VectorXd::Zero(m.vertex_slots());
  field.normalized = Eigen::VectorXd::Constant(m.vertex_slots(), g);
  field.factor = Eigen::VectorXd::Constant(m.vertex_slots(), g);
  return field;
}

RestState unit_rest() {
  RestState rest;
  rest.rest_length = 1.0;
  rest.stretch_stiffness = 2.0;
  return rest;
}

// --- planar Delaunay oracle ---------------------------------------------

/// Strictly-inside-circumcircle predicate for points in the z = 0 plane.
bool in_circumcircle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& p) {
  Eigen::Matrix3d m;
  auto row = [&](int r, const Vec3& q) {
    const Real dx = q.x() - p.x(), dy = q.y() - p.y();
    m(r, 0) = dx;
    m(r, 1) = dy;
    m(r, 2) = dx * dx + dy * dy;
  };
  row(0, a);
  row(1, b);
  row(2, c);
  const Real orient =
      (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  return m.determinant() * (orient > 0 ? 1 : -1) > 1e-12;
}

/// Brute-force Delaunay faces over a planar point set in general position:
/// every triple whose circumcircle strictly contains no other point.
std::set<std::array<Index, 3>> brute_force_delaunay(const std::vector<Vec3>& pts) {
  std::set<std::array<Index, 3>> faces;
  const Index n = static_cast<Index>(pts.size());
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      for (Index k = j + 1; k < n; ++k) {
        const Real orient = (pts[j].x() - pts[i].x()) * (pts[k].y() - pts[i].y()) -
                            (pts[j].y() - pts[i].y()) * (pts[k].x() - pts[i].x());
        if (std::abs(orient) < 1e-12) continue;  // collinear
        bool empty = true;
        for (Index p = 0; p < n && empty; ++p) {
          if (p == i || p == j || p == k) continue;
          if (in_circumcircle(pts[i], pts[j], pts[k], pts[p])) empty = false;
        }
        if (empty) faces.insert({i, j, k});
      }
  return faces;
}

/// Random planar triangulation of a square: jittered grid interior, random
/// quad diagonals; the boundary stays on the square so flipping converges to
/// the unconstrained Delaunay triangulation of the point set.
Mesh make_random_planar_mesh(int n, Rng& rng) {
  std::vector<Vec3> pts;
  auto id = [n](int i, int j) { return i * (n + 1) + j; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      Real x = i, y = j;
      const bool bx = i == 0 || i == n, by = j == 0 || j == n;
      if (!bx && !by) {
        x += rng.uniform(-0.35, 0.35);
        y += rng.uniform(-0.35, 0.35);
      } else if (bx && !by) {
        y += rng.uniform(-0.35, 0.35);  // tangential jitter only
      } else if (by && !bx) {
        x += rng.uniform(-0.35, 0.35);
      }
      pts.emplace_back(x, y, 0);
    }
  std::vector<std::array<Index, 3>> faces;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (rng.below(2)) {
        faces.push_back({a, b, c});
        faces.push_back({a, c, d});
      } else {
        faces.push_back({a, b, d});
        faces.push_back({b, c, d});
      }
    }
  return build_mesh(pts, faces);
}

Index angle_sum_violations(const Mesh& m) {
  Index count = 0;
  for (Index e = 0; e < m.edge_slots(); ++e) {
    if (!m.edge_alive(e) || m.is_boundary_edge(e)) continue;
    const Index h0 = 2 * e, h1 = h0 ^ 1;
    const Vec3& p0 = m.position(m.origin(h0));
    const Vec3& p1 = m.position(m.origin(h1));
    const Vec3& p2 = m.position(m.origin(m.prev(h0)));
    const Vec3& p3 = m.position(m.origin(m.prev(h1)));
    auto angle = [](const Vec3& apex, const Vec3& a, const Vec3& b) {
      const Vec3 u = a - apex, v = b - apex;
      return std::atan2(u.cross(v).norm(), u.dot(v));
    };
    if (angle(p2, p0, p1) + angle(p3, p0, p1) > std::numbers::pi + 1e-9) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("subdivide_pass") {
  SUBCASE("edges exactly at L0 with zero growth never split (strict threshold)") {
    Mesh m = make_hex_patch(2);
    GrowthField g = constant_growth(m, 0);
    CHECK(subdivide_pass(m, g, unit_rest(), 1.0) == 0);
    require_valid(m);
  }

  SUBCASE("growth factor one halves the threshold") {
    // sides {0.6, ~0.71, ~0.71} with L0 = 1: nothing splits at g = 0, all
    // three split at g = 1 where the threshold drops to 0.5
    auto build = [] {
      return build_mesh({{0, 0, 0}, {0.6, 0, 0}, {0.3, 0.64, 0}}, {{{0, 1, 2}}});
    };
    Mesh a = build();
    GrowthField g0 = constant_growth(a, 0);
    CHECK(subdivide_pass(a, g0, unit_rest(), 1.0) == 0);
    Mesh b = build();
    GrowthField g1 = constant_growth(b, 1);
    CHECK(subdivide_pass(b, g1, unit_rest(), 1.0) == 3);
    require_valid(b);
  }

  SUBCASE("interior split lands at the 3/8-1/8 stencil point") {
    Mesh m = build_mesh({{0, 0, 0}, {1, 0, 0}, {0.5, 1, 0}, {0.5, -1, 0}},
                        {{{0, 1, 2}}, {{1, 0, 3}}});
    GrowthField g = constant_growth(m, 1);
    const Index before = m.vertex_slots();
    subdivide_pass(m, g, unit_rest(), 1.0);
    require_valid(m);
    // edge 0 is (0,1), the interior edge, split first in handle order
    const Vec3 p = m.position(before);
    CHECK(p.x() == 0.5);
    CHECK(p.y() == 0.0);
    CHECK(p.z() == 0.0);
  }

  SUBCASE("boundary edges split at the midpoint; children inherit mean growth") {
    Mesh m = make_triangle();
    GrowthField g = constant_growth(m, 0);
    g.factor[0] = 0.2;
    g.factor[1] = 0.8;
    // stretch edge (0,1) beyond threshold
    m.set_position(1, Vec3(1.4, 0, 0));
    const Index fresh = m.vertex_slots();
    const Index splits = subdivide_pass(m, g, unit_rest(), 1.0);
    CHECK(splits >= 1);
    require_valid(m);
    CHECK((m.position(fresh) - Vec3(0.7, 0, 0)).norm() < 1e-15);
    CHECK(g.factor[fresh] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.factor.size() == m.vertex_slots());
  }

  SUBCASE("self-length mode reduces to a growth test") {
    Mesh m = make_hex_patch(1);
    GrowthField g = constant_growth(m, 0.5);
    // threshold: len > k*len/(1+0.5) is true for k=1, so every edge splits
    const Index edges = m.edge_count();
    CHECK(subdivide_pass(m, g, unit_rest(), 1.0, SplitLengthMode::SelfLength) == edges);
    require_valid(m);
  }
}

TEST_CASE("delaunay_flip_pass") {
  SUBCASE("cocircular square: opposite angles sum to exactly pi, no flip") {
    Mesh m = make_square();
    CHECK(delaunay_flip_pass(m) == 0);
  }

  SUBCASE("100 + 100 degree opposite angles flip") {
    const Real h = 0.5 / std::tan(std::numbers::pi * 50 / 180);
    Mesh m = build_mesh({{0, 0, 0}, {1, 0, 0}, {0.5, h, 0}, {0.5, -h, 0}},
                        {{{0, 1, 2}}, {{1, 0, 3}}});
    CHECK(delaunay_flip_pass(m) == 1);
    require_valid(m);
    CHECK(angle_sum_violations(m) == 0);
  }

  SUBCASE("iterated passes converge to the brute-force Delaunay triangulation") {
    Rng rng(101);
    for (int trial = 0; trial < 3; ++trial) {
      Mesh m = make_random_planar_mesh(6, rng);  // 49 vertices
      require_valid(m);
      Index guard = 0;
      while (delaunay_flip_pass(m) > 0) REQUIRE(++guard < 200);
      require_valid(m);
      CHECK(angle_sum_violations(m) == 0);

      std::set<std::array<Index, 3>> got;
      for (Index f = 0; f < m.face_slots(); ++f) {
        if (!m.face_alive(f)) continue;
        auto fv = m.face_vertices(f);
        std::sort(fv.begin(), fv.end());
        got.insert(fv);
      }
      CHECK(got == brute_force_delaunay(m.positions()));
    }
  }

  SUBCASE("a pass never increases the number of violating edges") {
    Rng rng(202);
    Mesh m = make_random_planar_mesh(5, rng);
    Index before = angle_sum_violations(m);
    for (int pass = 0; pass < 20; ++pass) {
      delaunay_flip_pass(m);
      const Index after = angle_sum_violations(m);
      CHECK(after <= before);
      before = after;
    }
  }
}

TEST_CASE("collapse_pass") {
  SUBCASE("nothing below threshold: zero collapses") {
    Mesh m = make_hex_patch(2);
    CHECK(collapse_pass(m, 0.2) == 0);
  }

  SUBCASE("a needle triangle is removed") {
    // hexagon fan with one rim vertex pulled next to its neighbor
    Mesh m = make_hex_fan();
    m.set_position(2, m.position(1) + Vec3(0.05, 0, 0));
    Index refused = 0;
    const Index collapsed = collapse_pass(m, 0.2, &refused);
    CHECK(collapsed == 1);
    require_valid(m);
    for (Index e = 0; e < m.edge_slots(); ++e)
      if (m.edge_alive(e)) CHECK(m.edge_length(e) >= 0.2);
  }

  SUBCASE("a chain of short edges terminates and stays valid") {
    Mesh m = make_strip(8);
    // compress x so every horizontal edge falls below threshold
    for (Index v = 0; v < m.vertex_slots(); ++v) {
      Vec3 p = m.position(v);
      p.x() *= 0.1;
      m.set_position(v, p);
    }
    collapse_pass(m, 0.2);
    require_valid(m);
    CHECK(m.face_count() >= 1);
  }
}

TEST_CASE("ear_removal_pass") {
  SUBCASE("a lone triangle is preserved") {
    Mesh m = make_triangle();
    CHECK(ear_removal_pass(m) == 0);
    CHECK(m.face_count() == 1);
  }

  SUBCASE("a protruding ear is removed") {
    Mesh m = make_hex_fan();
    // glue a triangle onto rim edge (1,2); its tip has exactly two neighbors
    std::vector<Vec3> pos(m.positions().begin(), m.positions().end());
    std::vector<std::array<Index, 3>> faces;
    for (Index f = 0; f < m.face_slots(); ++f) faces.push_back(m.face_vertices(f));
    pos.emplace_back(1.5, 0.9, 0);
    faces.push_back({2, 1, 7});
    Mesh with_ear = build_mesh(pos, faces);
    require_valid(with_ear);
    CHECK(ear_removal_pass(with_ear) == 1);
    require_valid(with_ear);
    CHECK_FALSE(with_ear.vertex_alive(7));
  }

  SUBCASE("a disk has no ears") {
    Mesh m = make_hex_patch(2);
    CHECK(ear_removal_pass(m) == 0);
  }

  SUBCASE("strip peeling terminates at the last face") {
    Mesh m = make_strip(5);
    ear_removal_pass(m);
    require_valid(m);
    CHECK(m.face_count() == 1);
  }
}
