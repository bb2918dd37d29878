#include "cabbage/tri_tri.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace cabbage {

namespace {

struct Interval {
  Real lo = std::numeric_limits<Real>::infinity();
  Real hi = -std::numeric_limits<Real>::infinity();
  void add(Real t) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  bool empty() const { return lo > hi; }
};

/// Projection interval along `axis` of the cut of triangle (p0,p1,p2) by the
/// plane whose signed vertex distances are d0,d1,d2.
Interval plane_cut(const std::array<Vec3, 3>& p, const std::array<Real, 3>& d, const Vec3& axis,
                   Real tol) {
  Interval iv;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) <= tol) iv.add(axis.dot(p[k]));
    const int m = (k + 1) % 3;
    if ((d[k] > tol && d[m] < -tol) || (d[k] < -tol && d[m] > tol)) {
      const Real s = d[k] / (d[k] - d[m]);
      iv.add(axis.dot(p[k] + s * (p[m] - p[k])));
    }
  }
  return iv;
}

// --- coplanar case, in the dominant-axis projection plane ---

Real cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Signed distance of q from the directed line p0 -> p1.
Real line_dist(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& q) {
  const Eigen::Vector2d e = p1 - p0;
  const Real len = e.norm();
  if (len <= 0) return 0;
  return cross2(e, q - p0) / len;
}

bool point_strictly_inside(const std::array<Eigen::Vector2d, 3>& t, const Eigen::Vector2d& q,
                           Real tol) {
  Real orient = cross2(t[1] - t[0], t[2] - t[0]);
  if (orient == 0) return false;
  const Real sign = orient > 0 ? 1 : -1;
  for (int k = 0; k < 3; ++k)
    if (sign * line_dist(t[k], t[(k + 1) % 3], q) <= tol) return false;
  return true;
}

bool segments_properly_cross(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                             const Eigen::Vector2d& q0, const Eigen::Vector2d& q1, Real tol) {
  const Real dq0 = line_dist(p0, p1, q0);
  const Real dq1 = line_dist(p0, p1, q1);
  if (!((dq0 > tol && dq1 < -tol) || (dq0 < -tol && dq1 > tol))) return false;
  const Real dp0 = line_dist(q0, q1, p0);
  const Real dp1 = line_dist(q0, q1, p1);
  return (dp0 > tol && dp1 < -tol) || (dp0 < -tol && dp1 > tol);
}

bool coplanar_overlap(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b, const Vec3& n,
                      Real tol) {
  int drop = 0;
  n.cwiseAbs().maxCoeff(&drop);
  auto flatten = [&](const Vec3& p) {
    return Eigen::Vector2d(p[(drop + 1) % 3], p[(drop + 2) % 3]);
  };
  std::array<Eigen::Vector2d, 3> ta = {flatten(a[0]), flatten(a[1]), flatten(a[2])};
  std::array<Eigen::Vector2d, 3> tb = {flatten(b[0]), flatten(b[1]), flatten(b[2])};
  for (int k = 0; k < 3; ++k) {
    if (point_strictly_inside(tb, ta[k], tol)) return true;
    if (point_strictly_inside(ta, tb[k], tol)) return true;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (segments_properly_cross(ta[i], ta[(i + 1) % 3], tb[j], tb[(j + 1) % 3], tol))
        return true;
  return false;
}

}  // namespace

bool tri_tri_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                       const Vec3& b1, const Vec3& b2, Real tol) {
  const std::array<Vec3, 3> a = {a0, a1, a2};
  const std::array<Vec3, 3> b = {b0, b1, b2};

  const Vec3 na_raw = (a1 - a0).cross(a2 - a0);
  const Vec3 nb_raw = (b1 - b0).cross(b2 - b0);
  const Real sa = (a1 - a0).squaredNorm() + (a2 - a0).squaredNorm() + (a2 - a1).squaredNorm();
  const Real sb = (b1 - b0).squaredNorm() + (b2 - b0).squaredNorm() + (b2 - b1).squaredNorm();
  if (na_raw.norm() <= Real(1e-12) * sa || nb_raw.norm() <= Real(1e-12) * sb) return false;
  const Vec3 na = na_raw.normalized();
  const Vec3 nb = nb_raw.normalized();

  const std::array<Real, 3> da = {(a0 - b0).dot(nb), (a1 - b0).dot(nb), (a2 - b0).dot(nb)};
  if ((da[0] > tol && da[1] > tol && da[2] > tol) ||
      (da[0] < -tol && da[1] < -tol && da[2] < -tol))
    return false;

  const std::array<Real, 3> db = {(b0 - a0).dot(na), (b1 - a0).dot(na), (b2 - a0).dot(na)};
  if ((db[0] > tol && db[1] > tol && db[2] > tol) ||
      (db[0] < -tol && db[1] < -tol && db[2] < -tol))
    return false;

  if (std::abs(da[0]) <= tol && std::abs(da[1]) <= tol && std::abs(da[2]) <= tol)
    return coplanar_overlap(a, b, nb, tol);

  // Interpenetration needs each triangle to pass strictly through the
  // other's plane; vertex or edge contact resting on a plane is touching.
  const auto strict_straddle = [tol](const std::array<Real, 3>& d) {
    return *std::min_element(d.begin(), d.end()) < -tol &&
           *std::max_element(d.begin(), d.end()) > tol;
  };
  if (!strict_straddle(da) || !strict_straddle(db)) return false;

  // Both triangles cut the common plane line; compare their cut intervals.
  const Vec3 axis = na.cross(nb).normalized();
  const Interval ia = plane_cut(a, da, axis, tol);
  const Interval ib = plane_cut(b, db, axis, tol);
  if (ia.empty() || ib.empty()) return false;
  const Real overlap = std::min(ia.hi, ib.hi) - std::max(ia.lo, ib.lo);
  return overlap > tol;
}

}  // namespace cabbage
