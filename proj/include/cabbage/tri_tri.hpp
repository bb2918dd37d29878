#pragma once

#include "cabbage/types.hpp"

namespace cabbage {

/// Exact-within-tolerance triangle-triangle intersection. Contacts whose
/// penetration does not exceed `tol` (touching vertices, grazing edges,
/// coplanar boundary contact) do not count. Degenerate triangles never
/// intersect.
bool tri_tri_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                       const Vec3& b1, const Vec3& b2, Real tol);

}  // namespace cabbage
