#pragma once

#include "cabbage/forces.hpp"
#include "cabbage/growth.hpp"
#include "cabbage/mesh.hpp"

namespace cabbage {

/// Interpretation of the reference length in the split criterion
///   length(e) > k * l / (1 + (g1 + g2)/2).
/// RestLength reads l as L0 (the default); SelfLength reads it as the edge's
/// own length, which degenerates to a pure growth-factor test.
enum class SplitLengthMode { RestLength, SelfLength };

/// Splits every edge that met the criterion at pass start, in handle order.
/// Boundary edges split at the midpoint; interior edges at
/// 3/8 (v1+v2) + 1/8 (v3+v4). New vertices inherit the endpoint-average
/// growth values. Edges created during the pass are not revisited.
Index subdivide_pass(Mesh& mesh, GrowthField& growth, const RestState& rest, Real k,
                     SplitLengthMode mode = SplitLengthMode::RestLength);

/// Visits interior edges once in handle order and flips those whose opposite
/// sector angles sum beyond pi (plus a small guard), when the flip is
/// geometrically valid.
Index delaunay_flip_pass(Mesh& mesh);

/// Collapses edges shorter than the (absolute) threshold at visit time when
/// the collapse is link-safe. Refusals are counted, not retried.
Index collapse_pass(Mesh& mesh, Real threshold, Index* refused = nullptr);

/// Removes degree-2 boundary tips (with their single face) until none remain;
/// never removes a component's last face.
Index ear_removal_pass(Mesh& mesh);

}  // namespace cabbage
