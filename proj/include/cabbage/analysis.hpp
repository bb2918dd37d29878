#pragma once

#include "cabbage/mesh.hpp"

#include <string>

namespace cabbage {

struct MetricsReport {
  Index self_intersections = 0;
  Real mean_quality = 0;
  Real mean_valence = 0;
  Real mean_sq_dihedral = 0;  // mean theta^2 over interior edges
  Real sum_sq_dihedral = 0;   // unnormalized companion
  Index vertices = 0;
  Index edges = 0;
  Index faces = 0;
  bool failed = false;
  std::string failure_reason;
};

/// Exact count of intersecting face pairs that share no vertex, broad-phased
/// over face bounding boxes. Contacts within 1e-10 * rest_length do not
/// count.
Index count_self_intersections(const Mesh& mesh, Real rest_length);

/// Quality/valence/dihedral statistics over live elements. Does not run the
/// (more expensive) intersection count or failure check; see full_report.
MetricsReport metrics(const Mesh& mesh);

struct FailureCheck {
  bool failed = false;
  std::string reason;
};

/// Failure signature: non-finite positions, near-zero-area faces with very
/// long (> 10 L0) edges, or a structural validation failure.
FailureCheck detect_failure(const Mesh& mesh, Real rest_length);

/// metrics + intersection count + failure flag in one report.
MetricsReport full_report(const Mesh& mesh, Real rest_length);

}  // namespace cabbage
