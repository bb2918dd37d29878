#include "cabbage/growth.hpp"

#include "cabbage/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace cabbage {

void GrowthParams::check() const {
  if (!(cutoff > 0 && cutoff < 1))
    throw Error(ErrorCode::InvalidParams, "growth cutoff must lie in (0,1)");
  if (!(steepness >= 0 && steepness < 1))
    throw Error(ErrorCode::InvalidParams, "growth steepness must lie in [0,1)");
}

SourceSet select_sources(const Mesh& mesh, const SourcePolicy& policy) {
  SourceSet set;
  if (std::holds_alternative<ExplicitPolicy>(policy)) {
    for (Index v : std::get<ExplicitPolicy>(policy).vertices) {
      if (!mesh.vertex_alive(v))
        throw Error(ErrorCode::DeadHandle, "explicit growth source is dead");
      set.vertices.push_back(v);
    }
  } else {
    std::vector<Index> boundary;
    for (Index v = 0; v < mesh.vertex_slots(); ++v)
      if (mesh.vertex_alive(v) && mesh.is_boundary_vertex(v)) boundary.push_back(v);
    if (boundary.empty())
      throw Error(ErrorCode::EmptyBoundary, "mesh has no boundary vertices");
    if (std::holds_alternative<AllBoundaryPolicy>(policy)) {
      set.vertices = boundary;
    } else {
      const auto& p = std::get<RandomBoundaryPolicy>(policy);
      Rng rng(p.seed);
      for (std::size_t i = boundary.size() - 1; i > 0; --i)
        std::swap(boundary[i], boundary[rng.below(i + 1)]);
      const std::size_t n = std::min<std::size_t>(p.count, boundary.size());
      set.vertices.assign(boundary.begin(), boundary.begin() + n);
    }
  }
  std::sort(set.vertices.begin(), set.vertices.end());
  set.vertices.erase(std::unique(set.vertices.begin(), set.vertices.end()), set.vertices.end());
  if (set.vertices.empty()) throw Error(ErrorCode::EmptyBoundary, "empty source set");
  return set;
}

Eigen::VectorXd geodesic_distances(const Mesh& mesh, const SourceSet& sources) {
  const Index n = mesh.vertex_slots();
  constexpr Real inf = std::numeric_limits<Real>::infinity();
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, inf);

  using Entry = std::pair<Real, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  for (Index v : sources.vertices) {
    dist[v] = 0;
    queue.push({0, v});
  }
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (Index h : mesh.outgoing_halfedges(v)) {
      const Index u = mesh.dest(h);
      const Real nd = d + (mesh.position(u) - mesh.position(v)).norm();
      if (nd < dist[u]) {
        dist[u] = nd;
        queue.push({nd, u});
      }
    }
  }
  for (Index v = 0; v < n; ++v) {
    if (!mesh.vertex_alive(v))
      dist[v] = 0;
    else if (!std::isfinite(dist[v]))
      throw Error(ErrorCode::DisconnectedComponentWithoutSource,
                  "vertex unreachable from every growth source");
  }
  return dist;
}

GrowthField growth_factors(const Mesh& mesh, const Eigen::VectorXd& distances,
                           const GrowthParams& params) {
  params.check();
  const Index n = mesh.vertex_slots();
  GrowthField field;
  field.distance = distances;
  field.normalized = Eigen::VectorXd::Zero(n);
  field.factor = Eigen::VectorXd::Zero(n);

  Real dmax = 0;
  for (Index v = 0; v < n; ++v) {
    if (!mesh.vertex_alive(v)) continue;
    if (!(distances[v] >= 0) || !std::isfinite(distances[v]))
      throw Error(ErrorCode::InvalidParams, "distances must be finite and non-negative");
    dmax = std::max(dmax, distances[v]);
  }

  const Real p = params.cutoff;
  const Real c = params.exponent();
  for (Index v = 0; v < n; ++v) {
    if (!mesh.vertex_alive(v)) continue;
    Real dn = dmax > 0 ? distances[v] / dmax : Real(0);
    if (params.high_at_sources) dn = Real(1) - dn;
    field.normalized[v] = dn;
    field.factor[v] = dn <= p ? std::pow(dn / p, c) * p
                              : Real(1) - std::pow((Real(1) - dn) / (Real(1) - p), c) * (Real(1) - p);
  }
  return field;
}

}  // namespace cabbage
