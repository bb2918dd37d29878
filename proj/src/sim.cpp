#include "cabbage/sim.hpp"

#include "cabbage/analysis.hpp"

#include <chrono>
#include <cstring>

namespace cabbage {

Real bending_coefficient(const BendingSchedule& schedule, Index step) {
  if (schedule.k_min > schedule.k_max)
    throw Error(ErrorCode::InvalidSchedule, "bending k_min exceeds k_max");
  if (step < 0) throw Error(ErrorCode::InvalidParams, "negative step");
  if (schedule.ramp_steps <= 0 || step >= schedule.ramp_steps) return schedule.k_max;
  const Real s = static_cast<Real>(step) / static_cast<Real>(schedule.ramp_steps);
  return schedule.k_min + s * (schedule.k_max - schedule.k_min);
}

SimState make_state(Mesh initial, const SimConfig& config) {
  SimState state;
  state.rest = make_rest_state(initial, config.stretch_stiffness,
                               bending_coefficient(config.bending, 0));
  state.mesh = std::move(initial);
  return state;
}

StepReport step(SimState& state, const SimConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  Mesh& mesh = state.mesh;
  StepReport report;
  report.step = state.step_count + 1;  // completed-step count once this returns
  report.bending_coefficient = bending_coefficient(config.bending, state.step_count);

  // (1) connectivity optimization
  report.flips = delaunay_flip_pass(mesh);
  report.collapses = collapse_pass(mesh, config.collapse_factor * state.rest.rest_length);
  report.ears = ear_removal_pass(mesh);

  // (2) growth field
  const SourceSet sources = select_sources(mesh, config.sources);
  GrowthField growth = growth_factors(mesh, geodesic_distances(mesh, sources), config.growth);

  // (3) differential subdivision
  report.splits = subdivide_pass(mesh, growth, state.rest, config.split_k, config.split_mode);

  // (4) forces and integration
  RestState rest = state.rest;
  rest.bending_stiffness = report.bending_coefficient;
  ForceField total = zero_field(mesh);
  if (config.method == Method::Shell) {
    stretch_forces(mesh, rest, total);
    bending_forces(mesh, rest, total);
  } else {
    const ForceField fc = growth_collision(mesh, rest, config.growth_collision_stiffness, growth,
                                           config.growth_collision_gmin);
    for (Index v = 0; v < mesh.vertex_slots(); ++v) total[v] += fc[v];
  }
  external_forces(mesh, growth, config.external, total);
  integrate(mesh, total, config.dt);

  // (5) fairing
  const Real t_abs = config.fairing_tolerance * state.rest.rest_length * state.rest.rest_length;
  smooth_interior(mesh, config.fairing_alpha, t_abs);
  smooth_boundary(mesh, config.fairing_beta);

  // (6) corrective collision as direct displacements, then local smoothing of
  // the untouched neighbors of involved vertices.
  const ColliderSet colliders = build_colliders(
      mesh, state.rest.rest_length, config.collision_normal_factor, config.collision_tangent_factor);
  const CollisionOutcome outcome =
      corrective_collision(mesh, colliders, config.collision_stiffness, config.collision_lambda,
                           config.collision_both_orders);
  report.collision_events = outcome.event_count;
  for (Index v = 0; v < mesh.vertex_slots(); ++v) {
    if (!mesh.vertex_alive(v)) continue;
    // Corrective displacements accumulate over pairs; in a pile-up the sum
    // can dwarf the local scale. Displace at most one mean incident edge.
    Vec3 delta = outcome.force[v];
    const Real len = delta.norm();
    if (len > 0) {
      Real mean_edge = 0;
      Index n = 0;
      for (Index h : mesh.outgoing_halfedges(v)) {
        mean_edge += (mesh.position(mesh.dest(h)) - mesh.position(v)).norm();
        ++n;
      }
      mean_edge /= std::max<Index>(n, 1);
      if (len > mean_edge) delta *= mean_edge / len;
      mesh.set_position(v, mesh.position(v) + delta);
    }
  }
  std::vector<Index> fringe;
  for (Index v = 0; v < mesh.vertex_slots(); ++v) {
    if (!mesh.vertex_alive(v) || !outcome.involved[v]) continue;
    for (Index u : mesh.vertex_neighbors(v))
      if (!outcome.involved[u]) fringe.push_back(u);
  }
  std::sort(fringe.begin(), fringe.end());
  fringe.erase(std::unique(fringe.begin(), fringe.end()), fringe.end());
  smooth_subset(mesh, fringe, config.fairing_alpha, config.fairing_beta, t_abs);

  const FailureCheck failure = detect_failure(mesh, state.rest.rest_length);
  if (failure.failed) throw Error(ErrorCode::NonFiniteForce, "step failure: " + failure.reason);

  ++state.step_count;
  report.vertices = mesh.vertex_count();
  report.edges = mesh.edge_count();
  report.faces = mesh.face_count();
  report.wall_ms = std::chrono::duration<Real, std::milli>(std::chrono::steady_clock::now() - t0)
                       .count();
  state.reports.push_back(report);
  return report;
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::VertexBudget: return "vertex budget";
    case StopReason::StepBudget: return "step budget";
    case StopReason::Failure: return "failure";
  }
  return "unknown";
}

std::uint64_t vertex_buffer_hash(const Mesh& mesh) {
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](const void* data, std::size_t bytes) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < bytes; ++k) {
      hash ^= p[k];
      hash *= 1099511628211ull;
    }
  };
  for (Index v = 0; v < mesh.vertex_slots(); ++v) {
    if (!mesh.vertex_alive(v)) continue;
    const Vec3& p = mesh.position(v);
    double coords[3] = {p.x(), p.y(), p.z()};
    mix(coords, sizeof(coords));
  }
  return hash;
}

RunResult run(const SimConfig& config, Mesh initial, SimState* out_state, const RunSinks& sinks) {
  SimState state = make_state(std::move(initial), config);
  RunResult result;

  auto emit_frame = [&](Index at) {
    if (sinks.on_frame) sinks.on_frame(at, state);
  };

  emit_frame(0);
  Index last_export = 0;
  Mesh last_good = state.mesh;

  while (true) {
    if (state.mesh.vertex_count() >= config.max_vertices) {
      result.stop = StopReason::VertexBudget;
      break;
    }
    if (state.step_count >= config.max_steps) {
      result.stop = StopReason::StepBudget;
      break;
    }
    last_good = state.mesh;
    try {
      const StepReport report = step(state, config);
      if (sinks.on_step) sinks.on_step(report, state);
    } catch (const Error& err) {
      result.stop = StopReason::Failure;
      result.failure_reason = err.what();
      if (sinks.on_failure_frame) {
        SimState frozen = state;
        frozen.mesh = last_good;
        sinks.on_failure_frame(frozen, "last-valid");
        sinks.on_failure_frame(state, "failed");
      }
      break;
    }
    const Index cadence = std::max<Index>(1, config.export_every);
    if (state.step_count % cadence == 0) {
      emit_frame(state.step_count);
      last_export = state.step_count;
    }
  }

  if (result.stop != StopReason::Failure && state.step_count != last_export &&
      state.step_count > 0)
    emit_frame(state.step_count);

  result.steps = state.step_count;
  result.final_vertex_hash = vertex_buffer_hash(state.mesh);
  result.reports = state.reports;
  if (out_state) *out_state = std::move(state);
  return result;
}

}  // namespace cabbage
