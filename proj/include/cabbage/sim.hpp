#pragma once

#include "cabbage/collision.hpp"
#include "cabbage/fairing.hpp"
#include "cabbage/forces.hpp"
#include "cabbage/growth.hpp"
#include "cabbage/remesh.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace cabbage {

enum class Method { Shell, CollisionVariant };

struct BendingSchedule {
  Real k_min = 5e-3;
  Real k_max = 3e-2;
  Index ramp_steps = 50;
};

/// Linear ramp from k_min at step 0 to k_max at ramp end, constant after.
Real bending_coefficient(const BendingSchedule& schedule, Index step);

struct SimConfig {
  Method method = Method::Shell;
  GrowthParams growth;
  SourcePolicy sources = AllBoundaryPolicy{};
  Real split_k = 1.0;
  SplitLengthMode split_mode = SplitLengthMode::RestLength;
  Real collapse_factor = 0.2;  // threshold = factor * L0
  Real stretch_stiffness = 2.0;
  BendingSchedule bending;
  Real fairing_alpha = 0.75;
  Real fairing_beta = 0.1;
  Real fairing_tolerance = 1e-8;  // t = tolerance * L0^2
  Real collision_normal_factor = 0.25;
  Real collision_tangent_factor = 0.9;
  Real collision_stiffness = 0.5;
  Real collision_lambda = 0.5;
  bool collision_both_orders = false;
  Real growth_collision_stiffness = 2.0;
  Real growth_collision_gmin = 0.1;
  ExternalForceSpec external;
  Real dt = 0.01;
  Index max_steps = 10000;
  Index max_vertices = 3000;
  Index export_every = 25;
  std::uint64_t seed = 0;
};

struct StepReport {
  Index step = 0;
  Index splits = 0;
  Index flips = 0;
  Index collapses = 0;
  Index ears = 0;
  Index collision_events = 0;
  Index vertices = 0;
  Index edges = 0;
  Index faces = 0;
  Real bending_coefficient = 0;
  Real wall_ms = 0;
};

struct SimState {
  Mesh mesh;
  RestState rest;  // rest_length fixed at step 0, never mutated
  Index step_count = 0;
  std::vector<StepReport> reports;
};

SimState make_state(Mesh initial, const SimConfig& config);

/// One pipeline step: connectivity passes, growth field, subdivision, forces
/// and integration, smoothing, corrective collision, failure check. Throws
/// Error on step failure, leaving the state frozen for post-mortem export.
StepReport step(SimState& state, const SimConfig& config);

enum class StopReason { VertexBudget, StepBudget, Failure };

const char* to_string(StopReason reason);

struct RunResult {
  StopReason stop = StopReason::StepBudget;
  std::string failure_reason;
  Index steps = 0;
  std::uint64_t final_vertex_hash = 0;
  std::vector<StepReport> reports;
};

struct RunSinks {
  std::function<void(Index step, const SimState&)> on_frame;  // at export cadence
  std::function<void(const StepReport&, const SimState&)> on_step;
  /// tag is "last-valid" or "failed".
  std::function<void(const SimState&, const char* tag)> on_failure_frame;
};

/// Loops step() until the vertex budget, the step budget, or a failure stops
/// the run. Frames (and the final state) flow through the sinks.
RunResult run(const SimConfig& config, Mesh initial, SimState* out_state = nullptr,
              const RunSinks& sinks = {});

/// FNV-1a over the live vertex positions in handle order.
std::uint64_t vertex_buffer_hash(const Mesh& mesh);

}  // namespace cabbage
