#pragma once

#include "cabbage/growth.hpp"
#include "cabbage/mesh.hpp"

namespace cabbage {

/// Rest quantities shared by the shell forces. The rest length is fixed once
/// from the initial mesh and never mutated afterwards; the rest area is
/// recorded for reference only and drives no force.
struct RestState {
  Real rest_length = 1;        // L0, mean edge length of the initial mesh
  Real rest_angle = 0;         // rest dihedral, radians
  Real stretch_stiffness = 2;  // k_s
  Real bending_stiffness = 0;  // instantaneous k_b, supplied by the schedule

  Real rest_area() const { return std::sqrt(Real(3)) / Real(4) * rest_length * rest_length; }
};

/// L0 := mean live edge length.
RestState make_rest_state(const Mesh& mesh, Real stretch_stiffness, Real bending_stiffness);

struct ExternalForceSpec {
  Vec3 gravity = Vec3::Zero();
  Vec3 rotation_axis = Vec3::UnitZ();
  Vec3 rotation_center = Vec3::Zero();
  Real rotation_strength = 0;

  bool is_zero() const { return gravity.isZero() && rotation_strength == 0; }
};

ForceField zero_field(const Mesh& mesh);

/// Hooke spring on every edge toward the rest length; equal and opposite on
/// the two endpoints. Returns the number of skipped zero-length edges.
Index stretch_forces(const Mesh& mesh, const RestState& rest, ForceField& accum);

/// Exact negative gradient of the hinge bending energy
///   E = k_b * sum_e (theta_e - rest)^2 * |e| / h_e,
/// where h_e is one third of the mean height of the two incident faces.
/// Returns the number of skipped degenerate hinges.
Index bending_forces(const Mesh& mesh, const RestState& rest, ForceField& accum);

/// The energy the bending forces differentiate.
Real bending_energy(const Mesh& mesh, const RestState& rest);

/// Gravity attenuated by growth, rotation amplified by it:
///   F = gravity*(1-g) + strength*g*(axis x (v - center)).
void external_forces(const Mesh& mesh, const GrowthField& growth, const ExternalForceSpec& spec,
                     ForceField& accum);

/// Overdamped explicit step x += dt*F. Throws NonFiniteForce (mesh untouched)
/// when the field is not finite.
void integrate(Mesh& mesh, const ForceField& total, Real dt);

}  // namespace cabbage
