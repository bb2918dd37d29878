#include "cabbage/forces.hpp"

#include <array>
#include <cmath>

namespace cabbage {

RestState make_rest_state(const Mesh& mesh, Real stretch_stiffness, Real bending_stiffness) {
  Real sum = 0;
  Index n = 0;
  for (Index e = 0; e < mesh.edge_slots(); ++e) {
    if (!mesh.edge_alive(e)) continue;
    sum += mesh.edge_length(e);
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::InvalidParams, "mesh has no edges");
  RestState rest;
  rest.rest_length = sum / n;
  rest.stretch_stiffness = stretch_stiffness;
  rest.bending_stiffness = bending_stiffness;
  return rest;
}

ForceField zero_field(const Mesh& mesh) {
  return ForceField(mesh.vertex_slots(), Vec3::Zero());
}

Index stretch_forces(const Mesh& mesh, const RestState& rest, ForceField& accum) {
  Index skipped = 0;
  for (Index e = 0; e < mesh.edge_slots(); ++e) {
    if (!mesh.edge_alive(e)) continue;
    const auto [i, j] = mesh.edge_vertices(e);
    const Vec3 d = mesh.position(j) - mesh.position(i);
    const Real len = d.norm();
    if (len < Real(1e-300)) {
      ++skipped;
      continue;
    }
    const Vec3 f = (len - rest.rest_length) * rest.stretch_stiffness / len * d;
    accum[i] += f;
    accum[j] -= f;
  }
  return skipped;
}

namespace {

struct Hinge {
  Index x0, x1, x2, x3;  // edge endpoints, then face-A and face-B opposites
};

bool hinge_of(const Mesh& mesh, Index e, Hinge& h) {
  if (mesh.is_boundary_edge(e)) return false;
  const Index h0 = 2 * e, h1 = h0 ^ 1;
  h.x0 = mesh.origin(h0);
  h.x1 = mesh.origin(h1);
  h.x2 = mesh.origin(mesh.prev(h0));
  h.x3 = mesh.origin(mesh.prev(h1));
  return true;
}

}  // namespace

Real bending_energy(const Mesh& mesh, const RestState& rest) {
  Real energy = 0;
  Hinge hg;
  for (Index e = 0; e < mesh.edge_slots(); ++e) {
    if (!mesh.edge_alive(e) || !hinge_of(mesh, e, hg)) continue;
    const Vec3 &x0 = mesh.position(hg.x0), &x1 = mesh.position(hg.x1);
    const Vec3 &x2 = mesh.position(hg.x2), &x3 = mesh.position(hg.x3);
    const Vec3 ev = x1 - x0;
    const Real el = ev.norm();
    const Vec3 nA = (x1 - x0).cross(x2 - x0);
    const Vec3 nB = (x0 - x1).cross(x3 - x1);
    const Real nAl = nA.norm(), nBl = nB.norm();
    if (el < Real(1e-300) || nAl < Real(1e-300) || nBl < Real(1e-300)) continue;
    const Real theta =
        std::atan2((nB / nBl).cross(nA / nAl).dot(ev / el), (nA / nAl).dot(nB / nBl));
    const Real dev = theta - rest.rest_angle;
    // |e| / h_e with h_e = (hA + hB)/6 and hA = |nA|/|e|.
    const Real weight = Real(6) * el * el / (nAl + nBl);
    energy += rest.bending_stiffness * dev * dev * weight;
  }
  return energy;
}

Index bending_forces(const Mesh& mesh, const RestState& rest, ForceField& accum) {
  Index skipped = 0;
  Hinge hg;
  for (Index e = 0; e < mesh.edge_slots(); ++e) {
    if (!mesh.edge_alive(e) || !hinge_of(mesh, e, hg)) continue;
    const Vec3 &x0 = mesh.position(hg.x0), &x1 = mesh.position(hg.x1);
    const Vec3 &x2 = mesh.position(hg.x2), &x3 = mesh.position(hg.x3);
    const Vec3 ev = x1 - x0;
    const Real el = ev.norm();
    const Vec3 nA = (x1 - x0).cross(x2 - x0);
    const Vec3 nB = (x0 - x1).cross(x3 - x1);
    const Real nAl = nA.norm(), nBl = nB.norm();
    const Real scale = el * el + nAl + nBl;
    if (el * el < Real(1e-14) * scale || nAl < Real(1e-14) * scale ||
        nBl < Real(1e-14) * scale || el < Real(1e-300)) {
      ++skipped;
      continue;
    }
    const Vec3 nAh = nA / nAl, nBh = nB / nBl, eh = ev / el;
    const Real theta = std::atan2(nBh.cross(nAh).dot(eh), nAh.dot(nBh));
    const Real dev = theta - rest.rest_angle;

    // Gradient of the hinge angle.
    const Vec3 gA = nA / (nAl * nAl);
    const Vec3 gB = nB / (nBl * nBl);
    const Vec3 gt0 = -((x1 - x2).dot(eh)) * gA - ((x1 - x3).dot(eh)) * gB;
    const Vec3 gt1 = ((x0 - x2).dot(eh)) * gA + ((x0 - x3).dot(eh)) * gB;
    const Vec3 gt2 = el * gA;
    const Vec3 gt3 = el * gB;

    // Gradient of the weight 6|e|^2 / (|nA| + |nB|).
    const Real S = nAl + nBl;
    const Real w = Real(6) * el * el / S;
    const Vec3 gnA0 = nAh.cross(x2 - x1);
    const Vec3 gnA1 = nAh.cross(x0 - x2);
    const Vec3 gnA2 = nAh.cross(x1 - x0);
    const Vec3 gnB0 = nBh.cross(x1 - x3);
    const Vec3 gnB1 = nBh.cross(x3 - x0);
    const Vec3 gnB3 = nBh.cross(x0 - x1);
    const Real c_e = Real(12) * el / S;
    const Real c_s = w / S;
    const Vec3 gw0 = c_e * (-eh) - c_s * (gnA0 + gnB0);
    const Vec3 gw1 = c_e * eh - c_s * (gnA1 + gnB1);
    const Vec3 gw2 = -c_s * gnA2;
    const Vec3 gw3 = -c_s * gnB3;

    const Real kb = rest.bending_stiffness;
    std::array<Vec3, 4> force = {
        -kb * (Real(2) * dev * w * gt0 + dev * dev * gw0),
        -kb * (Real(2) * dev * w * gt1 + dev * dev * gw1),
        -kb * (Real(2) * dev * w * gt2 + dev * dev * gw2),
        -kb * (Real(2) * dev * w * gt3 + dev * dev * gw3),
    };
    // The hinge gradient diverges like 1/height^2 on slivers. Cap the hinge
    // contribution at the strongest stretch pull, scaling the whole stencil
    // so the zero net force and torque of the exact gradient survive.
    const Real cap = rest.stretch_stiffness * rest.rest_length;
    Real strongest = 0;
    for (const Vec3& fv : force) strongest = std::max(strongest, fv.norm());
    const Real damp = strongest > cap ? cap / strongest : Real(1);
    accum[hg.x0] += damp * force[0];
    accum[hg.x1] += damp * force[1];
    accum[hg.x2] += damp * force[2];
    accum[hg.x3] += damp * force[3];
  }
  return skipped;
}

void external_forces(const Mesh& mesh, const GrowthField& growth, const ExternalForceSpec& spec,
                     ForceField& accum) {
  if (spec.is_zero()) return;
  Vec3 axis = spec.rotation_axis;
  const Real axis_len = axis.norm();
  if (axis_len > 0) axis /= axis_len;
  for (Index v = 0; v < mesh.vertex_slots(); ++v) {
    if (!mesh.vertex_alive(v)) continue;
    const Real g = growth.factor[v];
    accum[v] += spec.gravity * (Real(1) - g);
    if (spec.rotation_strength > 0 && axis_len > 0)
      accum[v] += spec.rotation_strength * g * axis.cross(mesh.position(v) - spec.rotation_center);
  }
}

void integrate(Mesh& mesh, const ForceField& total, Real dt) {
  if (!(dt > 0)) throw Error(ErrorCode::InvalidParams, "dt must be positive");
  for (Index v = 0; v < mesh.vertex_slots(); ++v)
    if (mesh.vertex_alive(v) && !total[v].allFinite())
      throw Error(ErrorCode::NonFiniteForce, "non-finite force; step aborted");
  for (Index v = 0; v < mesh.vertex_slots(); ++v)
    if (mesh.vertex_alive(v)) mesh.set_position(v, mesh.position(v) + dt * total[v]);
}

}  // namespace cabbage
