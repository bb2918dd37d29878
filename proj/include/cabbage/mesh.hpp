#pragma once

#include "cabbage/types.hpp"

#include <array>
#include <vector>

namespace cabbage {

/// Closed-form quantities of one triangle.
struct FaceGeometry {
  Vec3 barycenter = Vec3::Zero();
  Vec3 circumcenter = Vec3::Zero();
  Real circumradius = 0;
  Real area = 0;
  Vec3 normal = Vec3::Zero();
  Real quality = 0;  // 4*sqrt(3)*A / (l1^2+l2^2+l3^2), 1 iff equilateral
};

enum class FlipStatus { Flipped, BoundaryEdge, NonConvexQuad };
enum class CollapseStatus { Collapsed, LinkConditionViolation, WouldBreakBoundary, FoldOver };
enum class EarStatus { Removed, NotAnEarTip, LastFace };

struct CollapseResult {
  CollapseStatus status;
  Index survivor = kInvalid;
  bool ok() const { return status == CollapseStatus::Collapsed; }
};

/// Half-edge triangular mesh with boundary.
///
/// Half-edges are stored in twin pairs: edge e owns half-edges 2e and 2e+1.
/// Boundary half-edges carry face == kInvalid and are linked into boundary
/// loops through their next/prev fields, so vertex stars circulate uniformly
/// via next(twin(h)). A vertex's stored outgoing half-edge is its unique
/// boundary one whenever the vertex lies on the boundary.
///
/// Deleted elements are tombstoned; handles are never reused, so iteration in
/// ascending slot order is stable across identical operation sequences.
/// Mutation is single-threaded; concurrent read-only queries between
/// mutations are safe.
class Mesh {
 public:
  Mesh() = default;

  // --- counts and liveness ---
  Index vertex_count() const { return live_vertices_; }
  Index edge_count() const { return live_edges_; }
  Index face_count() const { return live_faces_; }
  Index vertex_slots() const { return static_cast<Index>(positions_.size()); }
  Index edge_slots() const { return static_cast<Index>(edge_alive_.size()); }
  Index face_slots() const { return static_cast<Index>(face_he_.size()); }
  bool vertex_alive(Index v) const { return v >= 0 && v < vertex_slots() && vertex_alive_[v]; }
  bool edge_alive(Index e) const { return e >= 0 && e < edge_slots() && edge_alive_[e]; }
  bool face_alive(Index f) const { return f >= 0 && f < face_slots() && face_alive_[f]; }

  // --- positions ---
  const Vec3& position(Index v) const { return positions_[v]; }
  void set_position(Index v, const Vec3& p) { positions_[v] = p; }
  const std::vector<Vec3>& positions() const { return positions_; }

  // --- half-edge accessors ---
  static Index twin(Index h) { return h ^ 1; }
  static Index edge_of(Index h) { return h >> 1; }
  static Index halfedge_of(Index e, int side) { return 2 * e + side; }
  Index origin(Index h) const { return he_[h].origin; }
  Index dest(Index h) const { return he_[twin(h)].origin; }
  Index face(Index h) const { return he_[h].face; }
  Index next(Index h) const { return he_[h].next; }
  Index prev(Index h) const { return he_[h].prev; }
  Index vertex_halfedge(Index v) const { return vertex_he_[v]; }
  Index face_halfedge(Index f) const { return face_he_[f]; }

  bool is_boundary_halfedge(Index h) const { return he_[h].face == kInvalid; }
  bool is_boundary_edge(Index e) const {
    return is_boundary_halfedge(2 * e) || is_boundary_halfedge(2 * e + 1);
  }
  bool is_boundary_vertex(Index v) const { return is_boundary_halfedge(vertex_he_[v]); }
  bool is_boundary_face(Index f) const;  // has a boundary vertex

  std::array<Index, 2> edge_vertices(Index e) const {
    return {origin(2 * e), origin(2 * e + 1)};
  }
  std::array<Index, 2> edge_faces(Index e) const { return {face(2 * e), face(2 * e + 1)}; }
  std::array<Index, 3> face_vertices(Index f) const;
  Real edge_length(Index e) const {
    return (positions_[origin(2 * e + 1)] - positions_[origin(2 * e)]).norm();
  }

  // --- circulation (deterministic order, starting at the stored half-edge) ---
  std::vector<Index> outgoing_halfedges(Index v) const;
  std::vector<Index> vertex_neighbors(Index v) const;
  std::vector<Index> vertex_faces(Index v) const;
  Index valence(Index v) const;

  // --- topology edits ---
  /// Splits edge e at `position`. Interior split replaces 2 faces with 4,
  /// boundary split replaces 1 with 2. Returns the new vertex.
  Index split_edge(Index e, const Vec3& position);
  /// Replaces the diagonal of the incident face pair by the opposite one.
  FlipStatus flip_edge(Index e);
  /// Merges the endpoints of e (survivor = origin of half-edge 2e), placed at
  /// the midpoint, or at the boundary endpoint when exactly one is boundary.
  CollapseResult collapse_edge(Index e);
  /// Removes an ear-tip vertex (exactly two neighbors) and its single face.
  EarStatus remove_vertex(Index v);

  // --- validation ---
  /// Full structural pass: twin involution, 3-cycles, boundary loops,
  /// manifold single-fan stars, no dead references, no duplicate faces.
  std::vector<std::string> validate() const;
  bool is_valid() const { return validate().empty(); }

  const std::vector<Index>& deleted_vertices() const { return free_vertices_; }
  const std::vector<Index>& deleted_edges() const { return free_edges_; }
  const std::vector<Index>& deleted_faces() const { return free_faces_; }

  friend Mesh build_mesh(const std::vector<Vec3>& positions,
                         const std::vector<std::array<Index, 3>>& triangles);

 private:
  struct HalfEdge {
    Index origin = kInvalid;
    Index face = kInvalid;
    Index next = kInvalid;
    Index prev = kInvalid;
  };

  Index new_vertex(const Vec3& p);
  Index new_edge();
  Index new_face();
  void kill_vertex(Index v);
  void kill_edge(Index e);
  void kill_face(Index f);
  void set_he(Index h, Index origin, Index face, Index next, Index prev) {
    he_[h] = {origin, face, next, prev};
  }
  /// Repoints vertex_he_[v] starting from a known-live outgoing half-edge,
  /// preferring the boundary one.
  void fix_vertex_halfedge(Index v, Index start);
  void check_vertex(Index v, const char* op) const;
  void check_edge(Index e, const char* op) const;

  std::vector<Vec3> positions_;
  std::vector<Index> vertex_he_;
  std::vector<HalfEdge> he_;
  std::vector<Index> face_he_;
  std::vector<char> vertex_alive_;
  std::vector<char> edge_alive_;
  std::vector<char> face_alive_;
  Index live_vertices_ = 0;
  Index live_edges_ = 0;
  Index live_faces_ = 0;
  std::vector<Index> free_vertices_;
  std::vector<Index> free_edges_;
  std::vector<Index> free_faces_;
};

/// Builds a mesh from raw arrays, rejecting non-manifold or inconsistently
/// oriented input. Vertex handles follow input order; edge handles follow
/// first encounter while scanning faces in order.
Mesh build_mesh(const std::vector<Vec3>& positions,
                const std::vector<std::array<Index, 3>>& triangles);

/// Geometry of the triangle (a, b, c); degenerate triangles get a clamped
/// area (relative floor 1e-12 of the squared-edge sum) so the circumcenter
/// and weights stay finite.
FaceGeometry triangle_geometry(const Vec3& a, const Vec3& b, const Vec3& c);

/// Throws DegenerateFace when the (unclamped) area is at or below the floor.
FaceGeometry face_geometry(const Mesh& mesh, Index f);

/// Signed hinge angle of an interior edge: 0 when coplanar, positive when the
/// wings fold toward the face normals.
Real dihedral_angle(const Mesh& mesh, Index e);

/// Area-weighted average of incident face normals, normalized.
Vec3 vertex_normal(const Mesh& mesh, Index v);

struct BoundaryFlags {
  std::vector<char> vertex;  // indexed by slot
  std::vector<char> edge;
  std::vector<char> face;
};

BoundaryFlags boundary_classification(const Mesh& mesh);

}  // namespace cabbage
