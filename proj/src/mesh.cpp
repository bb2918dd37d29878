#include "cabbage/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace cabbage {

namespace {

std::string describe(const char* what, Index id) {
  std::ostringstream os;
  os << what << " " << id;
  return os.str();
}

}  // namespace

void Mesh::check_vertex(Index v, const char* op) const {
  if (!vertex_alive(v)) throw Error(ErrorCode::DeadHandle, describe(op, v));
}

void Mesh::check_edge(Index e, const char* op) const {
  if (!edge_alive(e)) throw Error(ErrorCode::DeadHandle, describe(op, e));
}

bool Mesh::is_boundary_face(Index f) const {
  for (Index v : face_vertices(f))
    if (is_boundary_vertex(v)) return true;
  return false;
}

std::array<Index, 3> Mesh::face_vertices(Index f) const {
  Index h = face_he_[f];
  return {origin(h), origin(next(h)), origin(prev(h))};
}

std::vector<Index> Mesh::outgoing_halfedges(Index v) const {
  std::vector<Index> out;
  Index start = vertex_he_[v];
  Index h = start;
  do {
    out.push_back(h);
    h = next(twin(h));
  } while (h != start);
  return out;
}

std::vector<Index> Mesh::vertex_neighbors(Index v) const {
  std::vector<Index> nbrs;
  for (Index h : outgoing_halfedges(v)) nbrs.push_back(dest(h));
  return nbrs;
}

std::vector<Index> Mesh::vertex_faces(Index v) const {
  std::vector<Index> faces;
  for (Index h : outgoing_halfedges(v))
    if (face(h) != kInvalid) faces.push_back(face(h));
  return faces;
}

Index Mesh::valence(Index v) const {
  Index n = 0;
  Index start = vertex_he_[v];
  Index h = start;
  do {
    ++n;
    h = next(twin(h));
  } while (h != start);
  return n;
}

Index Mesh::new_vertex(const Vec3& p) {
  positions_.push_back(p);
  vertex_he_.push_back(kInvalid);
  vertex_alive_.push_back(1);
  ++live_vertices_;
  return vertex_slots() - 1;
}

Index Mesh::new_edge() {
  he_.push_back({});
  he_.push_back({});
  edge_alive_.push_back(1);
  ++live_edges_;
  return edge_slots() - 1;
}

Index Mesh::new_face() {
  face_he_.push_back(kInvalid);
  face_alive_.push_back(1);
  ++live_faces_;
  return face_slots() - 1;
}

void Mesh::kill_vertex(Index v) {
  vertex_alive_[v] = 0;
  vertex_he_[v] = kInvalid;
  free_vertices_.push_back(v);
  --live_vertices_;
}

void Mesh::kill_edge(Index e) {
  edge_alive_[e] = 0;
  free_edges_.push_back(e);
  --live_edges_;
}

void Mesh::kill_face(Index f) {
  face_alive_[f] = 0;
  face_he_[f] = kInvalid;
  free_faces_.push_back(f);
  --live_faces_;
}

void Mesh::fix_vertex_halfedge(Index v, Index start) {
  vertex_he_[v] = start;
  Index h = start;
  do {
    if (face(h) == kInvalid) {
      vertex_he_[v] = h;
      return;
    }
    h = next(twin(h));
  } while (h != start);
}

// ---------------------------------------------------------------------------
// build_mesh
// ---------------------------------------------------------------------------

Mesh build_mesh(const std::vector<Vec3>& positions,
                const std::vector<std::array<Index, 3>>& triangles) {
  Mesh m;
  const Index nv = static_cast<Index>(positions.size());
  m.positions_ = positions;
  m.vertex_he_.assign(nv, kInvalid);
  m.vertex_alive_.assign(nv, 1);
  m.live_vertices_ = nv;

  std::set<std::array<Index, 3>> seen_faces;
  for (const auto& t : triangles) {
    for (Index idx : t)
      if (idx < 0 || idx >= nv)
        throw Error(ErrorCode::DanglingIndex, describe("face references vertex", idx));
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw Error(ErrorCode::DanglingIndex, "face lists a vertex twice");
    std::array<Index, 3> key = t;
    std::sort(key.begin(), key.end());
    if (!seen_faces.insert(key).second)
      throw Error(ErrorCode::NonManifoldInput, "duplicate face");
  }

  // Allocate one edge slot per undirected pair, first encounter in face order.
  std::map<std::pair<Index, Index>, Index> edge_slot;
  auto undirected = [](Index a, Index b) { return std::make_pair(std::min(a, b), std::max(a, b)); };

  for (std::size_t fi = 0; fi < triangles.size(); ++fi) {
    const auto& t = triangles[fi];
    Index f = m.new_face();
    std::array<Index, 3> hs;
    for (int k = 0; k < 3; ++k) {
      Index u = t[k], v = t[(k + 1) % 3];
      auto key = undirected(u, v);
      auto it = edge_slot.find(key);
      if (it == edge_slot.end()) {
        Index e = m.new_edge();
        edge_slot.emplace(key, e);
        m.he_[2 * e].origin = u;
        m.he_[2 * e].face = f;
        m.he_[2 * e + 1].origin = v;  // twin stays boundary until claimed
        hs[k] = 2 * e;
      } else {
        Index e = it->second;
        if (m.he_[2 * e + 1].face != kInvalid)
          throw Error(ErrorCode::NonManifoldInput, "edge shared by three faces");
        if (m.he_[2 * e].origin == u)
          throw Error(ErrorCode::InconsistentOrientation, "edge traversed twice in one direction");
        m.he_[2 * e + 1].face = f;
        hs[k] = 2 * e + 1;
      }
    }
    for (int k = 0; k < 3; ++k) {
      m.he_[hs[k]].next = hs[(k + 1) % 3];
      m.he_[hs[k]].prev = hs[(k + 2) % 3];
    }
    m.face_he_[f] = hs[0];
    for (int k = 0; k < 3; ++k)
      if (m.vertex_he_[t[k]] == kInvalid) m.vertex_he_[t[k]] = hs[k];
  }

  if (std::size_t(m.edge_slots()) * 2 != m.he_.size())
    throw Error(ErrorCode::NonManifoldInput, "internal edge bookkeeping");

  // Link boundary loops: exactly one outgoing boundary half-edge per boundary
  // vertex on a manifold mesh.
  std::map<Index, Index> boundary_out;
  for (Index h = 0; h < static_cast<Index>(m.he_.size()); ++h) {
    if (m.he_[h].face != kInvalid) continue;
    if (m.he_[h].origin == kInvalid)
      throw Error(ErrorCode::NonManifoldInput, "unclaimed half-edge");
    if (!boundary_out.emplace(m.he_[h].origin, h).second)
      throw Error(ErrorCode::NonManifoldInput,
                  describe("boundary bowtie at vertex", m.he_[h].origin));
  }
  for (auto [v, h] : boundary_out) {
    Index d = m.dest(h);
    auto it = boundary_out.find(d);
    if (it == boundary_out.end())
      throw Error(ErrorCode::NonManifoldInput, describe("open boundary at vertex", d));
    m.he_[h].next = it->second;
    m.he_[it->second].prev = h;
    m.vertex_he_[v] = h;  // boundary convention
  }

  for (Index v = 0; v < nv; ++v)
    if (m.vertex_he_[v] == kInvalid)
      throw Error(ErrorCode::DanglingIndex, describe("isolated vertex", v));

  // Single-fan (umbrella) check: circulation must reach every outgoing
  // half-edge of each vertex.
  std::vector<Index> degree(nv, 0);
  for (const auto& he : m.he_) ++degree[he.origin];
  for (Index v = 0; v < nv; ++v) {
    Index reached = 0;
    Index start = m.vertex_he_[v];
    Index h = start;
    do {
      ++reached;
      if (reached > degree[v] + 1)
        throw Error(ErrorCode::NonManifoldInput, describe("broken fan at vertex", v));
      h = m.next(Mesh::twin(h));
    } while (h != start);
    if (reached != degree[v])
      throw Error(ErrorCode::NonManifoldInput, describe("multiple fans at vertex", v));
  }
  return m;
}

// ---------------------------------------------------------------------------
// split_edge
// ---------------------------------------------------------------------------

Index Mesh::split_edge(Index e, const Vec3& position) {
  check_edge(e, "split_edge: dead edge");
  Index h0 = 2 * e, h1 = h0 ^ 1;
  if (face(h0) == kInvalid) std::swap(h0, h1);
  const bool interior = face(h1) != kInvalid;

  const Index x0 = origin(h0), x1 = origin(h1);
  const Index F0 = face(h0);
  const Index a1 = next(h0), a2 = prev(h0);
  const Index x2 = origin(a2);
  const Index mv = new_vertex(position);

  if (interior) {
    const Index F1 = face(h1);
    const Index b1 = next(h1), b2 = prev(h1);
    const Index x3 = origin(b2);
    const Index hb0 = 2 * new_edge(), hb1 = hb0 + 1;
    const Index hc0 = 2 * new_edge(), hc1 = hc0 + 1;
    const Index hd0 = 2 * new_edge(), hd1 = hd0 + 1;
    const Index Fa = new_face(), Fb = new_face();

    set_he(h0, x0, F0, hc0, a2);   // x0 -> m
    set_he(hc0, mv, F0, a2, h0);   // m -> x2
    set_he(a2, x2, F0, h0, hc0);   // x2 -> x0

    set_he(hb0, mv, Fa, a1, hc1);  // m -> x1
    set_he(a1, x1, Fa, hc1, hb0);  // x1 -> x2
    set_he(hc1, x2, Fa, hb0, a1);  // x2 -> m

    set_he(hb1, x1, F1, hd0, b2);  // x1 -> m
    set_he(hd0, mv, F1, b2, hb1);  // m -> x3
    set_he(b2, x3, F1, hb1, hd0);  // x3 -> x1

    set_he(h1, mv, Fb, b1, hd1);   // m -> x0
    set_he(b1, x0, Fb, hd1, h1);   // x0 -> x3
    set_he(hd1, x3, Fb, h1, b1);   // x3 -> m

    face_he_[F0] = h0;
    face_he_[Fa] = hb0;
    face_he_[F1] = hb1;
    face_he_[Fb] = h1;
    vertex_he_[mv] = hb0;
    if (vertex_he_[x1] == h1) vertex_he_[x1] = hb1;
  } else {
    const Index bn = next(h1);  // boundary successor, origin x0
    const Index bp = prev(h1);  // boundary predecessor, ends at x1
    const Index hb0 = 2 * new_edge(), hb1 = hb0 + 1;
    const Index hc0 = 2 * new_edge(), hc1 = hc0 + 1;
    const Index Fa = new_face();

    set_he(h0, x0, F0, hc0, a2);
    set_he(hc0, mv, F0, a2, h0);
    set_he(a2, x2, F0, h0, hc0);

    set_he(hb0, mv, Fa, a1, hc1);
    set_he(a1, x1, Fa, hc1, hb0);
    set_he(hc1, x2, Fa, hb0, a1);

    // Boundary loop: bp -> (x1->m) -> (m->x0) -> bn.
    set_he(hb1, x1, kInvalid, h1, bp);
    set_he(h1, mv, kInvalid, bn, hb1);
    he_[bp].next = hb1;
    he_[bn].prev = h1;

    face_he_[F0] = h0;
    face_he_[Fa] = hb0;
    vertex_he_[mv] = h1;
    if (vertex_he_[x1] == h1) vertex_he_[x1] = hb1;
  }
  return mv;
}

// ---------------------------------------------------------------------------
// flip_edge
// ---------------------------------------------------------------------------

FlipStatus Mesh::flip_edge(Index e) {
  check_edge(e, "flip_edge: dead edge");
  const Index h0 = 2 * e, h1 = h0 ^ 1;
  if (face(h0) == kInvalid || face(h1) == kInvalid) return FlipStatus::BoundaryEdge;

  const Index F0 = face(h0), F1 = face(h1);
  const Index a1 = next(h0), a2 = prev(h0);
  const Index b1 = next(h1), b2 = prev(h1);
  const Index x0 = origin(h0), x1 = origin(h1);
  const Index x2 = origin(a2), x3 = origin(b2);

  // Refuse when the new diagonal already exists (folded configurations).
  for (Index n : vertex_neighbors(x2))
    if (n == x3) return FlipStatus::NonConvexQuad;

  // Strict convexity of the quad (x0, x3, x1, x2) around the mean normal.
  const Vec3& p0 = positions_[x0];
  const Vec3& p1 = positions_[x1];
  const Vec3& p2 = positions_[x2];
  const Vec3& p3 = positions_[x3];
  const Vec3 nA = (p1 - p0).cross(p2 - p0);
  const Vec3 nB = (p0 - p1).cross(p3 - p1);
  const Vec3 n = nA + nB;
  const std::array<Vec3, 4> quad = {p0, p3, p1, p2};
  for (int k = 0; k < 4; ++k) {
    const Vec3 u = quad[(k + 1) % 4] - quad[k];
    const Vec3 v = quad[(k + 2) % 4] - quad[(k + 1) % 4];
    if (u.cross(v).dot(n) <= 0) return FlipStatus::NonConvexQuad;
  }

  // F0' = (x2 -> x3 [h0], x3 -> x1 [b2], x1 -> x2 [a1])
  set_he(h0, x2, F0, b2, a1);
  set_he(b2, x3, F0, a1, h0);
  set_he(a1, x1, F0, h0, b2);
  // F1' = (x3 -> x2 [h1], x2 -> x0 [a2], x0 -> x3 [b1])
  set_he(h1, x3, F1, a2, b1);
  set_he(a2, x2, F1, b1, h1);
  set_he(b1, x0, F1, h1, a2);

  face_he_[F0] = h0;
  face_he_[F1] = h1;
  if (vertex_he_[x0] == h0) vertex_he_[x0] = b1;
  if (vertex_he_[x1] == h1) vertex_he_[x1] = a1;
  return FlipStatus::Flipped;
}

// ---------------------------------------------------------------------------
// collapse_edge
// ---------------------------------------------------------------------------

CollapseResult Mesh::collapse_edge(Index e) {
  check_edge(e, "collapse_edge: dead edge");
  const Index h0 = 2 * e, h1 = h0 ^ 1;
  const Index a = origin(h0), b = origin(h1);
  const bool a_bnd = is_boundary_vertex(a);
  const bool b_bnd = is_boundary_vertex(b);
  const bool e_bnd = is_boundary_edge(e);

  const Index F0 = face(h0), F1 = face(h1);
  Index n0 = kInvalid, p0 = kInvalid, c = kInvalid;
  Index n1 = kInvalid, p1 = kInvalid, d = kInvalid;
  if (F0 != kInvalid) {
    n0 = next(h0);
    p0 = prev(h0);
    c = origin(p0);
  }
  if (F1 != kInvalid) {
    n1 = next(h1);
    p1 = prev(h1);
    d = origin(p1);
  }

  // Link condition: shared neighbors of a and b are exactly the hinge
  // opposites; anything else would weld two faces onto each other.
  const std::vector<Index> na = vertex_neighbors(a);
  const std::vector<Index> nb = vertex_neighbors(b);
  for (Index x : na) {
    if (x == b || x == c || x == d) continue;
    for (Index y : nb)
      if (y == x) return {CollapseStatus::LinkConditionViolation};
  }
  // Edge-level link condition: if faces {a,c,d} and {b,c,d} both exist the
  // collapse would produce a duplicate face pair (tetrahedron case).
  if (c != kInvalid && d != kInvalid) {
    auto has_face_with = [&](Index center) {
      for (Index h : outgoing_halfedges(center)) {
        const Index f = face(h);
        if (f == kInvalid) continue;
        const auto fv = face_vertices(f);
        bool has_c = false, has_d = false;
        for (Index v : fv) {
          has_c |= v == c;
          has_d |= v == d;
        }
        if (has_c && has_d) return true;
      }
      return false;
    };
    if (has_face_with(a) && has_face_with(b)) return {CollapseStatus::LinkConditionViolation};
  }

  if (a_bnd && b_bnd && !e_bnd) return {CollapseStatus::WouldBreakBoundary};

  // Refuse collapses whose merged side edges would end up with no face at
  // all (lone-triangle components and similar).
  if (F0 != kInvalid && face(twin(n0)) == kInvalid && face(twin(p0)) == kInvalid)
    return {CollapseStatus::WouldBreakBoundary};
  if (F1 != kInvalid && face(twin(n1)) == kInvalid && face(twin(p1)) == kInvalid)
    return {CollapseStatus::WouldBreakBoundary};

  Vec3 pos;
  if (a_bnd == b_bnd)
    pos = (positions_[a] + positions_[b]) * Real(0.5);
  else
    pos = a_bnd ? positions_[a] : positions_[b];

  // Fold-over guard: surviving faces must keep their orientation under the
  // merged position.
  for (Index v : {a, b}) {
    for (Index h : outgoing_halfedges(v)) {
      const Index f = face(h);
      if (f == kInvalid || f == F0 || f == F1) continue;
      std::array<Vec3, 3> q;
      int k = 0;
      for (Index fv : face_vertices(f)) q[k++] = (fv == a || fv == b) ? pos : positions_[fv];
      const auto [v0, v1, v2] = face_vertices(f);
      const Vec3 n_old = (positions_[v1] - positions_[v0]).cross(positions_[v2] - positions_[v0]);
      const Vec3 n_new = (q[1] - q[0]).cross(q[2] - q[0]);
      const Real scale = (q[1] - q[0]).squaredNorm() + (q[2] - q[0]).squaredNorm() +
                         (q[2] - q[1]).squaredNorm();
      if (n_new.norm() <= Real(1e-12) * scale || n_old.dot(n_new) <= 0)
        return {CollapseStatus::FoldOver};
    }
  }

  // --- commit ---
  for (Index h : outgoing_halfedges(b)) he_[h].origin = a;

  if (F0 == kInvalid) {  // h0 lies on a boundary loop
    he_[prev(h0)].next = next(h0);
    he_[next(h0)].prev = prev(h0);
  }
  if (F1 == kInvalid) {
    he_[prev(h1)].next = next(h1);
    he_[next(h1)].prev = prev(h1);
  }

  if (F0 != kInvalid) {
    const Index donor = twin(n0);  // (c -> b) side; p0 (c -> a) absorbs it
    he_[p0].face = face(donor);
    he_[p0].next = next(donor);
    he_[p0].prev = prev(donor);
    he_[next(donor)].prev = p0;
    he_[prev(donor)].next = p0;
    if (he_[p0].face != kInvalid) face_he_[he_[p0].face] = p0;
    kill_edge(edge_of(n0));
    kill_face(F0);
  }
  if (F1 != kInvalid) {
    const Index donor = twin(p1);  // (b -> d) side; n1 (a -> d) absorbs it
    he_[n1].face = face(donor);
    he_[n1].next = next(donor);
    he_[n1].prev = prev(donor);
    he_[next(donor)].prev = n1;
    he_[prev(donor)].next = n1;
    if (he_[n1].face != kInvalid) face_he_[he_[n1].face] = n1;
    kill_edge(edge_of(p1));
    kill_face(F1);
  }

  kill_edge(e);
  kill_vertex(b);
  positions_[a] = pos;

  fix_vertex_halfedge(a, F0 != kInvalid ? twin(p0) : n1);
  if (c != kInvalid) fix_vertex_halfedge(c, p0);
  if (d != kInvalid) fix_vertex_halfedge(d, twin(n1));
  return {CollapseStatus::Collapsed, a};
}

// ---------------------------------------------------------------------------
// remove_vertex (ear tip)
// ---------------------------------------------------------------------------

EarStatus Mesh::remove_vertex(Index v) {
  check_vertex(v, "remove_vertex: dead vertex");
  const std::vector<Index> outs = outgoing_halfedges(v);
  if (outs.size() != 2) return EarStatus::NotAnEarTip;

  Index hv = kInvalid;
  for (Index h : outs)
    if (face(h) != kInvalid) hv = h;
  if (hv == kInvalid) return EarStatus::NotAnEarTip;  // cannot happen on a valid mesh

  const Index F = face(hv);
  const Index hm = next(hv);   // w1 -> w2
  const Index hw = next(hm);   // w2 -> v
  const Index w1 = origin(hm);
  const Index w2 = origin(hw);
  if (face(twin(hm)) == kInvalid) return EarStatus::LastFace;

  const Index P = prev(twin(hv));  // boundary into w1
  const Index N = next(twin(hw));  // boundary out of w2

  he_[hm].face = kInvalid;
  he_[hm].next = N;
  he_[hm].prev = P;
  he_[P].next = hm;
  he_[N].prev = hm;

  kill_edge(edge_of(hv));
  kill_edge(edge_of(hw));
  kill_face(F);
  kill_vertex(v);

  vertex_he_[w1] = hm;
  vertex_he_[w2] = N;
  return EarStatus::Removed;
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

std::vector<std::string> Mesh::validate() const {
  std::vector<std::string> issues;
  auto complain = [&](const std::string& s) { issues.push_back(s); };

  Index lv = 0, le = 0, lf = 0;
  for (char x : vertex_alive_) lv += x;
  for (char x : edge_alive_) le += x;
  for (char x : face_alive_) lf += x;
  if (lv != live_vertices_) complain("vertex count mismatch");
  if (le != live_edges_) complain("edge count mismatch");
  if (lf != live_faces_) complain("face count mismatch");

  auto he_alive = [&](Index h) { return h >= 0 && h < 2 * edge_slots() && edge_alive_[h >> 1]; };

  for (Index e = 0; e < edge_slots(); ++e) {
    if (!edge_alive_[e]) continue;
    for (int s = 0; s < 2; ++s) {
      Index h = 2 * e + s;
      const auto& r = he_[h];
      if (!vertex_alive(r.origin)) complain(describe("half-edge with dead origin", h));
      if (!he_alive(r.next) || !he_alive(r.prev)) {
        complain(describe("half-edge with dead link", h));
        continue;
      }
      if (he_[r.next].prev != h || he_[r.prev].next != h)
        complain(describe("next/prev mismatch at half-edge", h));
      if (r.face != kInvalid && !face_alive(r.face))
        complain(describe("half-edge with dead face", h));
      if (he_[h ^ 1].origin == r.origin) complain(describe("degenerate edge", e));
    }
    if (he_[2 * e].face == kInvalid && he_[2 * e + 1].face == kInvalid)
      complain(describe("edge without any face", e));
  }

  std::set<std::array<Index, 3>> face_keys;
  for (Index f = 0; f < face_slots(); ++f) {
    if (!face_alive_[f]) continue;
    Index h = face_he_[f];
    if (!he_alive(h)) {
      complain(describe("face with dead half-edge", f));
      continue;
    }
    Index h1 = he_[h].next, h2 = he_[h1].next;
    if (he_[h2].next != h) complain(describe("face cycle is not length 3 at face", f));
    if (he_[h].face != f || he_[h1].face != f || he_[h2].face != f)
      complain(describe("face cycle with wrong face tag", f));
    std::array<Index, 3> key = {he_[h].origin, he_[h1].origin, he_[h2].origin};
    if (key[0] == key[1] || key[1] == key[2] || key[0] == key[2])
      complain(describe("face repeats a vertex", f));
    std::sort(key.begin(), key.end());
    if (!face_keys.insert(key).second) complain(describe("duplicate face", f));
  }

  // Boundary loops close and stay on the boundary.
  std::set<Index> boundary_seen;
  for (Index e = 0; e < edge_slots(); ++e) {
    if (!edge_alive_[e]) continue;
    for (int s = 0; s < 2; ++s) {
      Index h = 2 * e + s;
      if (he_[h].face != kInvalid || boundary_seen.count(h)) continue;
      Index k = h;
      Index steps = 0;
      do {
        if (he_[k].face != kInvalid) {
          complain(describe("boundary loop enters a face at half-edge", k));
          break;
        }
        boundary_seen.insert(k);
        k = he_[k].next;
        if (++steps > 2 * edge_slots()) {
          complain("unterminated boundary loop");
          break;
        }
      } while (k != h);
    }
  }

  // Vertex stars: stored half-edge outgoing and alive, boundary convention,
  // single fan.
  std::vector<Index> degree(vertex_slots(), 0);
  for (Index e = 0; e < edge_slots(); ++e) {
    if (!edge_alive_[e]) continue;
    ++degree[he_[2 * e].origin];
    ++degree[he_[2 * e + 1].origin];
  }
  for (Index v = 0; v < vertex_slots(); ++v) {
    if (!vertex_alive_[v]) continue;
    Index start = vertex_he_[v];
    if (!he_alive(start) || he_[start].origin != v) {
      complain(describe("bad stored half-edge at vertex", v));
      continue;
    }
    if (degree[v] == 0) {
      complain(describe("isolated vertex", v));
      continue;
    }
    Index reached = 0;
    bool has_boundary_out = false;
    bool closed = true;
    Index h = start;
    do {
      if (!he_alive(h) || he_[h].origin != v) {
        complain(describe("star walk left vertex", v));
        closed = false;
        break;
      }
      if (he_[h].face == kInvalid) has_boundary_out = true;
      ++reached;
      if (reached > degree[v]) {
        complain(describe("fan walk does not close at vertex", v));
        closed = false;
        break;
      }
      h = he_[h ^ 1].next;
    } while (h != start);
    if (closed && reached != degree[v]) complain(describe("multiple fans at vertex", v));
    if (has_boundary_out && he_[start].face != kInvalid)
      complain(describe("boundary vertex stores interior half-edge", v));
  }

  for (const auto& p : positions_)
    if (!p.allFinite()) {
      complain("non-finite vertex position");
      break;
    }

  return issues;
}

// ---------------------------------------------------------------------------
// geometry queries
// ---------------------------------------------------------------------------

FaceGeometry triangle_geometry(const Vec3& a, const Vec3& b, const Vec3& c) {
  FaceGeometry g;
  const Vec3 u = b - a, v = c - a, w = c - b;
  const Vec3 cr = u.cross(v);  // norm = 2A
  const Real cr_norm = cr.norm();
  const Real sq_sum = u.squaredNorm() + v.squaredNorm() + w.squaredNorm();
  g.barycenter = (a + b + c) / Real(3);
  g.area = Real(0.5) * cr_norm;
  g.normal = cr_norm > 0 ? Vec3(cr / cr_norm) : Vec3::Zero();
  g.quality = sq_sum > 0 ? Real(4) * std::sqrt(Real(3)) * g.area / sq_sum : Real(0);

  // Degenerate faces get an area floor so circumcenter and radius stay
  // finite for weighting purposes.
  const Real area_floor = std::max(Real(1e-12) * sq_sum, Real(1e-300));
  const Real area_c = std::max(g.area, area_floor);
  const Real cr2_c = std::max(cr.squaredNorm(), Real(4) * area_floor * area_floor);
  g.circumcenter =
      a + (u.squaredNorm() * v.cross(cr) + v.squaredNorm() * cr.cross(u)) / (Real(2) * cr2_c);
  g.circumradius = u.norm() * v.norm() * w.norm() / (Real(4) * area_c);
  return g;
}

FaceGeometry face_geometry(const Mesh& mesh, Index f) {
  if (!mesh.face_alive(f)) throw Error(ErrorCode::DeadHandle, describe("face_geometry", f));
  const auto [i, j, k] = mesh.face_vertices(f);
  const Vec3 &a = mesh.position(i), &b = mesh.position(j), &c = mesh.position(k);
  const Real sq_sum =
      (b - a).squaredNorm() + (c - a).squaredNorm() + (c - b).squaredNorm();
  const Real area = Real(0.5) * (b - a).cross(c - a).norm();
  if (area <= Real(1e-12) * sq_sum)
    throw Error(ErrorCode::DegenerateFace, describe("face_geometry: degenerate face", f));
  return triangle_geometry(a, b, c);
}

Real dihedral_angle(const Mesh& mesh, Index e) {
  if (!mesh.edge_alive(e)) throw Error(ErrorCode::DeadHandle, describe("dihedral_angle", e));
  if (mesh.is_boundary_edge(e))
    throw Error(ErrorCode::BoundaryEdge, describe("dihedral_angle: boundary edge", e));
  const Index h0 = 2 * e, h1 = h0 ^ 1;
  const Vec3& x0 = mesh.position(mesh.origin(h0));
  const Vec3& x1 = mesh.position(mesh.origin(h1));
  const Vec3& x2 = mesh.position(mesh.origin(mesh.prev(h0)));
  const Vec3& x3 = mesh.position(mesh.origin(mesh.prev(h1)));
  const Vec3 nA = (x1 - x0).cross(x2 - x0).normalized();
  const Vec3 nB = (x0 - x1).cross(x3 - x1).normalized();
  const Vec3 eu = (x1 - x0).normalized();
  return std::atan2(nB.cross(nA).dot(eu), nA.dot(nB));
}

Vec3 vertex_normal(const Mesh& mesh, Index v) {
  if (!mesh.vertex_alive(v)) throw Error(ErrorCode::DeadHandle, describe("vertex_normal", v));
  Vec3 n = Vec3::Zero();
  bool any = false;
  for (Index h : mesh.outgoing_halfedges(v)) {
    const Index f = mesh.face(h);
    if (f == kInvalid) continue;
    any = true;
    const auto [i, j, k] = mesh.face_vertices(f);
    n += (mesh.position(j) - mesh.position(i)).cross(mesh.position(k) - mesh.position(i));
  }
  if (!any) throw Error(ErrorCode::IsolatedVertex, describe("vertex_normal", v));
  const Real len = n.norm();
  return len > 0 ? Vec3(n / len) : Vec3::UnitZ();
}

BoundaryFlags boundary_classification(const Mesh& mesh) {
  BoundaryFlags flags;
  flags.vertex.assign(mesh.vertex_slots(), 0);
  flags.edge.assign(mesh.edge_slots(), 0);
  flags.face.assign(mesh.face_slots(), 0);
  for (Index e = 0; e < mesh.edge_slots(); ++e) {
    if (!mesh.edge_alive(e)) continue;
    if (mesh.is_boundary_edge(e)) {
      flags.edge[e] = 1;
      for (Index v : mesh.edge_vertices(e)) flags.vertex[v] = 1;
    }
  }
  for (Index f = 0; f < mesh.face_slots(); ++f) {
    if (!mesh.face_alive(f)) continue;
    for (Index v : mesh.face_vertices(f))
      if (flags.vertex[v]) flags.face[f] = 1;
  }
  return flags;
}

}  // namespace cabbage
