#include "cabbage/io.hpp"

#include "cabbage/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace cabbage {

namespace {

constexpr Real kTau = 2 * std::numbers::pi_v<Real>;

/// Stitches two concentric vertex rings (inner first) into a triangle band.
/// Ring vertices are assumed uniformly spaced in angle starting at zero.
void stitch_rings(std::vector<std::array<Index, 3>>& faces, const std::vector<Index>& inner,
                  const std::vector<Index>& outer) {
  const Index na = static_cast<Index>(inner.size());
  const Index nb = static_cast<Index>(outer.size());
  Index a = 0, b = 0;
  while (a < na || b < nb) {
    const Real next_a = static_cast<Real>(a + 1) / na;
    const Real next_b = static_cast<Real>(b + 1) / nb;
    if (a < na && (b >= nb || next_a <= next_b)) {
      faces.push_back({inner[a % na], outer[b % nb], inner[(a + 1) % na]});
      ++a;
    } else {
      faces.push_back({outer[b % nb], outer[(b + 1) % nb], inner[a % na]});
      ++b;
    }
  }
}

void perturb_along_normals(Mesh& mesh, Real amplitude, std::uint64_t seed) {
  if (amplitude == 0) return;
  Real mean_edge = 0;
  Index n = 0;
  for (Index e = 0; e < mesh.edge_slots(); ++e)
    if (mesh.edge_alive(e)) {
      mean_edge += mesh.edge_length(e);
      ++n;
    }
  mean_edge /= std::max<Index>(n, 1);
  Rng rng(seed);
  for (Index v = 0; v < mesh.vertex_slots(); ++v) {
    if (!mesh.vertex_alive(v)) continue;
    const Vec3 normal = vertex_normal(mesh, v);
    mesh.set_position(v, mesh.position(v) +
                             amplitude * mean_edge * rng.uniform(-1, 1) * normal);
  }
}

Mesh generate_disk(const GeneratorSpec& spec) {
  if (spec.radial < 1 || spec.angular < 3 || spec.radius <= 0)
    throw Error(ErrorCode::InvalidSpec, "disk needs radial >= 1, angular >= 3, radius > 0");
  std::vector<Vec3> pos;
  std::vector<std::array<Index, 3>> faces;
  pos.emplace_back(0, 0, 0);
  std::vector<Index> prev_ring;
  for (Index i = 1; i <= spec.radial; ++i) {
    const Real rho = spec.radius * i / spec.radial;
    const Index count = std::max<Index>(
        3, static_cast<Index>(std::lround(static_cast<Real>(spec.angular) * i / spec.radial)));
    std::vector<Index> ring;
    for (Index k = 0; k < count; ++k) {
      const Real ang = kTau * k / count;
      ring.push_back(static_cast<Index>(pos.size()));
      pos.emplace_back(rho * std::cos(ang), rho * std::sin(ang), 0);
    }
    if (i == 1) {
      for (Index k = 0; k < count; ++k) faces.push_back({0, ring[k], ring[(k + 1) % count]});
    } else {
      stitch_rings(faces, prev_ring, ring);
    }
    prev_ring = std::move(ring);
  }
  return build_mesh(pos, faces);
}

Mesh generate_annulus(const GeneratorSpec& spec) {
  if (spec.radial < 1 || spec.angular < 3 || spec.inner_radius <= 0 ||
      spec.inner_radius >= spec.outer_radius)
    throw Error(ErrorCode::InvalidSpec, "annulus needs 0 < inner < outer and radial/angular >= 1/3");
  std::vector<Vec3> pos;
  std::vector<std::array<Index, 3>> faces;
  std::vector<Index> prev_ring;
  for (Index i = 0; i <= spec.radial; ++i) {
    const Real rho =
        spec.inner_radius + (spec.outer_radius - spec.inner_radius) * i / spec.radial;
    const Index count = std::max<Index>(
        3, static_cast<Index>(std::lround(static_cast<Real>(spec.angular) * rho /
                                          spec.outer_radius)));
    std::vector<Index> ring;
    for (Index k = 0; k < count; ++k) {
      const Real ang = kTau * k / count;
      ring.push_back(static_cast<Index>(pos.size()));
      pos.emplace_back(rho * std::cos(ang), rho * std::sin(ang), 0);
    }
    if (i > 0) stitch_rings(faces, prev_ring, ring);
    prev_ring = std::move(ring);
  }
  return build_mesh(pos, faces);
}

Mesh generate_moebius_like(const GeneratorSpec& spec) {
  if (spec.radial < 2 || spec.angular < 8 || spec.ring_radius <= 0 || spec.strip_width <= 0 ||
      spec.strip_width >= 2 * spec.ring_radius)
    throw Error(ErrorCode::InvalidSpec, "moebius-like needs radial >= 2, angular >= 8");
  const Index across = spec.radial;
  const Index along = spec.angular;
  std::vector<Vec3> pos;
  std::vector<std::array<Index, 3>> faces;
  // Columns 0..along inclusive: the last column coincides geometrically with
  // the first (mirrored by the half twist) but stays unconnected, forming the
  // seam of an orientable stand-in for the true band.
  auto at = [&](Index k, Index j) { return k * across + j; };
  for (Index k = 0; k <= along; ++k) {
    const Real u = kTau * k / along;
    for (Index j = 0; j < across; ++j) {
      const Real v = -spec.strip_width / 2 + spec.strip_width * j / (across - 1);
      const Real w = spec.ring_radius + v * std::cos(u / 2);
      pos.emplace_back(w * std::cos(u), w * std::sin(u), v * std::sin(u / 2));
    }
  }
  for (Index k = 0; k < along; ++k) {
    for (Index j = 0; j + 1 < across; ++j) {
      faces.push_back({at(k, j), at(k + 1, j), at(k + 1, j + 1)});
      faces.push_back({at(k, j), at(k + 1, j + 1), at(k, j + 1)});
    }
  }
  return build_mesh(pos, faces);
}

Mesh generate_punctured_torus(const GeneratorSpec& spec) {
  if (spec.radial < 6 || spec.tube_radius <= 0 || spec.tube_radius >= spec.ring_radius)
    throw Error(ErrorCode::InvalidSpec,
                "punctured-torus needs radial >= 6 and 0 < tube < ring radius");
  const Index minor = spec.radial;
  const Real h = kTau * spec.tube_radius / minor;  // target chord
  // Stacked major-direction rings with counts tracking the local radius keep
  // the chords near-uniform regardless of the tube proportions.
  std::vector<Vec3> pos;
  std::vector<std::vector<Index>> rings(minor);
  for (Index k = 0; k < minor; ++k) {
    const Real phi = kTau * k / minor;
    const Real w = spec.ring_radius + spec.tube_radius * std::cos(phi);
    const Index count = std::max<Index>(3, static_cast<Index>(std::lround(kTau * w / h)));
    for (Index i = 0; i < count; ++i) {
      const Real theta = kTau * i / count;
      rings[k].push_back(static_cast<Index>(pos.size()));
      pos.emplace_back(w * std::cos(theta), w * std::sin(theta),
                       spec.tube_radius * std::sin(phi));
    }
  }
  std::vector<std::array<Index, 3>> faces;
  for (Index k = 0; k < minor; ++k) stitch_rings(faces, rings[k], rings[(k + 1) % minor]);

  // Puncture: drop one outer-equator vertex and its star, leaving a
  // disk-shaped hole (chi goes from 0 to -1).
  const Index removed = rings[0][0];
  std::vector<Vec3> kept;
  std::vector<Index> remap(pos.size(), kInvalid);
  for (Index v = 0; v < static_cast<Index>(pos.size()); ++v) {
    if (v == removed) continue;
    remap[v] = static_cast<Index>(kept.size());
    kept.push_back(pos[v]);
  }
  std::vector<std::array<Index, 3>> kept_faces;
  for (const auto& f : faces) {
    if (f[0] == removed || f[1] == removed || f[2] == removed) continue;
    kept_faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
  }
  return build_mesh(kept, kept_faces);
}

}  // namespace

GeneratorSpec default_generator(GeneratorSpec::Kind kind, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  switch (kind) {
    case GeneratorSpec::Kind::Disk:
      spec.radial = 5;
      spec.angular = 30;
      spec.radius = 5.0;
      break;
    case GeneratorSpec::Kind::Annulus:
      spec.radial = 4;
      spec.angular = 36;
      spec.inner_radius = 2.0;
      spec.outer_radius = 4.0;
      break;
    case GeneratorSpec::Kind::MoebiusLike:
      spec.radial = 4;
      spec.angular = 40;
      spec.ring_radius = 3.0;
      spec.strip_width = 1.4;
      break;
    case GeneratorSpec::Kind::PuncturedTorus:
      spec.radial = 12;
      spec.angular = 36;  // informational; ring counts follow the local radius
      spec.ring_radius = 3.0;
      spec.tube_radius = 1.0;
      break;
  }
  return spec;
}

GeneratorSpec::Kind parse_generator_kind(const std::string& name) {
  if (name == "disk") return GeneratorSpec::Kind::Disk;
  if (name == "annulus") return GeneratorSpec::Kind::Annulus;
  if (name == "moebius-like") return GeneratorSpec::Kind::MoebiusLike;
  if (name == "punctured-torus") return GeneratorSpec::Kind::PuncturedTorus;
  throw Error(ErrorCode::InvalidSpec, "unknown generator kind: " + name);
}

Mesh generate_initial(const GeneratorSpec& spec) {
  Mesh mesh;
  switch (spec.kind) {
    case GeneratorSpec::Kind::Disk: mesh = generate_disk(spec); break;
    case GeneratorSpec::Kind::Annulus: mesh = generate_annulus(spec); break;
    case GeneratorSpec::Kind::MoebiusLike: mesh = generate_moebius_like(spec); break;
    case GeneratorSpec::Kind::PuncturedTorus: mesh = generate_punctured_torus(spec); break;
  }
  perturb_along_normals(mesh, spec.perturb, spec.seed);
  return mesh;
}

// ---------------------------------------------------------------------------
// OBJ
// ---------------------------------------------------------------------------

Mesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<Vec3> positions;
  std::vector<std::array<Index, 3>> triangles;
  std::string line;
  int line_no = 0;

  auto parse_error = [&](const std::string& what) {
    std::ostringstream os;
    os << path << ":" << line_no << ": " << what;
    return Error(ErrorCode::ParseError, os.str());
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag.empty() || tag[0] == '#') continue;
    if (tag == "v") {
      Real x, y, z;
      if (!(ls >> x >> y >> z)) throw parse_error("malformed vertex line");
      positions.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<Index> corners;
      std::string token;
      while (ls >> token) {
        const std::string head = token.substr(0, token.find('/'));
        char* end = nullptr;
        const long idx = std::strtol(head.c_str(), &end, 10);
        if (end == head.c_str() || *end != '\0' || idx < 1)
          throw parse_error("malformed face index '" + token + "'");
        corners.push_back(static_cast<Index>(idx - 1));
      }
      if (corners.size() < 3) throw parse_error("face needs at least three vertices");
      for (std::size_t k = 1; k + 1 < corners.size(); ++k)
        triangles.push_back({corners[0], corners[k], corners[k + 1]});
    }
  }
  return build_mesh(positions, triangles);
}

void save_obj(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  std::vector<Index> remap(mesh.vertex_slots(), kInvalid);
  Index next = 1;  // OBJ is 1-indexed
  char buf[128];
  for (Index v = 0; v < mesh.vertex_slots(); ++v) {
    if (!mesh.vertex_alive(v)) continue;
    remap[v] = next++;
    const Vec3& p = mesh.position(v);
    std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", p.x(), p.y(), p.z());
    out << buf;
  }
  for (Index f = 0; f < mesh.face_slots(); ++f) {
    if (!mesh.face_alive(f)) continue;
    const auto [a, b, c] = mesh.face_vertices(f);
    out << "f " << remap[a] << " " << remap[b] << " " << remap[c] << "\n";
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

Real parse_real(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const Real x = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw Error(ErrorCode::TypeError, key + ": expected a number, got '" + value + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long x = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0')
    throw Error(ErrorCode::TypeError, key + ": expected an integer, got '" + value + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(ErrorCode::TypeError, key + ": expected true/false, got '" + value + "'");
}

Vec3 parse_vec3(const std::string& key, const std::string& value) {
  std::istringstream ss(value);
  Real x, y, z;
  std::string rest;
  if (!(ss >> x >> y >> z) || (ss >> rest))
    throw Error(ErrorCode::TypeError, key + ": expected three numbers, got '" + value + "'");
  return Vec3(x, y, z);
}

SourcePolicy parse_policy(const std::string& value) {
  if (value == "all-boundary") return AllBoundaryPolicy{};
  if (value.rfind("explicit:", 0) == 0) {
    ExplicitPolicy policy;
    std::istringstream ss(value.substr(9));
    std::string item;
    while (std::getline(ss, item, ','))
      policy.vertices.push_back(static_cast<Index>(parse_int("source_policy", trim(item))));
    if (policy.vertices.empty())
      throw Error(ErrorCode::TypeError, "source_policy: explicit list is empty");
    return policy;
  }
  if (value.rfind("random-boundary:", 0) == 0) {
    RandomBoundaryPolicy policy;
    const std::string rest = value.substr(16);
    const auto colon = rest.find(':');
    policy.count = static_cast<Index>(
        parse_int("source_policy", colon == std::string::npos ? rest : rest.substr(0, colon)));
    if (colon != std::string::npos)
      policy.seed = static_cast<std::uint64_t>(parse_int("source_policy", rest.substr(colon + 1)));
    return policy;
  }
  throw Error(ErrorCode::TypeError, "source_policy: unknown policy '" + value + "'");
}

std::string policy_to_text(const SourcePolicy& policy) {
  if (std::holds_alternative<AllBoundaryPolicy>(policy)) return "all-boundary";
  if (const auto* e = std::get_if<ExplicitPolicy>(&policy)) {
    std::string out = "explicit:";
    for (std::size_t k = 0; k < e->vertices.size(); ++k) {
      if (k) out += ",";
      out += std::to_string(e->vertices[k]);
    }
    return out;
  }
  const auto& r = std::get<RandomBoundaryPolicy>(policy);
  return "random-boundary:" + std::to_string(r.count) + ":" + std::to_string(r.seed);
}

std::string real_to_text(Real x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string vec3_to_text(const Vec3& v) {
  return real_to_text(v.x()) + " " + real_to_text(v.y()) + " " + real_to_text(v.z());
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
  SimConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ParseError,
                  "config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "method") {
      if (value == "shell")
        config.method = Method::Shell;
      else if (value == "collision")
        config.method = Method::CollisionVariant;
      else
        throw Error(ErrorCode::TypeError, "method: expected shell|collision");
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "dt") {
      config.dt = parse_real(key, value);
    } else if (key == "max_steps") {
      config.max_steps = static_cast<Index>(parse_int(key, value));
    } else if (key == "max_vertices") {
      config.max_vertices = static_cast<Index>(parse_int(key, value));
    } else if (key == "export_every") {
      config.export_every = static_cast<Index>(parse_int(key, value));
    } else if (key == "growth_cutoff") {
      config.growth.cutoff = parse_real(key, value);
    } else if (key == "growth_steepness") {
      config.growth.steepness = parse_real(key, value);
    } else if (key == "growth_high_at_sources") {
      config.growth.high_at_sources = parse_bool(key, value);
    } else if (key == "source_policy") {
      config.sources = parse_policy(value);
    } else if (key == "split_k") {
      config.split_k = parse_real(key, value);
    } else if (key == "split_length_mode") {
      if (value == "rest-length")
        config.split_mode = SplitLengthMode::RestLength;
      else if (value == "self-length")
        config.split_mode = SplitLengthMode::SelfLength;
      else
        throw Error(ErrorCode::TypeError, "split_length_mode: expected rest-length|self-length");
    } else if (key == "collapse_threshold") {
      config.collapse_factor = parse_real(key, value);
    } else if (key == "stretch_stiffness") {
      config.stretch_stiffness = parse_real(key, value);
    } else if (key == "bending_kmin") {
      config.bending.k_min = parse_real(key, value);
    } else if (key == "bending_kmax") {
      config.bending.k_max = parse_real(key, value);
    } else if (key == "bending_ramp_steps") {
      config.bending.ramp_steps = static_cast<Index>(parse_int(key, value));
    } else if (key == "fairing_alpha") {
      config.fairing_alpha = parse_real(key, value);
    } else if (key == "fairing_beta") {
      config.fairing_beta = parse_real(key, value);
    } else if (key == "fairing_tolerance") {
      config.fairing_tolerance = parse_real(key, value);
    } else if (key == "collision_normal_factor") {
      config.collision_normal_factor = parse_real(key, value);
    } else if (key == "collision_tangent_factor") {
      config.collision_tangent_factor = parse_real(key, value);
    } else if (key == "collision_stiffness") {
      config.collision_stiffness = parse_real(key, value);
    } else if (key == "collision_lambda") {
      config.collision_lambda = parse_real(key, value);
    } else if (key == "collision_both_orders") {
      config.collision_both_orders = parse_bool(key, value);
    } else if (key == "growth_collision_stiffness") {
      config.growth_collision_stiffness = parse_real(key, value);
    } else if (key == "growth_collision_gmin") {
      config.growth_collision_gmin = parse_real(key, value);
    } else if (key == "gravity") {
      config.external.gravity = parse_vec3(key, value);
    } else if (key == "rotation_axis") {
      config.external.rotation_axis = parse_vec3(key, value);
    } else if (key == "rotation_center") {
      config.external.rotation_center = parse_vec3(key, value);
    } else if (key == "rotation_strength") {
      config.external.rotation_strength = parse_real(key, value);
    } else {
      throw Error(ErrorCode::UnknownKey, "unknown config key '" + key + "'");
    }
  }
  return config;
}

SimConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

std::string config_to_text(const SimConfig& config) {
  std::ostringstream out;
  out << "method = " << (config.method == Method::Shell ? "shell" : "collision") << "\n";
  out << "seed = " << config.seed << "\n";
  out << "dt = " << real_to_text(config.dt) << "\n";
  out << "max_steps = " << config.max_steps << "\n";
  out << "max_vertices = " << config.max_vertices << "\n";
  out << "export_every = " << config.export_every << "\n";
  out << "growth_cutoff = " << real_to_text(config.growth.cutoff) << "\n";
  out << "growth_steepness = " << real_to_text(config.growth.steepness) << "\n";
  out << "growth_high_at_sources = " << (config.growth.high_at_sources ? "true" : "false")
      << "\n";
  out << "source_policy = " << policy_to_text(config.sources) << "\n";
  out << "split_k = " << real_to_text(config.split_k) << "\n";
  out << "split_length_mode = "
      << (config.split_mode == SplitLengthMode::RestLength ? "rest-length" : "self-length")
      << "\n";
  out << "collapse_threshold = " << real_to_text(config.collapse_factor) << "\n";
  out << "stretch_stiffness = " << real_to_text(config.stretch_stiffness) << "\n";
  out << "bending_kmin = " << real_to_text(config.bending.k_min) << "\n";
  out << "bending_kmax = " << real_to_text(config.bending.k_max) << "\n";
  out << "bending_ramp_steps = " << config.bending.ramp_steps << "\n";
  out << "fairing_alpha = " << real_to_text(config.fairing_alpha) << "\n";
  out << "fairing_beta = " << real_to_text(config.fairing_beta) << "\n";
  out << "fairing_tolerance = " << real_to_text(config.fairing_tolerance) << "\n";
  out << "collision_normal_factor = " << real_to_text(config.collision_normal_factor) << "\n";
  out << "collision_tangent_factor = " << real_to_text(config.collision_tangent_factor) << "\n";
  out << "collision_stiffness = " << real_to_text(config.collision_stiffness) << "\n";
  out << "collision_lambda = " << real_to_text(config.collision_lambda) << "\n";
  out << "collision_both_orders = " << (config.collision_both_orders ? "true" : "false") << "\n";
  out << "growth_collision_stiffness = " << real_to_text(config.growth_collision_stiffness)
      << "\n";
  out << "growth_collision_gmin = " << real_to_text(config.growth_collision_gmin) << "\n";
  out << "gravity = " << vec3_to_text(config.external.gravity) << "\n";
  out << "rotation_axis = " << vec3_to_text(config.external.rotation_axis) << "\n";
  out << "rotation_center = " << vec3_to_text(config.external.rotation_center) << "\n";
  out << "rotation_strength = " << real_to_text(config.external.rotation_strength) << "\n";
  return out.str();
}

void write_config(const SimConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << config_to_text(config);
}

std::string metrics_csv_header() {
  return "step,V,E,F,splits,flips,collapses,ears,collision_events,mean_quality,mean_valence,"
         "mean_sq_dihedral,self_intersections,k_b,wall_ms";
}

std::string metrics_csv_row(const StepReport& report, const MetricsReport& metrics) {
  std::ostringstream out;
  out << report.step << "," << metrics.vertices << "," << metrics.edges << "," << metrics.faces
      << "," << report.splits << "," << report.flips << "," << report.collapses << ","
      << report.ears << "," << report.collision_events << "," << real_to_text(metrics.mean_quality)
      << "," << real_to_text(metrics.mean_valence) << ","
      << real_to_text(metrics.mean_sq_dihedral) << "," << metrics.self_intersections << ","
      << real_to_text(report.bending_coefficient) << ",0";
  return out.str();
}

}  // namespace cabbage
