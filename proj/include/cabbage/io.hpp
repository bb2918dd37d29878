#pragma once

#include "cabbage/analysis.hpp"
#include "cabbage/mesh.hpp"
#include "cabbage/sim.hpp"

#include <cstdint>
#include <string>

namespace cabbage {

struct GeneratorSpec {
  enum class Kind { Disk, Annulus, MoebiusLike, PuncturedTorus };
  Kind kind = Kind::Disk;
  Index radial = 5;         // rings (disk), bands (annulus), rows across / minor count
  Index angular = 30;       // boundary count (disk/annulus), segments around
  Real radius = 5.0;        // disk outer radius
  Real inner_radius = 2.0;  // annulus
  Real outer_radius = 4.0;  // annulus
  Real strip_width = 1.4;   // moebius-like
  Real ring_radius = 3.0;   // moebius-like center circle / torus major radius
  Real tube_radius = 1.2;   // torus minor radius
  Real perturb = 0.02;      // normal-direction jitter, relative to mean edge length
  std::uint64_t seed = 0;
};

GeneratorSpec default_generator(GeneratorSpec::Kind kind, std::uint64_t seed);
GeneratorSpec::Kind parse_generator_kind(const std::string& name);

/// Deterministic initial surfaces: disk, annulus, half-twist strip with an
/// unglued seam, and a punctured torus. Edge lengths are near-uniform before
/// the seeded normal-direction perturbation.
Mesh generate_initial(const GeneratorSpec& spec);

/// Minimal OBJ reader: `v x y z` and `f i j k ...` (1-indexed; polygons are
/// fan-triangulated; `i/j/k` attribute suffixes ignored). Everything else is
/// skipped.
Mesh load_obj(const std::string& path);

/// Vertices in handle order at 9 significant digits, faces 1-indexed.
void save_obj(const Mesh& mesh, const std::string& path);

/// Flat `key = value` config, one entry per line, `#` comments. Unknown keys
/// are errors; missing keys keep their defaults.
SimConfig parse_config(const std::string& path);
SimConfig parse_config_text(const std::string& text);
std::string config_to_text(const SimConfig& config);
void write_config(const SimConfig& config, const std::string& path);

/// metrics.csv schema. The wall_ms column is kept for schema stability but
/// always written as 0 so outputs are byte-reproducible; real timings go to
/// the run log.
std::string metrics_csv_header();
std::string metrics_csv_row(const StepReport& report, const MetricsReport& metrics);

}  // namespace cabbage
