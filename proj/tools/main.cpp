#include "cabbage/analysis.hpp"
#include "cabbage/io.hpp"
#include "cabbage/sim.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace cabbage;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRunFailure = 2;
constexpr int kExitValidation = 3;

Real standalone_rest_length(const Mesh& mesh) {
  Real sum = 0;
  Index n = 0;
  for (Index e = 0; e < mesh.edge_slots(); ++e)
    if (mesh.edge_alive(e)) {
      sum += mesh.edge_length(e);
      ++n;
    }
  return n > 0 ? sum / n : Real(1);
}

struct GrowOptions {
  std::string config_path;
  std::string input_path;
  std::string generate_kind;
  std::string out_dir;
  std::string method;
  long long seed = 0;
  bool seed_given = false;
  long long steps = 0;
  bool steps_given = false;
  long long max_vertices = 0;
  bool max_vertices_given = false;
  long long export_every = 0;
  bool export_every_given = false;
};

int cmd_grow(const GrowOptions& opt) {
  SimConfig config = parse_config(opt.config_path);
  if (opt.seed_given)
    config.seed = static_cast<std::uint64_t>(opt.seed);
  else if (const char* env = std::getenv("CABBAGE_SEED"))
    config.seed = static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
  if (opt.steps_given) config.max_steps = static_cast<Index>(opt.steps);
  if (opt.max_vertices_given) config.max_vertices = static_cast<Index>(opt.max_vertices);
  if (opt.export_every_given) config.export_every = static_cast<Index>(opt.export_every);
  if (!opt.method.empty())
    config.method = opt.method == "collision" ? Method::CollisionVariant : Method::Shell;

  Mesh initial;
  if (!opt.input_path.empty())
    initial = load_obj(opt.input_path);
  else
    initial = generate_initial(
        default_generator(parse_generator_kind(opt.generate_kind), config.seed));

  const fs::path out(opt.out_dir);
  fs::create_directories(out / "frames");
  write_config(config, (out / "config.echo").string());

  std::ofstream metrics_csv(out / "metrics.csv");
  std::ofstream log(out / "log.txt");
  if (!metrics_csv || !log) throw Error(ErrorCode::IoError, "cannot write into " + opt.out_dir);
  metrics_csv << metrics_csv_header() << "\n";

  RunSinks sinks;
  sinks.on_frame = [&](Index at, const SimState& state) {
    char name[64];
    std::snprintf(name, sizeof(name), "frame_%06d.obj", at);
    save_obj(state.mesh, (out / "frames" / name).string());
    StepReport report;
    if (!state.reports.empty()) report = state.reports.back();
    report.step = at;
    report.bending_coefficient = bending_coefficient({}, 0);
    if (!state.reports.empty())
      report.bending_coefficient = state.reports.back().bending_coefficient;
    metrics_csv << metrics_csv_row(report, full_report(state.mesh, state.rest.rest_length))
                << "\n";
  };
  sinks.on_step = [&](const StepReport& r, const SimState&) {
    char line[256];
    std::snprintf(line, sizeof(line),
                  "step=%d V=%d E=%d F=%d splits=%d flips=%d collapses=%d ears=%d "
                  "collisions=%d k_b=%.6g wall_ms=%.3f",
                  r.step, r.vertices, r.edges, r.faces, r.splits, r.flips, r.collapses, r.ears,
                  r.collision_events, r.bending_coefficient, r.wall_ms);
    log << line << "\n";
  };
  sinks.on_failure_frame = [&](const SimState& state, const char* tag) {
    save_obj(state.mesh, (out / "frames" / (std::string("failure_") + tag + ".obj")).string());
  };

  const RunResult result = run(config, std::move(initial), nullptr, sinks);
  log << "stop_reason=" << to_string(result.stop);
  if (result.stop == StopReason::Failure) log << " (" << result.failure_reason << ")";
  log << " steps=" << result.steps << "\n";

  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(result.final_vertex_hash));
  std::cout << "stop reason: " << to_string(result.stop) << "\n"
            << "steps: " << result.steps << "\n"
            << "vertex hash: " << hash << "\n";
  if (result.stop == StopReason::Failure) {
    std::cout << "failure: " << result.failure_reason << "\n";
    return kExitRunFailure;
  }
  return kExitOk;
}

int cmd_metrics(const std::string& input) {
  const Mesh mesh = load_obj(input);
  StepReport report;
  std::cout << metrics_csv_row(report, full_report(mesh, standalone_rest_length(mesh))) << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& input) {
  const Mesh mesh = load_obj(input);
  const std::vector<std::string> issues = mesh.validate();
  const Index crossings = count_self_intersections(mesh, standalone_rest_length(mesh));
  if (issues.empty() && crossings == 0) {
    std::cout << "valid, no self-intersections\n";
    return kExitOk;
  }
  for (const std::string& issue : issues) std::cout << "invalid: " << issue << "\n";
  if (crossings > 0) std::cout << "self-intersections: " << crossings << "\n";
  return kExitValidation;
}

int cmd_generate(const std::string& kind, const std::string& out, long long seed) {
  const GeneratorSpec spec =
      default_generator(parse_generator_kind(kind), static_cast<std::uint64_t>(seed));
  save_obj(generate_initial(spec), out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differential-growth surface simulator"};
  app.require_subcommand(1);

  GrowOptions grow_opt;
  CLI::App* grow = app.add_subcommand("grow", "run a growth simulation");
  grow->add_option("--config", grow_opt.config_path, "config file (key = value lines)")
      ->required();
  auto* in_opt = grow->add_option("--input", grow_opt.input_path, "initial mesh (OBJ)");
  auto* gen_opt = grow->add_option(
      "--generate", grow_opt.generate_kind,
      "initial mesh kind: disk|annulus|moebius-like|punctured-torus");
  in_opt->excludes(gen_opt);
  grow->add_option("--out", grow_opt.out_dir, "run output directory")->required();
  auto* seed_opt = grow->add_option("--seed", grow_opt.seed, "RNG seed");
  auto* steps_opt = grow->add_option("--steps", grow_opt.steps, "step budget");
  auto* maxv_opt = grow->add_option("--max-vertices", grow_opt.max_vertices, "vertex budget");
  auto* exp_opt = grow->add_option("--export-every", grow_opt.export_every, "frame cadence");
  grow->add_option("--method", grow_opt.method, "shell|collision")
      ->check(CLI::IsMember({"shell", "collision"}));

  std::string metrics_input;
  CLI::App* metrics_cmd = app.add_subcommand("metrics", "print one metrics CSV row for a mesh");
  metrics_cmd->add_option("--input", metrics_input, "mesh file (OBJ)")->required();

  std::string validate_input;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check structure and self-intersections");
  validate_cmd->add_option("--input", validate_input, "mesh file (OBJ)")->required();

  std::string gen_kind, gen_out;
  long long gen_seed = 0;
  CLI::App* generate_cmd = app.add_subcommand("generate", "write an initial mesh");
  generate_cmd
      ->add_option("--kind", gen_kind, "disk|annulus|moebius-like|punctured-torus")
      ->required();
  generate_cmd->add_option("--out", gen_out, "output OBJ path")->required();
  generate_cmd->add_option("--seed", gen_seed, "perturbation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (grow->parsed()) {
      if (grow_opt.input_path.empty() && grow_opt.generate_kind.empty()) {
        std::cerr << "grow needs --input or --generate\n";
        return kExitUsage;
      }
      grow_opt.seed_given = seed_opt->count() > 0;
      grow_opt.steps_given = steps_opt->count() > 0;
      grow_opt.max_vertices_given = maxv_opt->count() > 0;
      grow_opt.export_every_given = exp_opt->count() > 0;
      return cmd_grow(grow_opt);
    }
    if (metrics_cmd->parsed()) return cmd_metrics(metrics_input);
    if (validate_cmd->parsed()) return cmd_validate(validate_input);
    if (generate_cmd->parsed()) return cmd_generate(gen_kind, gen_out, gen_seed);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitRunFailure;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitRunFailure;
  }
  return kExitUsage;
}
