// Command-line driver: run one scenario (or a mesh convergence sweep) from a
// key = value config file and emit CSV/VTK/manifest outputs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sgdg/errors.hpp"
#include "sgdg/outputs.hpp"
#include "sgdg/version.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw sgdg::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void apply_paper_scale(sgdg::ScenarioConfig& cfg) {
  // restore the resolutions and horizons reported in the reference tables
  if (cfg.scenario == "blast2d" || cfg.scenario == "multiblast2d") cfg.meshes = {400};
  if (cfg.scenario == "jeans") cfg.meshes = {200};
  if (cfg.scenario == "perturb2d_sym" || cfg.scenario == "perturb2d_asym") cfg.meshes = {200};
  if (cfg.scenario == "perturb3d" || cfg.scenario == "explosion3d") cfg.meshes = {60};
  if (cfg.scenario == "accuracy3d") {
    cfg.meshes = {4, 8, 16, 32};
    cfg.t_end = 0.3;
  }
  if (cfg.scenario == "accuracy2d") cfg.meshes = {5, 10, 20, 40};
  if (cfg.scenario == "wb2d") cfg.meshes = {10, 20, 40, 80};
  if (cfg.scenario == "wb3d") cfg.meshes = {4, 8, 16, 32};
}

int run_command(const std::string& config_path, const std::string& output_dir, int threads,
                bool paper_scale, bool sweep) {
  sgdg::ScenarioConfig cfg = sgdg::parse_config(read_file(config_path));
  if (threads > 0) cfg.threads = threads;
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (paper_scale) {
    cfg.paper_scale = true;
    apply_paper_scale(cfg);
  }
  if (!sweep && cfg.meshes.size() > 1) cfg.meshes = {cfg.meshes.back()};

  sgdg::RunOutputs out = sgdg::run_scenario(cfg);
  sgdg::write_outputs(out, cfg.output_dir);

  std::printf("scenario %s finished: %ld steps, %.1fs wall\n", cfg.scenario.c_str(), out.steps,
              out.wall_seconds);
  if (out.initial_energy != 0.0)
    std::printf("  total-energy drift: %.3e (relative %.3e)\n", out.energy_drift,
                out.energy_drift / std::abs(out.initial_energy));
  if (out.invalid_states > 0)
    std::printf("  invalid-state flags: %ld\n", out.invalid_states);
  if (out.limited_cells > 0) std::printf("  positivity-limited cells: %ld\n", out.limited_cells);
  if (out.radial_deviation >= 0.0)
    std::printf("  radial symmetry deviation: %.3e\n", out.radial_deviation);
  for (const auto& r : out.errors) {
    std::printf("  %-6s N=%-4d L1=%.3e", r.variable.c_str(), r.mesh, r.l1);
    if (r.has_order) std::printf(" (%.2f)", r.l1_order);
    std::printf("  L2=%.3e  Linf=%.3e\n", r.l2, r.linf);
  }
  std::printf("outputs written to %s\n", cfg.output_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structure-preserving DG solver for self-gravitating gas dynamics"};
  app.set_version_flag("--version", sgdg::kVersion);

  std::string config_path, output_dir;
  int threads = 0;
  bool paper_scale = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "config file (key = value lines)")->required();
    cmd->add_option("--output-dir", output_dir, "output directory override");
    cmd->add_option("--threads", threads, "worker threads for assembly sweeps");
    cmd->add_flag("--paper-scale", paper_scale, "use the full reported resolutions");
  };
  CLI::App* run = app.add_subcommand("run", "run a single scenario (last mesh of a list)");
  add_common(run);
  CLI::App* conv = app.add_subcommand("convergence", "run the full mesh sweep with order tables");
  add_common(conv);
  CLI::App* list = app.add_subcommand("list-scenarios", "print the scenario registry");
  app.require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& id : sgdg::scenario_ids()) std::printf("%s\n", id.c_str());
      return 0;
    }
    return run_command(config_path, output_dir, threads, paper_scale, conv->parsed());
  } catch (const sgdg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
}
