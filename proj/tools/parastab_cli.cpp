// Command-line driver: mesh inspection, periodic Riccati solves, closed-loop
// simulation, and law comparison, all driven by one configuration file.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "parastab/commands.hpp"
#include "parastab/config.hpp"
#include "parastab/errors.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<int> refine;
  std::optional<std::string> law;
  std::optional<std::string> out_dir;
};

void add_common_flags(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "Configuration file")->required();
  sub->add_option("--refine", flags.refine, "Override mesh refinement level");
  sub->add_option("--law", flags.law, "Override feedback law (none|oblique|riccati)")
      ->check(CLI::IsMember({"none", "oblique", "riccati"}));
  sub->add_option("--out", flags.out_dir, "Override output directory");
}

int load_config(const CommonFlags& flags, parastab::ExperimentConfig& cfg) {
  try {
    cfg = parastab::parse_config_file(flags.config_path);
    if (flags.refine) cfg.refine = *flags.refine;
    if (flags.law) cfg.law = *flags.law;
    if (flags.out_dir) cfg.out_dir = *flags.out_dir;
    if (cfg.refine < 0) throw parastab::InvalidArgument("refine must be >= 0");
  } catch (const parastab::Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedback stabilization of parabolic equations on the unit square"};
  app.require_subcommand(1);

  CommonFlags mesh_flags, solve_flags, sim_flags, cmp_flags;
  std::string mesh_export;

  CLI::App* mesh_cmd = app.add_subcommand("mesh", "Build the mesh and report its sizes");
  add_common_flags(mesh_cmd, mesh_flags);
  mesh_cmd->add_option("--export", mesh_export, "Write a plain-text mesh file");

  CLI::App* solve_cmd =
      app.add_subcommand("solve-periodic", "Compute the periodic gain table");
  add_common_flags(solve_cmd, solve_flags);

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run one closed-loop simulation");
  add_common_flags(sim_cmd, sim_flags);

  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "Run the Riccati and oblique laws side by side");
  add_common_flags(cmp_cmd, cmp_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  parastab::ExperimentConfig cfg;
  if (mesh_cmd->parsed()) {
    if (const int rc = load_config(mesh_flags, cfg)) return rc;
    try {
      parastab::cmd_mesh(cfg, mesh_export, std::cout);
      return 0;
    } catch (const parastab::InvalidArgument& e) {
      std::cerr << "mesh: configuration error: " << e.what() << "\n";
      return 2;
    } catch (const parastab::Error& e) {
      std::cerr << "mesh: " << e.what() << "\n";
      return 3;
    }
  }
  if (solve_cmd->parsed()) {
    if (const int rc = load_config(solve_flags, cfg)) return rc;
    return parastab::run_command_catching("solve-periodic", parastab::cmd_solve_periodic,
                                          cfg, std::cout, std::cerr);
  }
  if (sim_cmd->parsed()) {
    if (const int rc = load_config(sim_flags, cfg)) return rc;
    return parastab::run_command_catching("simulate", parastab::cmd_simulate, cfg,
                                          std::cout, std::cerr);
  }
  if (const int rc = load_config(cmp_flags, cfg)) return rc;
  return parastab::run_command_catching("compare", parastab::cmd_compare, cfg, std::cout,
                                        std::cerr);
}
