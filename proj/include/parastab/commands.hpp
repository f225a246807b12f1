#pragma once

#include <iosfwd>
#include <string>

#include "parastab/config.hpp"

namespace parastab {

/// Builds the configured mesh, reports its sizes on `log`, and writes the
/// plain-text export when `export_path` is nonempty.
void cmd_mesh(const ExperimentConfig& config, const std::string& export_path,
              std::ostream& log);

/// Solves the periodic Riccati problem on the coarse (level 0) mesh, then
/// writes the gain table and the per-pass error history CSV into the output
/// directory. The history is written even when the pass loop does not
/// converge, before the error propagates.
void cmd_solve_periodic(const ExperimentConfig& config, std::ostream& log);

/// Runs one closed-loop (or free) simulation at the configured refinement and
/// writes trace.csv and summary.json.
void cmd_simulate(const ExperimentConfig& config, std::ostream& log);

/// Runs the Riccati and oblique laws on the same configuration and writes
/// trace_riccati.csv, trace_oblique.csv, and comparison.json.
void cmd_compare(const ExperimentConfig& config, std::ostream& log);

/// Maps a thrown library error to the process exit code contract:
/// 2 = configuration or file problem, 3 = numerical failure,
/// 4 = iteration cap hit.
int run_command_catching(const std::string& name, void (*cmd)(const ExperimentConfig&, std::ostream&),
                         const ExperimentConfig& config, std::ostream& log,
                         std::ostream& err);

} // namespace parastab
