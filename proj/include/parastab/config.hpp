#pragma once

#include <optional>
#include <string>

namespace parastab {

/// Full description of one experiment. Parsed from an INI-style file of
/// [section] headers and key = value lines; unknown keys are rejected.
struct ExperimentConfig {
  // [system]
  std::string coefficients = "paper2d";
  double c = 0.0;  // reaction constant for autonomous_const
  double nu = 0.1;

  // [mesh]
  int base_n = 8;
  int refine = 0;

  // [actuators]
  int m = 2;
  double r = 0.5;

  // [feedback]
  std::string law = "riccati";  // none | oblique | riccati
  double lambda = 1.0;
  double beta = 1.0;
  double mu_bar = 1.0;
  double k_ric = 0.005;
  double tau = 0.1;
  double varpi = 0.5235987755982988;  // pi / 6
  std::optional<double> epsilon;      // absent: sqrt(N * eps) at solve time
  int n_max = 200;
  double delta_s = 0.2;

  // [simulation]
  double horizon = 3.0;
  double step = 0.01;

  // [outputs]
  std::string out_dir = "out";
  std::string table_path;  // empty: out_dir + "/gain_table.rgt"

  bool operator==(const ExperimentConfig&) const = default;

  std::string resolved_table_path() const {
    return table_path.empty() ? out_dir + "/gain_table.rgt" : table_path;
  }
};

/// Parses and validates configuration text. The paper2d family pins varpi to
/// pi / 6 regardless of the file's value.
ExperimentConfig parse_config_text(const std::string& text);

/// Reads and parses a configuration file.
ExperimentConfig parse_config_file(const std::string& path);

/// Renders a configuration so that parse_config_text(render_config(c)) == c.
std::string render_config(const ExperimentConfig& config);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

} // namespace parastab
