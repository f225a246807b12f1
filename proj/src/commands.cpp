#include "parastab/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "parastab/actuators.hpp"
#include "parastab/coefficients.hpp"
#include "parastab/errors.hpp"
#include "parastab/feedback.hpp"
#include "parastab/fem.hpp"
#include "parastab/mesh.hpp"
#include "parastab/riccati.hpp"
#include "parastab/simulate.hpp"

namespace parastab {

namespace {

namespace fs = std::filesystem;

void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp);
    out << content;
    if (!out) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path + " failed: " + ec.message());
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

Triangulation level0_mesh(const ExperimentConfig& cfg) {
  return build_unit_square_mesh(cfg.base_n);
}

Triangulation refined_mesh(const ExperimentConfig& cfg) {
  Triangulation mesh = level0_mesh(cfg);
  for (int i = 0; i < cfg.refine; ++i) mesh = refine_regular(mesh);
  return mesh;
}

std::string trace_csv(const SimulationTrace& trace) {
  std::ostringstream out;
  out << "t,norm_H,J";
  for (Index j = 0; j < trace.inputs.cols(); ++j) out << ",u_" << (j + 1);
  out << "\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out << format_double(trace.times[i]) << "," << format_double(trace.norms[i]) << ","
        << format_double(trace.cost[i]);
    for (Index j = 0; j < trace.inputs.cols(); ++j)
      out << "," << format_double(trace.inputs(static_cast<Index>(i), j));
    out << "\n";
  }
  return out.str();
}

FeedbackLaw make_law(const ExperimentConfig& cfg, const std::string& law_name,
                     const Triangulation& fine, const FemOperators& ops) {
  if (law_name == "none") return NoLaw{};
  const ActuatorLayout layout = actuator_layout(cfg.m, cfg.r);
  if (law_name == "oblique")
    return ObliqueLaw{build_actuator_basis(fine, layout, ops.mass, cfg.beta), cfg.lambda};
  if (law_name != "riccati") throw InvalidArgument("unknown law '" + law_name + "'");

  RiccatiGainTable table = load_gain_table(cfg.resolved_table_path());
  const Triangulation coarse = level0_mesh(cfg);
  if (table.coarse_node_count != coarse.node_count())
    throw InvalidArgument("gain table was computed on a different coarse mesh (" +
                          std::to_string(table.coarse_node_count) + " nodes, expected " +
                          std::to_string(coarse.node_count()) + ")");
  if (table.m0() != layout.count())
    throw InvalidArgument("gain table input count does not match the actuator layout");
  RiccatiLaw law;
  law.xi = coarse_to_fine_restriction(coarse, fine);
  law.U = actuator_matrix(fine, layout);
  law.table = std::move(table);
  return law;
}

struct RunOutputs {
  SimulationTrace trace;
  double J_total = 0.0;
  DecayFit fit;
};

RunOutputs run_one(const ExperimentConfig& cfg, const std::string& law_name,
                   const Triangulation& fine, const FemOperators& ops) {
  const CoefficientSet coeffs = coefficients_by_name(cfg.coefficients, cfg.c);
  const FeedbackLaw law = make_law(cfg, law_name, fine, ops);
  RunOutputs out;
  out.trace = run_simulation(coeffs, fine, ops, law, cfg.horizon, cfg.step, cfg.beta);
  out.J_total = truncated_cost(out.trace, cfg.beta);
  out.fit = fit_decay_rate(out.trace, 0.5);
  return out;
}

nlohmann::json summary_json(const ExperimentConfig& cfg, const std::string& law_name,
                            const RunOutputs& run) {
  nlohmann::json j;
  j["J_total"] = run.J_total;
  j["fitted_mu"] = run.fit.mu;
  j["fitted_rho"] = run.fit.rho;
  j["mesh_level"] = cfg.refine;
  j["M0"] = static_cast<int>(run.trace.inputs.cols());
  j["law"] = law_name;
  return j;
}

} // namespace

void cmd_mesh(const ExperimentConfig& cfg, const std::string& export_path,
              std::ostream& log) {
  const Triangulation mesh = refined_mesh(cfg);
  log << "mesh: level=" << mesh.level << " nodes=" << mesh.node_count()
      << " triangles=" << mesh.triangle_count() << "\n";
  if (!export_path.empty()) {
    std::ostringstream body;
    write_mesh_text(mesh, body);
    atomic_write_text(export_path, body.str());
    log << "mesh: wrote " << export_path << "\n";
  }
}

void cmd_solve_periodic(const ExperimentConfig& cfg, std::ostream& log) {
  const Triangulation mesh = level0_mesh(cfg);
  const FemOperators ops = assemble_fem_operators(mesh, cfg.nu);
  const CoefficientSet coeffs = coefficients_by_name(cfg.coefficients, cfg.c);
  const ActuatorLayout layout = actuator_layout(cfg.m, cfg.r);
  const Matrix U = actuator_matrix(mesh, layout);
  const Matrix Csq = Matrix(ops.mass);

  const auto Xfun = [&](double t) {
    const SparseMatrix L0 = reaction_matrix(ops.mass, evaluate_coefficient(coeffs, "a", mesh, t));
    const SparseMatrix L1 =
        convection_matrix(ops.g_x1, ops.g_x2, evaluate_coefficient(coeffs, "b1", mesh, t),
                          evaluate_coefficient(coeffs, "b2", mesh, t));
    return system_matrix(ops, L0, L1, cfg.mu_bar);
  };
  Eigen::LLT<Matrix> mass_llt{Matrix(ops.mass)};
  const Matrix A_diff = mass_llt.solve(Matrix(ops.s_nu));

  const double n = static_cast<double>(mesh.node_count());
  const double epsilon =
      cfg.epsilon.value_or(std::sqrt(n * std::numeric_limits<double>::epsilon()));

  ensure_dir(cfg.out_dir);
  const auto write_history = [&](const std::vector<double>& history) {
    std::ostringstream csv;
    csv << "n,error\n";
    for (std::size_t i = 0; i < history.size(); ++i)
      csv << (i + 1) << "," << format_double(history[i]) << "\n";
    atomic_write_text(cfg.out_dir + "/error_history.csv", csv.str());
  };

  PeriodicRiccatiResult result;
  try {
    result = periodic_riccati(Xfun, U, cfg.beta, Csq, cfg.tau, cfg.varpi, cfg.k_ric,
                              epsilon, cfg.n_max, cfg.delta_s, A_diff);
  } catch (const NoConvergence& e) {
    write_history(e.history);
    throw;
  }
  write_history(result.error_history);

  const std::string table_path = cfg.resolved_table_path();
  const fs::path parent = fs::path(table_path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  save_gain_table(result.table, table_path);

  log << "solve-periodic: passes=" << result.error_history.size()
      << " final_error=" << format_double(result.error_history.back())
      << " halvings=" << result.halvings << " table=" << table_path << "\n";
}

void cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  const Triangulation fine = refined_mesh(cfg);
  const FemOperators ops = assemble_fem_operators(fine, cfg.nu);
  const RunOutputs run = run_one(cfg, cfg.law, fine, ops);

  ensure_dir(cfg.out_dir);
  atomic_write_text(cfg.out_dir + "/trace.csv", trace_csv(run.trace));
  atomic_write_text(cfg.out_dir + "/summary.json",
                    summary_json(cfg, cfg.law, run).dump(2) + "\n");
  log << "simulate: law=" << cfg.law << " J_total=" << format_double(run.J_total)
      << " fitted_mu=" << format_double(run.fit.mu) << "\n";
}

void cmd_compare(const ExperimentConfig& cfg, std::ostream& log) {
  const Triangulation fine = refined_mesh(cfg);
  const FemOperators ops = assemble_fem_operators(fine, cfg.nu);

  const RunOutputs ricc = run_one(cfg, "riccati", fine, ops);
  const RunOutputs obli = run_one(cfg, "oblique", fine, ops);

  ensure_dir(cfg.out_dir);
  atomic_write_text(cfg.out_dir + "/trace_riccati.csv", trace_csv(ricc.trace));
  atomic_write_text(cfg.out_dir + "/trace_oblique.csv", trace_csv(obli.trace));

  nlohmann::json j;
  j["riccati"] = summary_json(cfg, "riccati", ricc);
  j["oblique"] = summary_json(cfg, "oblique", obli);
  j["riccati_cost_le_oblique"] = ricc.J_total <= obli.J_total;
  atomic_write_text(cfg.out_dir + "/comparison.json", j.dump(2) + "\n");

  log << "compare: J_riccati=" << format_double(ricc.J_total)
      << " J_oblique=" << format_double(obli.J_total)
      << " riccati_cost_le_oblique=" << (ricc.J_total <= obli.J_total ? "true" : "false")
      << "\n";
}

int run_command_catching(const std::string& name,
                         void (*cmd)(const ExperimentConfig&, std::ostream&),
                         const ExperimentConfig& config, std::ostream& log,
                         std::ostream& err) {
  try {
    cmd(config, log);
    return 0;
  } catch (const InvalidArgument& e) {
    err << name << ": configuration error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << name << ": " << e.what() << "\n";
    return 2;
  } catch (const NoConvergence& e) {
    err << name << ": " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    err << name << ": numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << name << ": " << e.what() << "\n";
    return 3;
  }
}

} // namespace parastab
