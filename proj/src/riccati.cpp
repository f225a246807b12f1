#include "parastab/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "parastab/errors.hpp"

namespace parastab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr const char* kTableFormatVersion = "gain-table-1";

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

} // namespace

Matrix system_matrix(const FemOperators& ops, const SparseMatrix& L0,
                     const SparseMatrix& L1, double mu_bar) {
  const Index n = ops.mass.rows();
  if (L0.rows() != n || L1.rows() != n)
    throw InvalidArgument("system_matrix: dimension mismatch");
  const Matrix rhs = Matrix(ops.s_nu) + Matrix(L0) + Matrix(L1);
  Eigen::LLT<Matrix> llt((Matrix(ops.mass)));
  if (llt.info() != Eigen::Success)
    throw NumericalError("system_matrix: mass matrix is not positive definite");
  Matrix x = -llt.solve(rhs);
  x.diagonal().array() += mu_bar;
  return x;
}

DreSweep dre_backward(const std::function<Matrix(double)>& Xfun, const Matrix& B,
                      const Matrix& Csq, const Matrix& Pi_end, double tau,
                      double varpi, double k_ric) {
  if (!(varpi > 0.0)) throw InvalidArgument("dre_backward: varpi must be positive");
  if (!(k_ric > 0.0) || k_ric > varpi)
    throw InvalidArgument("dre_backward: k_ric must lie in (0, varpi]");
  const Index n = Pi_end.rows();
  if (Pi_end.cols() != n || Csq.rows() != n || Csq.cols() != n || B.rows() != n)
    throw InvalidArgument("dre_backward: dimension mismatch");
  if (!try_cholesky_factor(Csq))
    throw NotPositiveDefinite("dre_backward: Csq must be positive definite");

  DreSweep sweep;
  sweep.k_requested = k_ric;
  sweep.k_base = varpi / std::floor(varpi / k_ric);
  const double k_min = sweep.k_base * std::pow(2.0, -20);

  double T = tau + varpi;
  Matrix pi = symmetrized(Pi_end);
  sweep.times.push_back(T);
  sweep.Pi_list.push_back(pi);

  while (T > tau) {
    const Matrix x_right = Xfun(T);
    if (x_right.rows() != n || x_right.cols() != n)
      throw InvalidArgument("dre_backward: Xfun returned wrong dimensions");
    const Matrix pib = pi * B;
    const Matrix quad = symmetrized(x_right.transpose() * pi + pi * x_right) -
                        pib * pib.transpose();

    // Absorb accumulated roundoff into the final step so the sweep lands on
    // tau exactly.
    const double remaining = T - tau;
    double k = remaining <= sweep.k_base * (1.0 + 1e-9) ? remaining : sweep.k_base;

    Matrix q;
    for (;;) {
      q = symmetrized(quad + 2.0 * Csq + (2.0 / k) * pi);
      if (try_cholesky_factor(q)) break;
      k *= 0.5;
      ++sweep.halvings;
      if (k < k_min)
        throw StepCollapse("dre_backward: step collapsed below " + std::to_string(k_min) +
                           " near t = " + std::to_string(T));
    }

    const double t_next = k == remaining ? tau : T - k;
    AreProblem prob;
    prob.X = Xfun(t_next);
    prob.X.diagonal().array() -= 1.0 / k;
    prob.B = B;
    prob.Csq = q;
    prob.guess = pi;
    pi = newton_kleinman(prob).Pi;
    T = t_next;
    sweep.times.push_back(T);
    sweep.Pi_list.push_back(pi);
  }

  std::reverse(sweep.times.begin(), sweep.times.end());
  std::reverse(sweep.Pi_list.begin(), sweep.Pi_list.end());
  return sweep;
}

RiccatiGainTable gain_table(const DreSweep& sweep, const Matrix& U, double beta) {
  if (sweep.times.empty()) throw InvalidArgument("gain_table: empty sweep");
  if (!(beta > 0.0)) throw InvalidArgument("gain_table: beta must be positive");
  if (U.rows() != sweep.Pi_list.front().rows())
    throw InvalidArgument("gain_table: actuator matrix dimension mismatch");

  RiccatiGainTable table;
  table.times = sweep.times;
  table.gains.reserve(sweep.Pi_list.size());
  for (const Matrix& pi : sweep.Pi_list)
    table.gains.push_back((-1.0 / beta) * (U.transpose() * pi));
  table.Pi_tau = sweep.Pi_list.front();
  table.tau = sweep.times.front();
  table.period = sweep.times.back() - sweep.times.front();
  table.beta = beta;
  table.coarse_node_count = static_cast<int>(U.rows());
  return table;
}

PeriodicRiccatiResult periodic_riccati(const std::function<Matrix(double)>& Xfun,
                                       const Matrix& U, double beta, const Matrix& Csq,
                                       double tau, double varpi, double k_ric,
                                       double epsilon, int n_max, double delta_s,
                                       const Matrix& A_diffusion) {
  if (!(beta > 0.0)) throw InvalidArgument("periodic_riccati: beta must be positive");
  if (n_max < 1) throw InvalidArgument("periodic_riccati: n_max must be >= 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("periodic_riccati: epsilon must be positive");

  const Matrix B = (1.0 / std::sqrt(beta)) * U;
  PeriodicRiccatiResult result;

  Matrix pi_right = homotopy_are(Xfun(tau + varpi), B, Csq, delta_s, A_diffusion).Pi;
  DreSweep sweep;
  for (int pass = 1;; ++pass) {
    sweep = dre_backward(Xfun, B, Csq, pi_right, tau, varpi, k_ric);
    result.halvings += sweep.halvings;
    const Matrix& pi_left = sweep.Pi_list.front();
    result.error_history.push_back(spectral_norm(pi_left - pi_right));
    if (result.error_history.back() <= epsilon) break;
    if (pass == n_max)
      throw NoConvergence("periodic_riccati: no convergence after " +
                              std::to_string(n_max) + " passes",
                          result.error_history);
    pi_right = pi_left;
  }

  result.table = gain_table(sweep, U, beta);
  return result;
}

namespace {

void put_doubles(std::ostream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

void get_doubles(std::istream& in, double* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw IoError("load_gain_table: truncated file");
}

// Gains and Pi_tau are stored row-major regardless of Eigen's default layout.
void put_matrix(std::ostream& out, const Matrix& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  put_doubles(out, rm.data(), static_cast<std::size_t>(rm.size()));
}

Matrix get_matrix(std::istream& in, Index rows, Index cols) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  get_doubles(in, rm.data(), static_cast<std::size_t>(rm.size()));
  return rm;
}

} // namespace

void save_gain_table(const RiccatiGainTable& table, const std::string& path) {
  if (table.times.empty() || table.gains.size() != table.times.size())
    throw InvalidArgument("save_gain_table: malformed table");

  nlohmann::json header;
  header["format_version"] = kTableFormatVersion;
  header["tau"] = table.tau;
  header["varpi"] = table.period;
  header["beta"] = table.beta;
  header["coarse_node_count"] = table.coarse_node_count;
  header["m0"] = table.m0();
  header["num_times"] = table.times.size();

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("save_gain_table: cannot open " + tmp);
    out << header.dump() << "\n";
    put_doubles(out, table.times.data(), table.times.size());
    for (const Matrix& k : table.gains) put_matrix(out, k);
    put_matrix(out, table.Pi_tau);
    if (!out) throw IoError("save_gain_table: write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("save_gain_table: rename to " + path + " failed: " + ec.message());
}

RiccatiGainTable load_gain_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_gain_table: cannot open " + path);
  std::string header_line;
  if (!std::getline(in, header_line)) throw IoError("load_gain_table: missing header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_gain_table: bad header: " + std::string(e.what()));
  }
  if (header.value("format_version", "") != kTableFormatVersion)
    throw IoError("load_gain_table: unsupported format version in " + path);

  RiccatiGainTable table;
  table.tau = header.at("tau").get<double>();
  table.period = header.at("varpi").get<double>();
  table.beta = header.at("beta").get<double>();
  table.coarse_node_count = header.at("coarse_node_count").get<int>();
  const int m0 = header.at("m0").get<int>();
  const auto num_times = header.at("num_times").get<std::size_t>();
  if (table.coarse_node_count < 1 || m0 < 1 || num_times < 2)
    throw IoError("load_gain_table: implausible dimensions in " + path);

  table.times.resize(num_times);
  get_doubles(in, table.times.data(), num_times);
  table.gains.reserve(num_times);
  for (std::size_t i = 0; i < num_times; ++i)
    table.gains.push_back(get_matrix(in, m0, table.coarse_node_count));
  table.Pi_tau = get_matrix(in, table.coarse_node_count, table.coarse_node_count);
  return table;
}

} // namespace parastab
