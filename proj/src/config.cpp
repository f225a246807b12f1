#include "parastab/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <system_error>

#include "parastab/errors.hpp"

namespace parastab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    throw InvalidArgument("config: key '" + key + "' has non-numeric value '" + value + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    throw InvalidArgument("config: key '" + key + "' has non-integer value '" + value + "'");
  return out;
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap read_sections(const std::string& text) {
  SectionMap sections;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw InvalidArgument("config: malformed section header at line " +
                              std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty())
      throw InvalidArgument("config: expected 'key = value' at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw InvalidArgument("config: empty key or value at line " + std::to_string(lineno));
    if (!sections[section].emplace(key, value).second)
      throw InvalidArgument("config: duplicate key '" + section + "." + key + "'");
  }
  return sections;
}

void validate(const ExperimentConfig& c) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw InvalidArgument(std::string("config: ") + name + " must be positive");
  };
  if (c.coefficients != "paper2d" && c.coefficients != "autonomous_const" &&
      c.coefficients != "pure_diffusion")
    throw InvalidArgument("config: unknown coefficient family '" + c.coefficients + "'");
  if (c.law != "none" && c.law != "oblique" && c.law != "riccati")
    throw InvalidArgument("config: unknown law '" + c.law + "'");
  if (c.base_n < 1) throw InvalidArgument("config: base_n must be >= 1");
  if (c.refine < 0) throw InvalidArgument("config: refine must be >= 0");
  if (c.m < 1) throw InvalidArgument("config: m must be >= 1");
  if (!(c.r > 0.0) || c.r > 1.0) throw InvalidArgument("config: r must lie in (0, 1]");
  positive(c.nu, "nu");
  positive(c.beta, "beta");
  positive(c.varpi, "varpi");
  positive(c.k_ric, "k_ric");
  positive(c.horizon, "horizon");
  positive(c.step, "step");
  positive(c.delta_s, "delta_s");
  if (c.delta_s > 1.0) throw InvalidArgument("config: delta_s must lie in (0, 1]");
  if (c.tau < 0.0) throw InvalidArgument("config: tau must be nonnegative");
  if (c.k_ric > c.varpi) throw InvalidArgument("config: k_ric must not exceed varpi");
  if (c.n_max < 1) throw InvalidArgument("config: n_max must be >= 1");
  if (c.epsilon && !(*c.epsilon > 0.0))
    throw InvalidArgument("config: epsilon must be positive");
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  const SectionMap sections = read_sections(text);
  ExperimentConfig c;

  for (const auto& [section, entries] : sections) {
    for (const auto& [key, value] : entries) {
      const std::string where = section + "." + key;
      if (section == "system") {
        if (key == "coefficients") c.coefficients = value;
        else if (key == "c") c.c = parse_double(where, value);
        else if (key == "nu") c.nu = parse_double(where, value);
        else throw InvalidArgument("config: unknown key '" + where + "'");
      } else if (section == "mesh") {
        if (key == "base_n") c.base_n = parse_int(where, value);
        else if (key == "refine") c.refine = parse_int(where, value);
        else throw InvalidArgument("config: unknown key '" + where + "'");
      } else if (section == "actuators") {
        if (key == "m") c.m = parse_int(where, value);
        else if (key == "r") c.r = parse_double(where, value);
        else throw InvalidArgument("config: unknown key '" + where + "'");
      } else if (section == "feedback") {
        if (key == "law") c.law = value;
        else if (key == "lambda") c.lambda = parse_double(where, value);
        else if (key == "beta") c.beta = parse_double(where, value);
        else if (key == "mu_bar") c.mu_bar = parse_double(where, value);
        else if (key == "k_ric") c.k_ric = parse_double(where, value);
        else if (key == "tau") c.tau = parse_double(where, value);
        else if (key == "varpi") c.varpi = parse_double(where, value);
        else if (key == "epsilon") c.epsilon = parse_double(where, value);
        else if (key == "n_max") c.n_max = parse_int(where, value);
        else if (key == "delta_s") c.delta_s = parse_double(where, value);
        else throw InvalidArgument("config: unknown key '" + where + "'");
      } else if (section == "simulation") {
        if (key == "horizon") c.horizon = parse_double(where, value);
        else if (key == "step") c.step = parse_double(where, value);
        else throw InvalidArgument("config: unknown key '" + where + "'");
      } else if (section == "outputs") {
        if (key == "dir") c.out_dir = value;
        else if (key == "table") c.table_path = value;
        else throw InvalidArgument("config: unknown key '" + where + "'");
      } else {
        throw InvalidArgument("config: unknown section '" + section + "'");
      }
    }
  }

  // The benchmark coefficients are pi/6-periodic by construction.
  if (c.coefficients == "paper2d") c.varpi = std::numbers::pi / 6.0;
  validate(c);
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
  }
  return std::string(buf, ptr);
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[system]\n"
      << "coefficients = " << c.coefficients << "\n"
      << "c = " << format_double(c.c) << "\n"
      << "nu = " << format_double(c.nu) << "\n"
      << "\n[mesh]\n"
      << "base_n = " << c.base_n << "\n"
      << "refine = " << c.refine << "\n"
      << "\n[actuators]\n"
      << "m = " << c.m << "\n"
      << "r = " << format_double(c.r) << "\n"
      << "\n[feedback]\n"
      << "law = " << c.law << "\n"
      << "lambda = " << format_double(c.lambda) << "\n"
      << "beta = " << format_double(c.beta) << "\n"
      << "mu_bar = " << format_double(c.mu_bar) << "\n"
      << "k_ric = " << format_double(c.k_ric) << "\n"
      << "tau = " << format_double(c.tau) << "\n"
      << "varpi = " << format_double(c.varpi) << "\n";
  if (c.epsilon) out << "epsilon = " << format_double(*c.epsilon) << "\n";
  out << "n_max = " << c.n_max << "\n"
      << "delta_s = " << format_double(c.delta_s) << "\n"
      << "\n[simulation]\n"
      << "horizon = " << format_double(c.horizon) << "\n"
      << "step = " << format_double(c.step) << "\n"
      << "\n[outputs]\n"
      << "dir = " << c.out_dir << "\n";
  if (!c.table_path.empty()) out << "table = " << c.table_path << "\n";
  return out.str();
}

} // namespace parastab
