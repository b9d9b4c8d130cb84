#include "extinguish/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "extinguish/errors.hpp"

namespace extinguish {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& why) {
  throw ConfigError(name + ":" + std::to_string(line) + ": " + why);
}

[[noreturn]] void fail_key(const ConfigMap& cfg, const std::string& key,
                           const std::string& why) {
  const auto it = cfg.lines.find(key);
  const int line = it != cfg.lines.end() ? it->second : 0;
  throw ConfigError(cfg.name + ":" + std::to_string(line) + ": field '" + key +
                    "': " + why);
}

}  // namespace

std::string ConfigMap::get_string(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end())
    throw ConfigError(name + ": missing required field '" + key + "'");
  return it->second;
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail_key(*this, key, "'" + s + "' is not a number");
  }
  if (used != s.size()) fail_key(*this, key, "'" + s + "' is not a number");
  return v;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long ConfigMap::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    fail_key(*this, key, "'" + s + "' is not an integer");
  }
  if (used != s.size()) fail_key(*this, key, "'" + s + "' is not an integer");
  return v;
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

ConfigMap parse_config_text(const std::string& text, const std::string& name) {
  ConfigMap cfg;
  cfg.name = name;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(name, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(name, lineno, "empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(name, lineno, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(name, lineno, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values.count(full))
      fail(name, lineno, "duplicate field '" + full + "'");
    cfg.values[full] = value;
    cfg.lines[full] = lineno;
  }
  return cfg;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path);
}

RunConfig make_run_config(const ConfigMap& cfg) {
  static const std::set<std::string> known = {
      "grid.dim",          "grid.nodes",        "grid.extent",
      "coefficient.a_re",  "coefficient.a_im",  "coefficient.m",
      "potential.kind",    "potential.value",   "potential.path",
      "forcing.kind",      "forcing.t0",        "forcing.amplitude",
      "forcing.m_inf",     "forcing.eps_star",  "forcing.delta",
      "schedule.tau",      "schedule.t_end",    "schedule.eps",
      "schedule.stride",   "schedule.continuation",
      "initial.amplitude", "initial.path",
      "output.trace",      "output.report",     "run.seed",
      "run.gn_samples",
  };
  for (const auto& [key, value] : cfg.values)
    if (!known.count(key)) fail_key(cfg, key, "unknown field");

  RunConfig rc;
  const long dim = cfg.get_int("grid.dim");
  const long nodes = cfg.get_int("grid.nodes");
  const double extent = cfg.get_double("grid.extent", 1.0);
  if (dim < 1 || dim > 3) fail_key(cfg, "grid.dim", "must be 1, 2 or 3");
  if (nodes < 1) fail_key(cfg, "grid.nodes", "must be >= 1");
  if (!(extent > 0.0)) fail_key(cfg, "grid.extent", "must be > 0");
  rc.grid = make_grid(int(dim), int(nodes), extent);

  rc.a = Complex(cfg.get_double("coefficient.a_re", 0.0),
                 cfg.get_double("coefficient.a_im"));
  rc.m = cfg.get_double("coefficient.m");
  if (!(rc.m >= 0.0 && rc.m <= 1.0))
    fail_key(cfg, "coefficient.m", "must lie in [0, 1]");
  if (classify_coefficient(rc.a, rc.m) == Classification::OutsideC)
    fail_key(cfg, "coefficient.a_im",
             "coefficient lies outside the admissible sector");

  rc.potential_kind = cfg.get_string("potential.kind", "zero");
  if (rc.potential_kind == "constant") {
    rc.potential_value = cfg.get_double("potential.value");
  } else if (rc.potential_kind == "file") {
    rc.potential_path = cfg.get_string("potential.path");
  } else if (rc.potential_kind != "zero") {
    fail_key(cfg, "potential.kind", "must be zero, constant or file");
  }

  const std::string fk = cfg.get_string("forcing.kind", "zero");
  if (fk == "zero") {
    rc.forcing.kind = ForcingKind::Zero;
  } else if (fk == "cutoff") {
    rc.forcing.kind = ForcingKind::CutoffAtT0;
    rc.forcing.t0 = cfg.get_double("forcing.t0");
    rc.forcing.amplitude = cfg.get_double("forcing.amplitude");
  } else if (fk == "bounded_tail") {
    rc.forcing.kind = ForcingKind::BoundedTail;
    rc.forcing.t0 = cfg.get_double("forcing.t0");
    rc.forcing.amplitude = cfg.get_double("forcing.amplitude");
    rc.forcing.m_inf = cfg.get_double("forcing.m_inf");
  } else if (fk == "synchronized") {
    rc.forcing.kind = ForcingKind::SynchronizedProfile;
    rc.forcing.t0 = cfg.get_double("forcing.t0");
    rc.forcing.eps_star = cfg.get_double("forcing.eps_star");
    rc.forcing.delta = cfg.get_double("forcing.delta");
    if (!(rc.forcing.delta > 0.5 && rc.forcing.delta < 1.0))
      fail_key(cfg, "forcing.delta", "must lie in (1/2, 1)");
  } else {
    fail_key(cfg, "forcing.kind",
             "must be zero, cutoff, bounded_tail or synchronized");
  }

  rc.schedule.tau = cfg.get_double("schedule.tau");
  rc.schedule.t_end = cfg.get_double("schedule.t_end");
  rc.schedule.eps = cfg.get_double("schedule.eps", -1.0);
  rc.schedule.stride = int(cfg.get_int("schedule.stride", 1));
  if (cfg.has("schedule.continuation")) {
    std::istringstream ss(cfg.get_string("schedule.continuation"));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      try {
        rc.schedule.continuation.push_back(std::stod(tok));
      } catch (const std::exception&) {
        fail_key(cfg, "schedule.continuation", "'" + tok + "' is not a number");
      }
    }
    if (rc.schedule.continuation.empty())
      fail_key(cfg, "schedule.continuation", "must list at least one value");
  }
  if (!(rc.schedule.tau > 0.0)) fail_key(cfg, "schedule.tau", "must be > 0");
  if (!(rc.schedule.t_end > 0.0)) fail_key(cfg, "schedule.t_end", "must be > 0");
  if (rc.schedule.stride < 1) fail_key(cfg, "schedule.stride", "must be >= 1");

  rc.initial_amplitude = cfg.get_double("initial.amplitude", 1.0);
  rc.initial_path = cfg.get_string("initial.path", "");
  rc.trace_path = cfg.get_string("output.trace", "trace.csv");
  rc.report_path = cfg.get_string("output.report", "report.json");
  rc.seed = std::uint64_t(cfg.get_int("run.seed", 1));
  rc.gn_samples = int(cfg.get_int("run.gn_samples", 64));
  if (rc.gn_samples < 0) fail_key(cfg, "run.gn_samples", "must be >= 0");
  return rc;
}

}  // namespace extinguish
