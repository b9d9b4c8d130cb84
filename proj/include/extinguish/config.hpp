#ifndef EXTINGUISH_CONFIG_HPP
#define EXTINGUISH_CONFIG_HPP

#include <map>
#include <string>

#include "extinguish/coeffset.hpp"
#include "extinguish/evolve.hpp"

namespace extinguish {

// Flat `key = value` settings with [section] headers; keys are stored as
// "section.key". Unknown keys, duplicates and malformed lines are rejected
// with a line diagnostic (ConfigError).
struct ConfigMap {
  std::string name;
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
};

ConfigMap parse_config_text(const std::string& text, const std::string& name);
ConfigMap parse_config_file(const std::string& path);

struct RunConfig {
  Grid grid;
  Complex a;
  double m = 1.0;
  std::string potential_kind = "zero";  // zero | constant | file
  double potential_value = 0.0;
  std::string potential_path;
  ForcingSpec forcing;
  Schedule schedule;
  double initial_amplitude = 1.0;
  std::string initial_path;  // optional field file overriding the sine mode
  std::string trace_path = "trace.csv";
  std::string report_path = "report.json";
  std::uint64_t seed = 1;
  int gn_samples = 64;  // interpolation-constant sampling budget
};

RunConfig make_run_config(const ConfigMap& cfg);

}  // namespace extinguish

#endif
