#ifndef EXTINGUISH_DRIVER_HPP
#define EXTINGUISH_DRIVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "extinguish/config.hpp"
#include "extinguish/extinctlab.hpp"

namespace extinguish {

struct RunReport {
  std::string config_name;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::optional<double> extinction_time;
  double final_mass = 0.0;
  double max_identity_residual = 0.0;
  std::vector<TheoremVerdict> verdicts;
  double elapsed_seconds = 0.0;
  bool solver_failed = false;
  std::string error;
};

// Runs the simulation, evaluates every theorem verdict, writes the CSV trace
// and the JSON report to the paths named in the config.
RunReport run_from_config(const ConfigMap& cfg);

// 0: all hypothesized verdicts pass; 2: every verdict failed its hypotheses;
// 1: solver failure or a hypothesized verdict failed.
int report_exit_code(const RunReport& r);

std::string report_json(const RunReport& r);

// CLI entry points (64 on ConfigError, 1 on solver failure).
int run_command(const std::string& config_path);
int sweep_command(const std::string& pattern);
int certify_monotone_command(double m, double eps, long long samples,
                             unsigned long long seed);
int certify_ode_command(double alpha, double delta);
int certify_gn_command(int dim, int nodes, double m, int samples,
                       unsigned long long seed);

}  // namespace extinguish

#endif
