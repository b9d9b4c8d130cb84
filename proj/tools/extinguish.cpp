#include <CLI11.hpp>
#include <string>

#include "extinguish/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Damped nonlinear Schrodinger laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Run one simulation config");
  run->add_option("config", config_path, "config file")->required();

  std::string pattern;
  CLI::App* sweep = app.add_subcommand("sweep", "Run every config matching a glob");
  sweep->add_option("glob", pattern, "config glob pattern")->required();

  std::string mode;
  double m = 0.5, eps = 0.0, alpha = 1.0, delta = 0.75;
  long long samples = 100000;
  unsigned long long seed = 1;
  int dim = 1, nodes = 32;
  CLI::App* certify = app.add_subcommand("certify", "Run a property battery");
  certify->add_option("mode", mode, "monotone | ode | gn")->required();
  certify->add_option("--m", m, "saturation exponent");
  certify->add_option("--eps", eps, "regularization");
  certify->add_option("--samples", samples, "sample count");
  certify->add_option("--seed", seed, "rng seed");
  certify->add_option("--alpha", alpha, "ode sink coefficient");
  certify->add_option("--delta", delta, "ode exponent");
  certify->add_option("--dim", dim, "grid dimension");
  certify->add_option("--nodes", nodes, "interior nodes per axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  if (*run) return extinguish::run_command(config_path);
  if (*sweep) return extinguish::sweep_command(pattern);
  if (mode == "monotone")
    return extinguish::certify_monotone_command(m, eps, samples, seed);
  if (mode == "ode") return extinguish::certify_ode_command(alpha, delta);
  if (mode == "gn")
    return extinguish::certify_gn_command(dim, nodes, m, int(samples), seed);
  std::fprintf(stderr, "config error: unknown certify mode '%s'\n", mode.c_str());
  return 64;
}
