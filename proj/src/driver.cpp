#include "extinguish/driver.hpp"

#include <glob.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <json.hpp>

#include "extinguish/errors.hpp"
#include "extinguish/threading.hpp"

namespace extinguish {

namespace {

using nlohmann::json;

Potential build_potential(const RunConfig& rc) {
  if (rc.potential_kind == "constant")
    return constant_potential(rc.grid, rc.potential_value);
  if (rc.potential_kind == "file") {
    const Field f = load_field(rc.potential_path);
    if (f.grid != rc.grid)
      throw ConfigError("potential file grid does not match [grid]");
    Potential V = zero_potential(rc.grid);
    V.v1 = f.values.real();
    return V;
  }
  return zero_potential(rc.grid);
}

Field build_initial(const RunConfig& rc) {
  if (!rc.initial_path.empty()) {
    Field u0 = load_field(rc.initial_path);
    if (u0.grid != rc.grid)
      throw ConfigError("initial field grid does not match [grid]");
    return u0;
  }
  Field u0 = first_mode(rc.grid);
  u0.values *= rc.initial_amplitude;
  return u0;
}

json verdict_json(const TheoremVerdict& v) {
  return json{{"theorem_id", to_string(v.theorem_id)},
              {"hypotheses_ok", v.hypotheses_ok},
              {"predicted", v.predicted},
              {"observed", v.observed},
              {"pass", v.pass},
              {"notes", v.notes}};
}

}  // namespace

RunReport run_from_config(const ConfigMap& cfg) {
  const RunConfig rc = make_run_config(cfg);
  RunReport report;
  report.config_name = cfg.name;
  for (const auto& [key, value] : cfg.values) report.config_echo.emplace_back(key, value);

  const auto t_start = std::chrono::steady_clock::now();
  Medium med{build_potential(rc), rc.a, rc.m};
  const Field u0 = build_initial(rc);

  RunResult result;
  try {
    result = run(u0, rc.schedule, rc.forcing, med);
  } catch (const NonConvergence& e) {
    report.solver_failed = true;
    report.error = e.what();
    return report;
  }

  const MassTrace& trace = result.trace;
  report.extinction_time = trace.extinction_time;
  report.final_mass = trace.rows.empty() ? 0.0 : trace.rows.back().mass;
  report.max_identity_residual = trace.max_identity_residual;

  VerdictContext ctx;
  ctx.coeff = make_coefficient_context(rc.a, rc.m);
  ctx.N = rc.grid.dim;
  ctx.forcing = rc.forcing;
  ctx.tau = rc.schedule.tau;
  const double c_gn_grad =
      estimate_gn_constant(rc.grid, rc.m, rc.gn_samples, rc.seed, GnForm::Gradient);
  const double c_gn_lap =
      estimate_gn_constant(rc.grid, rc.m, rc.gn_samples, rc.seed, GnForm::Laplacian);
  for (TheoremId id :
       {TheoremId::TStarH1, TheoremId::TStarH2, TheoremId::DecayExp,
        TheoremId::DecayPoly, TheoremId::Synchronized, TheoremId::MassToZero}) {
    ctx.ell = id == TheoremId::TStarH2 ? 2 : 1;
    ctx.c_gn = id == TheoremId::TStarH2 ? c_gn_lap : c_gn_grad;
    report.verdicts.push_back(verdict(trace, id, ctx));
  }
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  write_csv(trace, rc.trace_path);
  std::ofstream os(rc.report_path);
  if (!os) throw ConfigError("cannot open report path " + rc.report_path);
  os << report_json(report) << "\n";
  return report;
}

int report_exit_code(const RunReport& r) {
  if (r.solver_failed) return 1;
  bool any_applicable = false;
  bool all_pass = true;
  for (const TheoremVerdict& v : r.verdicts) {
    if (!v.hypotheses_ok) continue;
    any_applicable = true;
    all_pass = all_pass && v.pass;
  }
  if (!any_applicable) return 2;
  return all_pass ? 0 : 1;
}

std::string report_json(const RunReport& r) {
  json j;
  j["config"] = json::object();
  for (const auto& [key, value] : r.config_echo) j["config"][key] = value;
  j["trace_summary"] = {
      {"extinction_time",
       r.extinction_time ? json(*r.extinction_time) : json(nullptr)},
      {"final_mass", r.final_mass},
      {"max_identity_residual", r.max_identity_residual}};
  j["verdicts"] = json::array();
  for (const TheoremVerdict& v : r.verdicts) j["verdicts"].push_back(verdict_json(v));
  j["timings"] = {{"elapsed_seconds", r.elapsed_seconds}};
  return j.dump(2);
}

int run_command(const std::string& config_path) {
  try {
    const ConfigMap cfg = parse_config_file(config_path);
    const RunReport report = run_from_config(cfg);
    if (report.solver_failed) {
      std::cerr << config_path << ": solver failure: " << report.error << "\n";
      return 1;
    }
    std::cout << report_json(report) << "\n";
    return report_exit_code(report);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  } catch (const std::exception& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 1;
  }
}

int sweep_command(const std::string& pattern) {
  glob_t matches{};
  const int rc = glob(pattern.c_str(), 0, nullptr, &matches);
  if (rc == GLOB_NOMATCH) {
    std::cerr << "config error: no configs match '" << pattern << "'\n";
    return 64;
  }
  if (rc != 0) {
    globfree(&matches);
    std::cerr << "config error: cannot expand '" << pattern << "'\n";
    return 64;
  }
  std::vector<std::string> paths(matches.gl_pathv,
                                 matches.gl_pathv + matches.gl_pathc);
  globfree(&matches);

  std::vector<int> codes(paths.size(), 0);
  std::vector<std::string> summaries(paths.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(worker_count(), int(paths.size()));
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= paths.size()) return;
      try {
        const ConfigMap cfg = parse_config_file(paths[i]);
        const RunReport report = run_from_config(cfg);
        codes[i] = report.solver_failed ? 1 : report_exit_code(report);
        if (report.solver_failed) {
          summaries[i] = "solver failure: " + report.error;
        } else {
          char buf[128];
          std::snprintf(buf, sizeof buf, "exit %d, final mass %.17g", codes[i],
                        report.final_mass);
          summaries[i] = buf;
        }
      } catch (const ConfigError& e) {
        codes[i] = 64;
        summaries[i] = std::string("config error: ") + e.what();
      } catch (const std::exception& e) {
        codes[i] = 1;
        summaries[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();

  int worst = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::cout << paths[i] << ": " << summaries[i] << "\n";
    if (codes[i] == 1) worst = 1;
    if (codes[i] == 64 && worst != 1) worst = 64;
    if (codes[i] == 2 && worst == 0) worst = 2;
  }
  return worst;
}

int certify_monotone_command(double m, double eps, long long samples,
                             unsigned long long seed) {
  if (samples < 1) {
    std::cerr << "config error: samples must be >= 1\n";
    return 64;
  }
  try {
    const CertificationReport r = certify_region(SatParams{m, eps}, samples, seed);
    std::cout << to_text(r);
    const bool ok = r.min_monotone_defect >= -1e-12 &&
                    r.min_sector_defect >= -1e-12 &&
                    r.min_damping_defect >= -1e-12 &&
                    r.max_ratio_over_bound <= 1.0 + 1e-10;
    std::cout << "pass = " << (ok ? "true" : "false") << "\n";
    return ok ? 0 : 1;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  }
}

int certify_ode_command(double alpha, double delta) {
  try {
    const double T = closed_form_extinction_time(1.0, alpha, delta);
    if (!std::isfinite(T)) {
      std::cerr << "config error: delta = 1 has no finite extinction time\n";
      return 64;
    }
    OdeProblem p;
    p.y0 = 1.0;
    p.alpha = alpha;
    p.delta = delta;
    p.t_end = 2.0 * T;
    const double dt = 1e-4;
    const OdeTrace trace = ode_solve(p, dt);
    double max_err = 0.0;
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
      const double s = 1.0 - alpha * (1.0 - delta) * trace.t[i];
      const double exact = s > 0.0 ? std::pow(s, 1.0 / (1.0 - delta)) : 0.0;
      max_err = std::max(max_err, std::abs(trace.y[i] - exact));
    }
    const double t_err =
        trace.extinction_time ? std::abs(*trace.extinction_time - T) : T;
    std::printf("closed_form_extinction_time = %.17g\n", T);
    std::printf("max_trajectory_error = %.17g\n", max_err);
    std::printf("extinction_time_error = %.17g\n", t_err);
    const bool ok = max_err <= 1e-6 && t_err <= 1e-6;
    std::printf("pass = %s\n", ok ? "true" : "false");
    return ok ? 0 : 1;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  }
}

int certify_gn_command(int dim, int nodes, double m, int samples,
                       unsigned long long seed) {
  if (samples < 1) {
    std::cerr << "config error: samples must be >= 1\n";
    return 64;
  }
  try {
    const Grid g = make_grid(dim, nodes, 1.0);
    const double grad = estimate_gn_constant(g, m, samples, seed, GnForm::Gradient);
    const double lap = estimate_gn_constant(g, m, samples, seed, GnForm::Laplacian);
    std::printf("c_gn_gradient = %.17g\n", grad);
    std::printf("c_gn_laplacian = %.17g\n", lap);
    const bool ok = grad > 0.0 && lap > 0.0 && std::isfinite(grad) && std::isfinite(lap);
    std::printf("pass = %s\n", ok ? "true" : "false");
    return ok ? 0 : 1;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  }
}

}  // namespace extinguish
