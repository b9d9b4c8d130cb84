#include "extinguish/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "extinguish/coeffset.hpp"
#include "extinguish/errors.hpp"

namespace extinguish {

namespace {

void validate_forcing(const ForcingSpec& f) {
  if (f.kind == ForcingKind::SynchronizedProfile &&
      !(f.delta > 0.5 && f.delta < 1.0))
    throw DomainError("forcing: synchronized profile needs 1/2 < delta < 1");
  if (f.kind == ForcingKind::SynchronizedProfile && !(f.eps_star >= 0.0))
    throw DomainError("forcing: eps_star must be >= 0");
  if (f.kind == ForcingKind::BoundedTail && f.m_inf < 0.0)
    throw DomainError("forcing: m_inf must be >= 0");
}

double forcing_work(const Field& f, const Field& u) {
  return u.grid.cell_volume() * u.values.dot(f.values).imag();
}

TraceRow make_row(double t, const Field& u, const Field& f_now,
                  const SatParams& sat) {
  TraceRow row;
  row.t = t;
  const double l2 = l2_norm(u);
  row.mass = l2 * l2;
  row.dissipation_power = std::pow(lp_norm(u, sat.m + 1.0), sat.m + 1.0);
  row.forcing_work = forcing_work(f_now, u);
  row.h1_seminorm = h1_seminorm(u);
  row.laplacian_l2 = l2_norm(laplacian(u));
  return row;
}

}  // namespace

double forcing_envelope(const ForcingSpec& f, double t) {
  validate_forcing(f);
  switch (f.kind) {
    case ForcingKind::Zero:
      return 0.0;
    case ForcingKind::CutoffAtT0:
      return t <= f.t0 ? f.amplitude : 0.0;
    case ForcingKind::BoundedTail:
      return t <= f.t0 ? f.amplitude : f.m_inf;
    case ForcingKind::SynchronizedProfile: {
      const double tail = std::max(f.t0 - t, 0.0);
      const double q = (2.0 * f.delta - 1.0) / (2.0 * (1.0 - f.delta));
      return std::sqrt(f.eps_star) * std::pow(tail, q);
    }
  }
  throw DomainError("forcing: unknown kind");
}

Field forcing_profile(const ForcingSpec& f, const Grid& g) {
  validate_forcing(f);
  if (f.kind == ForcingKind::Zero) return zero_field(g);
  Field P = f.profile.size() == 0 ? first_mode(g) : Field{g, f.profile};
  if (P.values.size() != g.size())
    throw DomainError("forcing: profile does not match the grid");
  if (f.kind == ForcingKind::SynchronizedProfile) {
    const double n = l2_norm(P);
    if (!(n > 0.0)) throw DomainError("forcing: profile is identically zero");
    P.values /= n;
  } else {
    const double sup = P.values.cwiseAbs().maxCoeff();
    if (!(sup > 0.0)) throw DomainError("forcing: profile is identically zero");
    P.values /= sup;
  }
  return P;
}

Field forcing_at(const ForcingSpec& f, const Grid& g, double t) {
  Field P = forcing_profile(f, g);
  P.values *= forcing_envelope(f, t);
  return P;
}

double default_eps(double m, double tau) {
  if (m == 1.0) return 0.0;
  return std::min(1e-12, tau * tau);
}

void write_csv(const MassTrace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DomainError("write_csv: cannot open " + path);
  os << "t,mass,dissipation_power,forcing_work,identity_residual,"
        "h1_seminorm,laplacian_l2\n";
  char buf[512];
  for (const TraceRow& r : trace.rows) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.mass,
                  r.dissipation_power, r.forcing_work, r.identity_residual,
                  r.h1_seminorm, r.laplacian_l2);
    os << buf;
  }
}

Field step(const Field& u, double tau, const Field& f_next, const Medium& med,
           const SatParams& sat, double tol) {
  if (!(tau > 0.0)) throw DomainError("step: tau must be > 0");
  StationaryProblem p;
  p.grid = u.grid;
  p.V = med.V;
  p.a = med.a;
  p.sat = sat;
  p.lambda = tau;
  p.F = Field{u.grid, u.values - Complex(0.0, tau) * f_next.values};
  return solve(p, tol).first;
}

RunResult run(const Field& u0, const Schedule& sched, const ForcingSpec& forcing,
              const Medium& med) {
  if (!(sched.tau > 0.0)) throw DomainError("run: tau must be > 0");
  if (!(sched.t_end > 0.0)) throw DomainError("run: t_end must be > 0");
  if (sched.stride < 1) throw DomainError("run: stride must be >= 1");
  if (!(med.m >= 0.0 && med.m <= 1.0)) throw DomainError("run: m must be in [0, 1]");
  if (classify_coefficient(med.a, med.m) == Classification::OutsideC)
    throw DomainError("run: damping coefficient outside the admissible sector");

  const double eps = sched.eps >= 0.0 ? sched.eps : default_eps(med.m, sched.tau);
  SatParams sat{med.m, eps};
  if (med.m == 0.0 && !(eps > 0.0) && sched.continuation.empty())
    throw DomainError("run: m = 0 requires eps > 0");

  const Field profile = forcing_profile(forcing, u0.grid);
  const long n_steps = std::lround(std::ceil(sched.t_end / sched.tau - 1e-9));

  RunResult out;
  out.final_field = u0;
  MassTrace& trace = out.trace;

  Field f0 = profile;
  f0.values *= forcing_envelope(forcing, 0.0);
  trace.rows.push_back(make_row(0.0, u0, f0, sat));

  Field u = u0;
  double mass_prev = trace.rows.front().mass;
  bool below = mass_prev < trace.extinction_tol;
  if (below) trace.extinction_time = 0.0;

  StationaryProblem p;
  p.grid = u0.grid;
  p.V = med.V;
  p.a = med.a;
  p.sat = sat;
  p.lambda = sched.tau;

  for (long n = 1; n <= n_steps; ++n) {
    const double t = double(n) * sched.tau;
    Field f_next = profile;
    f_next.values *= forcing_envelope(forcing, t);
    p.F = Field{u.grid, u.values - Complex(0.0, sched.tau) * f_next.values};
    const double tol = 1e-12 * (1.0 + l2_norm(p.F));
    if (sched.continuation.empty()) {
      u = solve(p, tol).first;
    } else {
      u = solve_with_continuation(p, sched.continuation, tol).u;
    }

    TraceRow row = make_row(t, u, f_next, sat);
    const double residual =
        std::abs((row.mass - mass_prev) / (2.0 * sched.tau) +
                 med.a.imag() * row.dissipation_power - row.forcing_work);
    row.identity_residual = residual;
    trace.max_identity_residual = std::max(trace.max_identity_residual, residual);

    if (row.mass < trace.extinction_tol) {
      if (!below) {
        trace.extinction_time = t;
        below = true;
      }
    } else {
      trace.extinction_time.reset();
      below = false;
    }

    if (n % sched.stride == 0 || n == n_steps) trace.rows.push_back(row);
    mass_prev = row.mass;
  }

  out.final_field = std::move(u);
  return out;
}

double contraction_check(const Field& u0, const Field& v0, const ForcingSpec& f,
                         const ForcingSpec& g, const Schedule& sched,
                         const Medium& med) {
  if (u0.grid != v0.grid)
    throw DomainError("contraction_check: fields live on different grids");
  const double eps = sched.eps >= 0.0 ? sched.eps : default_eps(med.m, sched.tau);
  const SatParams sat{med.m, eps};
  if (med.m == 0.0 && !(eps > 0.0))
    throw DomainError("contraction_check: m = 0 requires eps > 0");

  const Field pf = forcing_profile(f, u0.grid);
  const Field pg = forcing_profile(g, u0.grid);
  const long n_steps = std::lround(std::ceil(sched.t_end / sched.tau - 1e-9));

  Field u = u0, v = v0;
  double dist_prev = l2_norm(Field{u0.grid, u0.values - v0.values});
  double worst = -std::numeric_limits<double>::infinity();
  for (long n = 1; n <= n_steps; ++n) {
    const double t = double(n) * sched.tau;
    Field fn = pf, gn = pg;
    fn.values *= forcing_envelope(f, t);
    gn.values *= forcing_envelope(g, t);
    const double tol = 1e-12 * (1.0 + l2_norm(u) + l2_norm(v));
    u = step(u, sched.tau, fn, med, sat, tol);
    v = step(v, sched.tau, gn, med, sat, tol);
    const double dist = l2_norm(Field{u.grid, u.values - v.values});
    const double fg = l2_norm(Field{u.grid, fn.values - gn.values});
    worst = std::max(worst, dist - dist_prev - sched.tau * fg);
    dist_prev = dist;
  }
  return worst;
}

}  // namespace extinguish
