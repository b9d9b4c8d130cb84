#include "extinguish/extinctlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "extinguish/errors.hpp"

namespace extinguish {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sink_step(double y, double alpha, double delta, double dt) {
  if (delta == 1.0) return y * std::exp(-alpha * dt);
  const double s = std::pow(y, 1.0 - delta) - alpha * (1.0 - delta) * dt;
  return s > 0.0 ? std::pow(s, 1.0 / (1.0 - delta)) : 0.0;
}

}  // namespace

double closed_form_extinction_time(double y0, double alpha, double delta) {
  if (!(alpha > 0.0)) throw DomainError("extinction time: alpha must be > 0");
  if (!(delta >= 0.5 && delta <= 1.0))
    throw DomainError("extinction time: delta must lie in [1/2, 1]");
  if (delta == 1.0) return kInf;
  return std::pow(y0, 1.0 - delta) / (alpha * (1.0 - delta));
}

OdeTrace ode_solve(const OdeProblem& p, double dt) {
  if (!(dt > 0.0)) throw DomainError("ode_solve: dt must be > 0");
  if (!(p.delta >= 0.5 && p.delta <= 1.0))
    throw DomainError("ode_solve: delta must lie in [1/2, 1]");
  if (!(p.alpha > 0.0)) throw DomainError("ode_solve: alpha must be > 0");
  if (!(p.y0 >= 0.0) || !std::isfinite(p.y0))
    throw DomainError("ode_solve: y0 must be finite and >= 0");
  if (!(p.t_end > 0.0)) throw DomainError("ode_solve: t_end must be > 0");

  const long n_steps = std::lround(std::ceil(p.t_end / dt - 1e-9));
  OdeTrace trace;
  trace.t.reserve(n_steps + 1);
  trace.y.reserve(n_steps + 1);
  trace.t.push_back(0.0);
  trace.y.push_back(p.y0);
  if (p.y0 == 0.0) trace.extinction_time = 0.0;

  double y = p.y0;
  for (long n = 1; n <= n_steps; ++n) {
    const double t = double(n) * dt;
    const double env = p.envelope ? p.envelope(t) : 0.0;
    if (env < 0.0) throw DomainError("ode_solve: envelope must be >= 0");

    const double ys = sink_step(y, p.alpha, p.delta, dt);
    if (ys == 0.0 && env == 0.0 && y > 0.0 && !trace.extinction_time)
      trace.extinction_time = (t - dt) + closed_form_extinction_time(y, p.alpha, p.delta);

    double ynext;
    if (p.form == OdeForm::Additive) {
      ynext = ys + dt * env;
    } else {
      const double root = (dt * env + std::sqrt(dt * dt * env * env + 4.0 * ys)) / 2.0;
      ynext = root * root;
    }
    if (ynext < 1e-300) ynext = 0.0;

    if (ynext == 0.0) {
      if (!trace.extinction_time) trace.extinction_time = t;
    } else {
      trace.extinction_time.reset();
    }
    y = ynext;
    trace.t.push_back(t);
    trace.y.push_back(y);
  }
  return trace;
}

EpsilonStarBranches epsilon_star_branches(double alpha, double delta) {
  if (!(delta > 0.5 && delta < 1.0))
    throw DomainError("epsilon_star: delta must lie in (1/2, 1)");
  if (!(alpha > 0.0)) throw DomainError("epsilon_star: alpha must be > 0");
  const double d = delta;
  EpsilonStarBranches b;
  b.envelope_branch = std::pow(2.0 * d - 1.0, -(2.0 * d - 1.0) / d) *
                      std::pow(alpha * d, 1.0 / (1.0 - d)) *
                      std::pow(1.0 - d, (2.0 * d - 1.0) / (d * (1.0 - d)));
  b.product_branch = alpha * d * (1.0 - d);
  b.value = std::min(b.envelope_branch, b.product_branch);
  return b;
}

double epsilon_star(double alpha, double delta) {
  return epsilon_star_branches(alpha, delta).value;
}

namespace {

double gn_ratio(const Field& u, double m, GnForm form) {
  const int N = u.grid.dim;
  const int ell = form == GnForm::Gradient ? 1 : 2;
  const double l2 = l2_norm(u);
  if (!(l2 > 0.0)) return 0.0;
  const double two_delta = (double(N + 2 * ell) - m * double(N - 2 * ell)) / (2.0 * ell);
  const double du =
      form == GnForm::Gradient ? h1_seminorm(u) : l2_norm(laplacian(u));
  const double den = std::pow(lp_norm(u, m + 1.0), m + 1.0) *
                     std::pow(du, double(N) * (1.0 - m) / (2.0 * ell));
  if (!(den > 0.0)) return 0.0;
  return std::pow(l2, two_delta) / den;
}

Field gaussian_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Field u = zero_field(g);
  for (Eigen::Index j = 0; j < u.values.size(); ++j)
    u.values[j] = Complex(normal(rng), normal(rng));
  return u;
}

void smooth(Field& u, int rounds) {
  const double h2 = u.grid.spacing * u.grid.spacing;
  for (int r = 0; r < rounds; ++r) {
    Field lap = laplacian(u);
    u.values += (h2 / 8.0) * lap.values;
  }
}

}  // namespace

double estimate_gn_constant(const Grid& grid, double m, int samples,
                            std::uint64_t seed, GnForm form) {
  if (!(m >= 0.0 && m <= 1.0))
    throw DomainError("estimate_gn_constant: m must lie in [0, 1]");
  if (samples < 0) throw DomainError("estimate_gn_constant: samples must be >= 0");
  if (m == 1.0) return 1.0;  // the inequality degenerates to an identity

  // Deterministic local ascent from a fixed starting field, independent of
  // the sample count so the estimate is non-decreasing in `samples`.
  std::mt19937_64 ascent_rng(seed ^ 0x6a09e667f3bcc908ull);
  Field u = first_mode(grid);
  double best = gn_ratio(u, m, form);
  double sigma = 0.5;
  for (int it = 0; it < 80; ++it) {
    Field trial = u;
    Field d = gaussian_field(grid, ascent_rng);
    trial.values += sigma * d.values;
    const double r = gn_ratio(trial, m, form);
    if (r > best) {
      best = r;
      u = std::move(trial);
    } else {
      sigma *= 0.8;
    }
  }

  for (int i = 0; i < samples; ++i) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + std::uint64_t(i) + 1);
    Field s = gaussian_field(grid, rng);
    if (i % 2 == 1) smooth(s, 3);
    best = std::max(best, gn_ratio(s, m, form));
  }
  return best;
}

const char* to_string(TheoremId id) {
  switch (id) {
    case TheoremId::TStarH1: return "T_star_H1";
    case TheoremId::TStarH2: return "T_star_H2";
    case TheoremId::DecayExp: return "decay_exp";
    case TheoremId::DecayPoly: return "decay_poly";
    case TheoremId::Synchronized: return "synchronized";
    case TheoremId::MassToZero: return "mass_to_zero";
  }
  return "unknown";
}

LinearFit affine_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InsufficientData("affine_fit: need at least two points");
  const double n = double(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  } else {
    fit.r_squared = 1.0;
  }
  return fit;
}

namespace {

struct FitWindow {
  std::vector<double> t;
  std::vector<double> norm;  // ||u||, not mass
};

FitWindow usable_rows(const MassTrace& trace, double t_lo, double t_hi) {
  FitWindow w;
  for (const TraceRow& r : trace.rows) {
    if (r.t < t_lo || r.t > t_hi) continue;
    // Last mass decade above the extinction threshold is roundoff noise.
    if (!(r.mass > 10.0 * trace.extinction_tol)) continue;
    w.t.push_back(r.t);
    w.norm.push_back(std::sqrt(r.mass));
  }
  return w;
}

double rms_misfit(const std::vector<double>& x, const std::vector<double>& y,
                  const LinearFit& fit) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    acc += r * r;
  }
  return std::sqrt(acc / double(x.size()));
}

// 1 - R^2 of the affine fit of ||u||^{-1/q} against t: zero when the norm
// decays exactly like t^{-q}.
double poly_objective(const FitWindow& w, double q) {
  std::vector<double> z(w.norm.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::pow(w.norm[i], -1.0 / q);
  return 1.0 - affine_fit(w.t, z).r_squared;
}

}  // namespace

DecayFit fit_decay(const MassTrace& trace, double t_lo, double t_hi,
                   DecayModel model) {
  const FitWindow w = usable_rows(trace, t_lo, t_hi);
  if (w.t.size() < 10)
    throw InsufficientData("fit_decay: fewer than 10 usable rows in the window");

  DecayFit out;
  if (model == DecayModel::Exponential) {
    std::vector<double> logn(w.norm.size());
    for (std::size_t i = 0; i < logn.size(); ++i) logn[i] = std::log(w.norm[i]);
    const LinearFit fit = affine_fit(w.t, logn);
    out.rate = -fit.slope;
    out.amplitude = std::exp(fit.intercept);
    out.residual = rms_misfit(w.t, logn, fit);
    return out;
  }

  // Golden-section search over the exponent q on a log scale.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(0.05), hi = std::log(50.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = poly_objective(w, std::exp(c)), fd = poly_objective(w, std::exp(d));
  for (int it = 0; it < 200; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = poly_objective(w, std::exp(c));
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = poly_objective(w, std::exp(d));
    }
  }
  const double q = std::exp((lo + hi) / 2.0);
  out.exponent = q;
  std::vector<double> z(w.norm.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::pow(w.norm[i], -1.0 / q);
  const LinearFit fit = affine_fit(w.t, z);
  out.amplitude = fit.slope > 0.0 ? std::pow(fit.slope, -q) : 0.0;
  out.residual = rms_misfit(w.t, z, fit);
  return out;
}

ExtinctionExponents make_exponents(const VerdictContext& ctx, const MassTrace& trace) {
  ExtinctionExponents e;
  e.N = ctx.N;
  e.ell = ctx.ell;
  const double m = ctx.coeff.m;
  e.delta = extinction_exponent(ctx.N, ctx.ell, m);

  double S = 0.0;
  for (const TraceRow& r : trace.rows)
    S = std::max(S, ctx.ell == 1 ? r.h1_seminorm : r.laplacian_l2);

  const double Ia = ctx.coeff.a.imag();
  const double sup_exp = double(ctx.N) * (1.0 - m) / (2.0 * ctx.ell);
  e.alpha = Ia / ctx.c_gn * std::pow(S, -sup_exp);

  double tail_sup_f = 0.0;
  if (ctx.forcing.kind == ForcingKind::BoundedTail) tail_sup_f = ctx.forcing.m_inf;
  e.omega_f = Ia - tail_sup_f;
  e.beta = 2.0 * e.omega_f / ctx.c_gn *
           std::pow(S, -double(ctx.N) / (2.0 * ctx.ell));
  return e;
}

namespace {

double mass_at(const MassTrace& trace, double t) {
  for (const TraceRow& r : trace.rows)
    if (r.t >= t - 1e-12) return r.mass;
  return trace.rows.empty() ? 0.0 : trace.rows.back().mass;
}

TheoremVerdict fail_hypotheses(TheoremId id, const std::string& why) {
  TheoremVerdict v;
  v.theorem_id = id;
  v.hypotheses_ok = false;
  v.pass = false;
  v.notes = why;
  return v;
}

}  // namespace

TheoremVerdict verdict(const MassTrace& trace, TheoremId id,
                       const VerdictContext& ctx) {
  const double m = ctx.coeff.m;
  const double Ia = ctx.coeff.a.imag();
  if (trace.rows.empty()) return fail_hypotheses(id, "empty trace");
  if (ctx.coeff.classification == Classification::OutsideC)
    return fail_hypotheses(id, "damping coefficient outside the admissible sector");
  if (!(Ia > 0.0)) return fail_hypotheses(id, "Im(a) must be positive");

  TheoremVerdict v;
  v.theorem_id = id;
  v.hypotheses_ok = true;
  const double y0 = trace.rows.front().mass;
  const double t_obs =
      trace.extinction_time ? *trace.extinction_time : kInf;

  switch (id) {
    case TheoremId::TStarH1:
    case TheoremId::TStarH2: {
      const int ell = id == TheoremId::TStarH1 ? 1 : 2;
      VerdictContext c = ctx;
      c.ell = ell;
      if (m >= 1.0)
        return fail_hypotheses(id, "m = 1 has no finite-time extinction");
      if (ctx.N >= 2 * ell)
        return fail_hypotheses(id, "needs N < 2*ell for a superlinear mass sink");
      const bool tail_dies = ctx.forcing.kind == ForcingKind::Zero ||
                             ctx.forcing.kind == ForcingKind::CutoffAtT0 ||
                             ctx.forcing.kind == ForcingKind::SynchronizedProfile;
      const ExtinctionExponents e = make_exponents(c, trace);
      double predicted;
      if (m == 0.0) {
        if (!(e.omega_f > 0.0))
          return fail_hypotheses(id, "needs sup|f| < Im(a) on the tail");
        const double t0 = tail_dies || ctx.forcing.kind == ForcingKind::BoundedTail
                              ? ctx.forcing.t0
                              : 0.0;
        predicted = t0 + closed_form_extinction_time(mass_at(trace, t0), e.beta, e.delta);
      } else {
        if (!tail_dies)
          return fail_hypotheses(id, "needs forcing that vanishes after T0");
        const double t0 = ctx.forcing.kind == ForcingKind::Zero ? 0.0 : ctx.forcing.t0;
        predicted =
            t0 + closed_form_extinction_time(mass_at(trace, t0), 2.0 * e.alpha, e.delta);
      }
      v.predicted = predicted;
      v.observed = t_obs;
      v.pass = trace.extinction_time.has_value() && t_obs <= predicted * (1.0 + 1e-12);
      v.notes = "bound built from a sampled lower bound on the interpolation "
                "constant; it may understate the continuum constant";
      return v;
    }

    case TheoremId::DecayExp: {
      if (m != 1.0) return fail_hypotheses(id, "exponential law needs m = 1");
      if (ctx.forcing.kind != ForcingKind::Zero &&
          ctx.forcing.kind != ForcingKind::CutoffAtT0)
        return fail_hypotheses(id, "needs forcing that vanishes after T0");
      const double t0 = ctx.forcing.kind == ForcingKind::Zero ? 0.0 : ctx.forcing.t0;
      v.predicted = Ia;
      try {
        const DecayFit fit =
            fit_decay(trace, t0, trace.rows.back().t, DecayModel::Exponential);
        v.observed = fit.rate;
        v.pass = std::abs(fit.rate - Ia) <= 0.01 * Ia;
      } catch (const InsufficientData& e) {
        v.observed = 0.0;
        v.pass = false;
        v.notes = e.what();
      }
      return v;
    }

    case TheoremId::DecayPoly: {
      const int ell = ctx.ell;
      if (!(m < 1.0)) return fail_hypotheses(id, "polynomial decay needs m < 1");
      if (ctx.N <= 2 * ell)
        return fail_hypotheses(id, "polynomial decay needs N > 2*ell");
      const double t0 = ctx.forcing.kind == ForcingKind::Zero ? 0.0 : ctx.forcing.t0;
      v.predicted = 2.0 * ell / ((1.0 - m) * double(ctx.N - 2 * ell));
      try {
        const DecayFit fit =
            fit_decay(trace, t0, trace.rows.back().t, DecayModel::Polynomial);
        v.observed = fit.exponent;
        v.pass = std::abs(fit.exponent - v.predicted) <= 0.2 * v.predicted;
      } catch (const InsufficientData& e) {
        v.observed = 0.0;
        v.pass = false;
        v.notes = e.what();
      }
      return v;
    }

    case TheoremId::Synchronized: {
      if (ctx.forcing.kind != ForcingKind::SynchronizedProfile)
        return fail_hypotheses(id, "needs a synchronized forcing profile");
      if (!(m < 1.0)) return fail_hypotheses(id, "needs m < 1");
      double sup_grad = 0.0;
      for (const TraceRow& r : trace.rows) sup_grad = std::max(sup_grad, r.h1_seminorm);
      if (sup_grad > 1.0 + 1e-9)
        return fail_hypotheses(id, "gradient smallness conclusion violated on the trace");
      v.predicted = ctx.forcing.t0 + 2.0 * ctx.tau;
      v.observed = t_obs;
      v.pass = trace.extinction_time.has_value() && t_obs <= v.predicted + 1e-12;
      return v;
    }

    case TheoremId::MassToZero: {
      if (ctx.forcing.kind == ForcingKind::BoundedTail) {
        if (m > 0.0 && ctx.forcing.m_inf > 0.0)
          return fail_hypotheses(id, "persistent forcing keeps the mass positive");
        if (m == 0.0 && !(ctx.forcing.m_inf < Ia))
          return fail_hypotheses(id, "needs sup|f| < Im(a) on the tail");
      }
      v.predicted = 0.0;
      v.observed = trace.rows.back().mass;
      v.pass = v.observed <= std::max(trace.extinction_tol, 1e-3 * y0);
      return v;
    }
  }
  return fail_hypotheses(id, "unknown theorem");
}

SynchronizedForcing synchronized_profile(double T0, double delta, double eps_star) {
  if (!(delta > 0.5 && delta < 1.0))
    throw DomainError("synchronized_profile: delta must lie in (1/2, 1)");
  if (!(T0 > 0.0)) throw DomainError("synchronized_profile: T0 must be > 0");
  if (!(eps_star >= 0.0))
    throw DomainError("synchronized_profile: eps_star must be >= 0");
  SynchronizedForcing out;
  out.forcing.kind = ForcingKind::SynchronizedProfile;
  out.forcing.t0 = T0;
  out.forcing.delta = delta;
  out.forcing.eps_star = eps_star;
  out.max_initial_mass = std::pow(eps_star * T0, 1.0 / (1.0 - delta));
  out.gradient_budget = eps_star;
  return out;
}

double recover_selection(const MassTrace& trace, const ForcingSpec& f,
                         const Grid& grid, Complex a) {
  if (!trace.extinction_time)
    throw NoExtinction("recover_selection: trace never extinguishes");
  if (!(a.imag() > 0.0))
    throw DomainError("recover_selection: Im(a) must be positive");
  const double ts = *trace.extinction_time;

  double sup_env = 0.0;
  switch (f.kind) {
    case ForcingKind::Zero:
      sup_env = 0.0;
      break;
    case ForcingKind::CutoffAtT0:
      sup_env = ts < f.t0 ? f.amplitude : 0.0;
      break;
    case ForcingKind::BoundedTail:
      sup_env = ts < f.t0 ? std::max(f.amplitude, f.m_inf) : f.m_inf;
      break;
    case ForcingKind::SynchronizedProfile:
      sup_env = forcing_envelope(f, ts);
      break;
  }
  if (sup_env == 0.0) return 0.0;
  const Field P = forcing_profile(f, grid);
  const double supP = P.values.size() > 0 ? P.values.cwiseAbs().maxCoeff() : 0.0;
  return sup_env * supP / a.imag();
}

}  // namespace extinguish
