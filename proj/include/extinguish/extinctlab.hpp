#ifndef EXTINGUISH_EXTINCTLAB_HPP
#define EXTINGUISH_EXTINCTLAB_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "extinguish/coeffset.hpp"
#include "extinguish/evolve.hpp"

namespace extinguish {

// The two right-hand-side templates behind the mass comparison:
//   SqrtForcing:  y' = -alpha y^delta + envelope(t) sqrt(y)
//   Additive:     y' = -alpha y^delta + envelope(t)
enum class OdeForm { SqrtForcing, Additive };

struct OdeProblem {
  double y0 = 1.0;
  double alpha = 1.0;
  double delta = 0.75;  // in (1/2, 1]
  std::function<double(double)> envelope;  // null means zero
  double t0 = 0.0;   // envelope reference time (informational)
  double t_end = 1.0;
  OdeForm form = OdeForm::Additive;
};

struct OdeTrace {
  std::vector<double> t;
  std::vector<double> y;
  std::optional<double> extinction_time;
};

// Integrating-factor stepping: the sink -alpha y^delta is integrated exactly
// over each step (so the zero-envelope closed form is reproduced to roundoff
// and y stays >= 0 by construction), the forcing term implicitly. When the
// sink zeroes y inside a step with locally zero envelope, the sub-step
// extinction time y_n^{1-delta}/(alpha(1-delta)) is recorded.
OdeTrace ode_solve(const OdeProblem& p, double dt);

// Zero-envelope extinction time y0^{1-delta}/(alpha(1-delta)); infinite for
// delta = 1.
double closed_form_extinction_time(double y0, double alpha, double delta);

struct EpsilonStarBranches {
  double envelope_branch;  // (2d-1)^{-(2d-1)/d} (ad)^{1/(1-d)} (1-d)^{(2d-1)/(d(1-d))}
  double product_branch;   // a d (1-d)
  double value;            // min of the two
};

EpsilonStarBranches epsilon_star_branches(double alpha, double delta);
double epsilon_star(double alpha, double delta);

enum class GnForm { Gradient, Laplacian };

// Lower bound on the discrete interpolation constant C in
//   ||u||_2^{2 delta_l} <= C ||u||_{m+1}^{m+1} ||D u||_2^{N(1-m)/(2l)}
// (D = grad for l=1, Laplacian for l=2) from seeded random fields plus a
// deterministic local ascent. Non-decreasing in `samples` at fixed seed.
double estimate_gn_constant(const Grid& grid, double m, int samples,
                            std::uint64_t seed, GnForm form);

enum class TheoremId {
  TStarH1,       // extinction-time bound, gradient level
  TStarH2,       // extinction-time bound, Laplacian level
  DecayExp,      // m = 1 exponential mass decay
  DecayPoly,     // m < 1 polynomial decay of the norm
  Synchronized,  // extinction synchronized with the forcing cutoff
  MassToZero,    // qualitative mass -> 0
};

const char* to_string(TheoremId id);

struct TheoremVerdict {
  TheoremId theorem_id = TheoremId::MassToZero;
  bool hypotheses_ok = false;
  double predicted = 0.0;
  double observed = 0.0;
  bool pass = false;
  std::string notes;
};

struct VerdictContext {
  CoefficientContext coeff;
  int N = 1;
  int ell = 1;
  double c_gn = 1.0;  // estimated interpolation constant
  ForcingSpec forcing;
  double tau = 0.0;   // step used to produce the trace
};

// Exponents and the ODE coefficients alpha_l / beta_l assembled from the
// context and the trace sup-norms (h1 seminorm for l=1, ||Lap u|| for l=2).
ExtinctionExponents make_exponents(const VerdictContext& ctx, const MassTrace& trace);

TheoremVerdict verdict(const MassTrace& trace, TheoremId id, const VerdictContext& ctx);

enum class DecayModel { Exponential, Polynomial };

struct DecayFit {
  double rate = 0.0;      // exponential: ||u|| ~ C e^{-rate t}
  double exponent = 0.0;  // polynomial: ||u|| ~ C t^{-exponent}
  double amplitude = 0.0;
  double residual = 0.0;  // rms misfit in the linearized variable
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit affine_fit(const std::vector<double>& x, const std::vector<double>& y);

// Deterministic least squares on rows with t in [t_lo, t_hi]; rows in the
// last mass decade above extinction_tol are dropped (roundoff-dominated).
// Needs >= 10 usable rows, otherwise InsufficientData.
DecayFit fit_decay(const MassTrace& trace, double t_lo, double t_hi, DecayModel model);

struct SynchronizedForcing {
  ForcingSpec forcing;
  // Data smallness the caller must verify on u0:
  double max_initial_mass;  // ||u0||^2 <= this, i.e. ||u0||^{2(1-delta)} <= eps* T0
  double gradient_budget;   // ||grad u0|| (and the forcing gradient mass) <= this
};

SynchronizedForcing synchronized_profile(double T0, double delta, double eps_star);

// Post-extinction selection for m = 0: U = f/(i Im(a)), returns sup |U| over
// (T_star, infinity). Throws NoExtinction if the trace never extinguishes.
double recover_selection(const MassTrace& trace, const ForcingSpec& f,
                         const Grid& grid, Complex a);

}  // namespace extinguish

#endif
