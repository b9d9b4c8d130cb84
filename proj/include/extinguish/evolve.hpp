#ifndef EXTINGUISH_EVOLVE_HPP
#define EXTINGUISH_EVOLVE_HPP

#include <optional>
#include <string>
#include <vector>

#include "extinguish/resolvent.hpp"

namespace extinguish {

enum class ForcingKind { Zero, CutoffAtT0, BoundedTail, SynchronizedProfile };

// Forcing f(t, x) = envelope(t) * P(x) with a fixed spatial mode P.
//   CutoffAtT0:          envelope = amplitude on [0, T0], exactly 0 after.
//   BoundedTail:         amplitude on [0, T0], m_inf after (|P| normalized
//                        to sup 1, so sup |f| <= m_inf on the tail).
//   SynchronizedProfile: ||f(t)||^2 = eps_star * (T0 - t)_+^{(2d-1)/(1-d)}
//                        (P normalized to unit L2 norm).
struct ForcingSpec {
  ForcingKind kind = ForcingKind::Zero;
  double t0 = 0.0;
  double amplitude = 0.0;
  double m_inf = 0.0;
  double eps_star = 0.0;
  double delta = 0.75;
  VectorXcd profile;  // empty -> first sine mode of the grid
};

double forcing_envelope(const ForcingSpec& f, double t);
Field forcing_profile(const ForcingSpec& f, const Grid& g);
Field forcing_at(const ForcingSpec& f, const Grid& g, double t);

struct Medium {
  Potential V;
  Complex a;
  double m = 1.0;
};

struct Schedule {
  double tau = 1e-3;
  double t_end = 1.0;
  // eps < 0 selects the default policy: 0 for m = 1, else min(1e-12, tau^2).
  double eps = -1.0;
  // Nonempty: every implicit step is solved along this eps continuation.
  std::vector<double> continuation;
  int stride = 1;  // trace row every `stride` steps
};

double default_eps(double m, double tau);

struct TraceRow {
  double t = 0.0;
  double mass = 0.0;               // y(t) = ||u||^2
  double dissipation_power = 0.0;  // ||u||_{L^{m+1}}^{m+1}
  double forcing_work = 0.0;       // Im int f conj(u)
  double identity_residual = 0.0;
  double h1_seminorm = 0.0;
  double laplacian_l2 = 0.0;
};

struct MassTrace {
  std::vector<TraceRow> rows;
  std::optional<double> extinction_time;
  double extinction_tol = 1e-24;
  double max_identity_residual = 0.0;  // over every step, not only recorded rows
};

void write_csv(const MassTrace& trace, const std::string& path);

// One backward-Euler step: solves (I + tau A) u+ = u - i tau f_next.
Field step(const Field& u, double tau, const Field& f_next, const Medium& med,
           const SatParams& sat, double tol);

struct RunResult {
  MassTrace trace;
  Field final_field;
};

RunResult run(const Field& u0, const Schedule& sched, const ForcingSpec& forcing,
              const Medium& med);

// Runs the two trajectories side by side and returns the maximum over steps of
// ||u_n - v_n|| - ||u_{n-1} - v_{n-1}|| - tau ||f_n - g_n||.
double contraction_check(const Field& u0, const Field& v0, const ForcingSpec& f,
                         const ForcingSpec& g, const Schedule& sched,
                         const Medium& med);

}  // namespace extinguish

#endif
