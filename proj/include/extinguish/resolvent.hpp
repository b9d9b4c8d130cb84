#ifndef EXTINGUISH_RESOLVENT_HPP
#define EXTINGUISH_RESOLVENT_HPP

#include <utility>
#include <vector>

#include "extinguish/domain.hpp"
#include "extinguish/satkernel.hpp"

namespace extinguish {

// Stationary monotone problem  u + lambda*(-i Du - i V u - i a g(u)) = F.
struct StationaryProblem {
  Grid grid;
  Potential V;
  Complex a;
  SatParams sat;
  double lambda = 1.0;
  Field F;
};

enum class Strategy { Newton, DampedPicard };

struct SolveStats {
  int iterations = 0;
  double final_residual = 0.0;
  Strategy strategy = Strategy::Newton;
  bool converged = false;
};

// L2 norm of u + lambda*(-i Du - i V u - i a g(u)) - F.
double residual(const Field& u, const StationaryProblem& p);

// Deterministic Newton on the real/imaginary-split system (the kernel is not
// holomorphic for m < 1) with matrix-free BiCGStab inner solves, backtracking
// line search and a damped-Picard fallback. Initial guess u = F.
// Throws NonConvergence after 200 Newton + 2000 Picard iterations.
std::pair<Field, SolveStats> solve(const StationaryProblem& p, double tol);

struct ContinuationResult {
  Field u;
  std::vector<SolveStats> stages;
};

// Solves along a strictly decreasing eps schedule, warm-starting each stage
// from the previous solution. A final eps of 0 requires sat.m > 0.
ContinuationResult solve_with_continuation(const StationaryProblem& p,
                                           const std::vector<double>& eps_schedule,
                                           double tol);

}  // namespace extinguish

#endif
