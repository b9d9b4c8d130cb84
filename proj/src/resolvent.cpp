#include "extinguish/resolvent.hpp"

#include <cmath>

#include "extinguish/coeffset.hpp"
#include "extinguish/errors.hpp"

namespace extinguish {

namespace {

constexpr int kNewtonCap = 200;
constexpr int kPicardCap = 2000;
constexpr double kJacobianFloor = 1e-30;

void validate_base(const StationaryProblem& p) {
  if (!(p.lambda > 0.0)) throw DomainError("resolvent: lambda must be > 0");
  if (classify_coefficient(p.a, p.sat.m) == Classification::OutsideC)
    throw DomainError("resolvent: damping coefficient outside the admissible sector");
  if (p.F.values.size() != p.grid.size())
    throw DomainError("resolvent: right-hand side does not match the grid");
}

void validate(const StationaryProblem& p) {
  validate_base(p);
  if (p.sat.m == 0.0 && !(p.sat.eps > 0.0))
    throw DomainError("resolvent: m = 0 requires eps > 0");
}

// R(u) = u - i*lambda*(Du + Vu + a g(u)) - F
Field residual_field(const Field& u, const StationaryProblem& p) {
  Field r = laplacian(u);
  r.values += apply_potential(u, p.V).values;
  for (Eigen::Index j = 0; j < r.values.size(); ++j)
    r.values[j] += p.a * saturate(u.values[j], p.sat);
  r.values = u.values - Complex(0.0, p.lambda) * r.values - p.F.values;
  return r;
}

// Frozen linearization data at the current iterate: the pointwise action of
// the Jacobian is v -> alpha.*v + beta.*conj(v) plus the Laplacian coupling.
struct JacobianData {
  const StationaryProblem* p;
  VectorXcd alpha;       // complex-linear pointwise coefficient
  VectorXcd beta;        // antilinear pointwise coefficient
  VectorXcd pre_alpha;   // alpha + stencil diagonal, for the preconditioner
};

JacobianData make_jacobian(const Field& u, const StationaryProblem& p) {
  const double m = p.sat.m;
  const double eps = p.sat.eps;
  const Complex il(0.0, p.lambda);
  const Eigen::Index n = u.values.size();
  JacobianData jd;
  jd.p = &p;
  jd.alpha.resize(n);
  jd.beta.resize(n);
  jd.pre_alpha.resize(n);
  const double diagL = -2.0 * double(p.grid.dim) /
                       (p.grid.spacing * p.grid.spacing);
  const VectorXd vsum = p.V.v1 + p.V.v2;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex uj = u.values[j];
    const double r = std::norm(uj);
    const double phi = m == 1.0 ? 1.0 : std::pow(r + eps, -(1.0 - m) / 2.0);
    const double dphi = m == 1.0 ? 0.0 : -((1.0 - m) / 2.0) * phi / (r + eps);
    jd.alpha[j] = 1.0 - il * (vsum[j] + p.a * (phi + dphi * r));
    jd.beta[j] = -il * p.a * dphi * uj * uj;
    jd.pre_alpha[j] = jd.alpha[j] - il * diagL;
  }
  return jd;
}

VectorXcd apply_jacobian(const JacobianData& jd, const VectorXcd& v) {
  Field vf{jd.p->grid, v};
  VectorXcd out = laplacian(vf).values * Complex(0.0, -jd.p->lambda);
  out.array() += jd.alpha.array() * v.array() + jd.beta.array() * v.array().conjugate();
  return out;
}

// Inverse of w = alpha v + beta conj(v):  v = (conj(alpha) w - beta conj(w)) / det.
VectorXcd apply_preconditioner(const JacobianData& jd, const VectorXcd& w) {
  VectorXcd v(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const Complex a = jd.pre_alpha[j];
    const Complex b = jd.beta[j];
    const double det = std::norm(a) - std::norm(b);
    v[j] = std::abs(det) > 1e-300 ? (std::conj(a) * w[j] - b * std::conj(w[j])) / det
                                  : w[j];
  }
  return v;
}

double dot_r(const VectorXcd& x, const VectorXcd& y) { return x.dot(y).real(); }

// Right-preconditioned BiCGStab on the real-linear Jacobian, treated as an
// operator on R^{2M}. Returns the best iterate found; the outer line search
// copes with an inexact direction.
VectorXcd bicgstab(const JacobianData& jd, const VectorXcd& b, double rel_tol,
                   int max_iters) {
  const double bnorm = b.norm();
  VectorXcd x = VectorXcd::Zero(b.size());
  if (bnorm == 0.0) return x;
  VectorXcd r = b;
  const VectorXcd rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  VectorXcd v = VectorXcd::Zero(b.size());
  VectorXcd pvec = VectorXcd::Zero(b.size());
  VectorXcd best_x = x;
  double best_rn = bnorm;
  for (int it = 0; it < max_iters; ++it) {
    const double rho1 = dot_r(rhat, r);
    if (std::abs(rho1) < 1e-300) break;
    const double beta = (rho1 / rho) * (alpha / omega);
    pvec = r + beta * (pvec - omega * v);
    v = apply_jacobian(jd, apply_preconditioner(jd, pvec));
    const double rv = dot_r(rhat, v);
    if (std::abs(rv) < 1e-300) break;
    alpha = rho1 / rv;
    const VectorXcd s = r - alpha * v;
    if (s.norm() <= rel_tol * bnorm) {
      x += alpha * pvec;
      return apply_preconditioner(jd, x);
    }
    const VectorXcd t = apply_jacobian(jd, apply_preconditioner(jd, s));
    const double tt = dot_r(t, t);
    if (tt < 1e-300) break;
    omega = dot_r(t, s) / tt;
    x += alpha * pvec + omega * s;
    r = s - omega * t;
    const double rn = r.norm();
    if (rn < best_rn) {
      best_rn = rn;
      best_x = x;
    }
    if (rn <= rel_tol * bnorm) return apply_preconditioner(jd, x);
    if (std::abs(omega) < 1e-300) break;
    rho = rho1;
  }
  return apply_preconditioner(jd, best_x);
}

std::pair<Field, SolveStats> solve_impl(const StationaryProblem& p, double tol,
                                        Field u) {
  SolveStats stats;
  Field r = residual_field(u, p);
  double rn = l2_norm(r);
  int newton_used = 0;
  int picard_used = 0;

  while (rn > tol) {
    if (newton_used + picard_used >= kNewtonCap + kPicardCap)
      throw NonConvergence("resolvent: iteration cap reached", rn,
                           newton_used + picard_used);

    bool stepped = false;
    const double floor =
        u.values.size() > 0 ? u.values.array().abs2().minCoeff() + p.sat.eps : 1.0;
    const bool allow_newton =
        newton_used < kNewtonCap && (p.sat.m == 1.0 || floor >= kJacobianFloor);

    if (allow_newton) {
      const JacobianData jd = make_jacobian(u, p);
      const int max_inner = int(2 * u.values.size()) + 20;
      const VectorXcd d = bicgstab(jd, -r.values, 0.1, max_inner);
      double step = 1.0;
      for (int bt = 0; bt < 40; ++bt) {
        Field trial{u.grid, u.values + step * d};
        const Field tr = residual_field(trial, p);
        const double trn = l2_norm(tr);
        if (trn < rn) {
          u = std::move(trial);
          r = tr;
          rn = trn;
          stepped = true;
          break;
        }
        step *= 0.5;
      }
      ++newton_used;
      if (stepped) continue;
    }

    // Damped Picard on the residual map.
    double step = 1.0;
    for (int bt = 0; bt < 60 && !stepped; ++bt) {
      Field trial{u.grid, u.values - step * r.values};
      const Field tr = residual_field(trial, p);
      const double trn = l2_norm(tr);
      if (trn < rn) {
        u = std::move(trial);
        r = tr;
        rn = trn;
        stepped = true;
        break;
      }
      step *= 0.5;
    }
    ++picard_used;
    if (!stepped)
      throw NonConvergence("resolvent: stagnation", rn, newton_used + picard_used);
  }

  stats.iterations = newton_used + picard_used;
  stats.final_residual = rn;
  stats.strategy = picard_used > 0 ? Strategy::DampedPicard : Strategy::Newton;
  stats.converged = true;
  return {std::move(u), stats};
}

}  // namespace

double residual(const Field& u, const StationaryProblem& p) {
  validate(p);
  return l2_norm(residual_field(u, p));
}

std::pair<Field, SolveStats> solve(const StationaryProblem& p, double tol) {
  validate(p);
  if (!(tol > 0.0)) throw DomainError("resolvent: tol must be > 0");
  if (l2_norm(p.F) == 0.0) {
    // Zero solves, and the monotone problem has a unique solution.
    SolveStats stats;
    stats.converged = true;
    return {zero_field(p.grid), stats};
  }
  return solve_impl(p, tol, p.F);
}

ContinuationResult solve_with_continuation(const StationaryProblem& p,
                                           const std::vector<double>& eps_schedule,
                                           double tol) {
  validate_base(p);
  if (eps_schedule.empty())
    throw DomainError("continuation: schedule must be nonempty");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    const double e = eps_schedule[i];
    if (e < 0.0) throw DomainError("continuation: eps must be >= 0");
    if (i > 0 && !(e < eps_schedule[i - 1]))
      throw DomainError("continuation: schedule must be strictly decreasing");
    if (e == 0.0 && !(p.sat.m > 0.0))
      throw DomainError("continuation: eps = 0 requires m > 0");
  }

  ContinuationResult out{p.F, {}};
  Field guess = p.F;
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    StationaryProblem stage = p;
    stage.sat.eps = eps_schedule[i];
    try {
      auto [u, stats] = solve_impl(stage, tol, guess);
      out.u = u;
      out.stages.push_back(stats);
      guess = std::move(u);
    } catch (const NonConvergence& e) {
      throw NonConvergence("continuation stage " + std::to_string(i) + ": " + e.what(),
                           e.residual, e.iterations);
    }
  }
  return out;
}

}  // namespace extinguish
