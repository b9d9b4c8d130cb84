#include <doctest.h>

#include <cmath>
#include <random>

#include "extinguish/errors.hpp"
#include "extinguish/resolvent.hpp"

using namespace extinguish;

namespace {

StationaryProblem one_node_problem() {
  StationaryProblem p;
  p.grid = make_grid(1, 1, 2.0);  // h = 1
  p.V = zero_potential(p.grid);
  p.a = Complex(0, 1);
  p.sat = SatParams{1.0, 0.0};
  p.lambda = 1.0;
  p.F = Field{p.grid, VectorXcd::Constant(1, Complex(1, 0))};
  return p;
}

Field random_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Field u = zero_field(g);
  for (Eigen::Index j = 0; j < u.values.size(); ++j)
    u.values[j] = Complex(normal(rng), normal(rng));
  return u;
}

StationaryProblem random_problem(std::mt19937_64& rng) {
  const int dim = int(rng() % 2) + 1;
  const int nodes = dim == 1 ? 8 + int(rng() % 57) : 4 + int(rng() % 13);
  StationaryProblem p;
  p.grid = make_grid(dim, nodes, 1.0 + double(rng() % 100) / 25.0);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  p.V = constant_potential(p.grid, 4.0 * un(rng) - 2.0);
  p.sat.m = un(rng);
  p.sat.eps = std::pow(10.0, -8.0 * un(rng));
  // Interior coefficient: tilt i by a small admissible angle.
  const double im = 0.2 + 2.0 * un(rng);
  p.a = Complex(0.05 * (2.0 * un(rng) - 1.0) * im, im);
  if (classify_coefficient(p.a, p.sat.m) != Classification::InteriorOfC)
    p.a = Complex(0.0, im);
  p.lambda = std::pow(10.0, 2.0 * un(rng) - 2.0);
  p.F = random_field(p.grid, rng);
  return p;
}

}  // namespace

TEST_CASE("one-node closed form") {
  const StationaryProblem p = one_node_problem();
  // Delta u = -2u at a single interior node with h = 1, so
  // u (1 + 2i - i*a) = F with a = i gives u = 1/(2+2i).
  const auto [u, stats] = solve(p, 1e-13);
  CHECK(stats.converged);
  const Complex want = Complex(1, 0) / Complex(2, 2);
  CHECK(std::abs(u.values[0] - want) < 1e-12);
  CHECK(residual(u, p) <= 1e-12);
}

TEST_CASE("residual oracle values") {
  const StationaryProblem p = one_node_problem();
  CHECK(residual(zero_field(p.grid), p) == doctest::Approx(1.0).epsilon(1e-14));

  StationaryProblem tiny = p;
  tiny.lambda = 1e-300;
  CHECK(residual(tiny.F, tiny) < 1e-290);
}

TEST_CASE("zero data solves to zero") {
  StationaryProblem p = one_node_problem();
  p.F = zero_field(p.grid);
  const auto [u, stats] = solve(p, 1e-12);
  CHECK(l2_norm(u) == 0.0);
  CHECK(stats.converged);
}

TEST_CASE("solutions are bounded by data and non-expansive") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 40; ++rep) {
    const StationaryProblem p = random_problem(rng);
    const double tol = 1e-12 * (1.0 + l2_norm(p.F));
    const auto [u, stats] = solve(p, tol);
    CHECK(stats.converged);
    CHECK(residual(u, p) <= tol);
    CHECK(l2_norm(u) <= l2_norm(p.F) * (1.0 + 1e-10));

    // Non-expansiveness in the data.
    StationaryProblem q = p;
    Field du = random_field(p.grid, rng);
    du.values *= 0.1;
    q.F.values += du.values;
    const auto [v, vstats] = solve(q, tol);
    CHECK(vstats.converged);
    const double dist = l2_norm(Field{p.grid, u.values - v.values});
    const double data = l2_norm(Field{p.grid, p.F.values - q.F.values});
    CHECK(dist <= data + 1e-10 * (1.0 + data));
  }
}

TEST_CASE("solve is deterministic") {
  std::mt19937_64 rng(7);
  const StationaryProblem p = random_problem(rng);
  const auto [u1, s1] = solve(p, 1e-12);
  const auto [u2, s2] = solve(p, 1e-12);
  CHECK((u1.values - u2.values).norm() == 0.0);
  CHECK(s1.iterations == s2.iterations);
}

TEST_CASE("problem validation") {
  StationaryProblem p = one_node_problem();
  p.lambda = -1.0;
  CHECK_THROWS_AS(solve(p, 1e-12), DomainError);
  p = one_node_problem();
  p.a = Complex(1, -1);
  CHECK_THROWS_AS(solve(p, 1e-12), DomainError);
  p = one_node_problem();
  p.sat = SatParams{0.0, 0.0};
  CHECK_THROWS_AS(solve(p, 1e-12), DomainError);
  p = one_node_problem();
  CHECK_THROWS_AS(solve(p, -1.0), DomainError);
}

TEST_CASE("continuation stages approach each other") {
  std::mt19937_64 rng(13);
  StationaryProblem p;
  p.grid = make_grid(1, 48, 2.0);
  p.V = zero_potential(p.grid);
  p.a = Complex(0, 1);
  p.sat = SatParams{0.5, 0.0};
  p.lambda = 0.05;
  p.F = random_field(p.grid, rng);
  p.F.values *= 0.01;  // small data exercises the near-singular kernel

  const std::vector<double> schedule{1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
  const double tol = 1e-12 * (1.0 + l2_norm(p.F));
  const ContinuationResult r = solve_with_continuation(p, schedule, tol);
  CHECK(r.stages.size() == schedule.size());
  for (const SolveStats& s : r.stages) CHECK(s.converged);

  // Cauchy behavior: consecutive stage solutions get closer.
  Field prev = p.F;
  std::vector<double> gaps;
  Field guess = p.F;
  StationaryProblem stage = p;
  for (double e : schedule) {
    stage.sat.eps = e;
    const auto [u, stats] = solve(stage, tol);
    (void)stats;
    gaps.push_back(l2_norm(Field{p.grid, u.values - prev.values}));
    prev = u;
  }
  for (std::size_t i = 2; i < gaps.size(); ++i) CHECK(gaps[i] <= gaps[i - 1]);

  // Final stage of the continuation solves the last-eps problem.
  stage.sat.eps = schedule.back();
  CHECK(residual(r.u, stage) <= tol);

  CHECK_THROWS_AS(solve_with_continuation(p, {}, 1e-12), DomainError);
  CHECK_THROWS_AS(solve_with_continuation(p, {1e-2, 1e-2}, 1e-12), DomainError);
  StationaryProblem p0 = p;
  p0.sat.m = 0.0;
  CHECK_THROWS_AS(solve_with_continuation(p0, {1e-2, 0.0}, 1e-12), DomainError);
}
