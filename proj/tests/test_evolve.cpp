#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "extinguish/errors.hpp"
#include "extinguish/evolve.hpp"

using namespace extinguish;

namespace {

Field random_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Field u = zero_field(g);
  for (Eigen::Index j = 0; j < u.values.size(); ++j)
    u.values[j] = Complex(normal(rng), normal(rng));
  return u;
}

}  // namespace

TEST_CASE("forcing envelopes") {
  ForcingSpec cut;
  cut.kind = ForcingKind::CutoffAtT0;
  cut.t0 = 1.5;
  cut.amplitude = 0.3;
  CHECK(forcing_envelope(cut, 1.5) == 0.3);
  CHECK(forcing_envelope(cut, 1.5 + 1e-15) == 0.0);

  ForcingSpec tail = cut;
  tail.kind = ForcingKind::BoundedTail;
  tail.m_inf = 0.1;
  CHECK(forcing_envelope(tail, 2.0) == 0.1);

  ForcingSpec sync;
  sync.kind = ForcingKind::SynchronizedProfile;
  sync.t0 = 2.0;
  sync.delta = 0.75;
  sync.eps_star = 0.01;
  CHECK(forcing_envelope(sync, 2.0) == 0.0);
  CHECK(forcing_envelope(sync, 5.0) == 0.0);

  // ||f(0)||^2 = eps_star * T0^{(2d-1)/(1-d)} with a unit-L2 profile.
  const Grid g = make_grid(1, 32, 1.0);
  const Field f0 = forcing_at(sync, g, 0.0);
  const double want = 0.01 * std::pow(2.0, (2.0 * 0.75 - 1.0) / (1.0 - 0.75));
  CHECK(l2_norm(f0) * l2_norm(f0) == doctest::Approx(want).epsilon(1e-12));

  sync.delta = 0.4;
  CHECK_THROWS_AS(forcing_envelope(sync, 0.0), DomainError);

  // Cutoff profiles are normalized to sup 1, so sup|f| = amplitude.
  const Field fc = forcing_at(cut, g, 0.0);
  CHECK(fc.values.cwiseAbs().maxCoeff() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("default eps policy") {
  CHECK(default_eps(1.0, 1e-3) == 0.0);
  CHECK(default_eps(0.5, 1e-3) == doctest::Approx(1e-6));
  CHECK(default_eps(0.5, 1e-7) == doctest::Approx(1e-12));
}

TEST_CASE("zero step and zero run") {
  const Grid g = make_grid(1, 16, 1.0);
  Medium med{zero_potential(g), Complex(0, 1), 0.5};
  const Field u = step(zero_field(g), 0.1, zero_field(g), med,
                       SatParams{0.5, 1e-8}, 1e-12);
  CHECK(l2_norm(u) == 0.0);

  Schedule s;
  s.tau = 0.05;
  s.t_end = 0.5;
  const RunResult r = run(zero_field(g), s, ForcingSpec{}, med);
  for (const TraceRow& row : r.trace.rows) CHECK(row.mass == 0.0);
  CHECK(r.trace.extinction_time == 0.0);
}

TEST_CASE("single node m=1 step follows the exponential law to O(tau^2)") {
  const Grid g = make_grid(1, 1, 2.0);
  Medium med{zero_potential(g), Complex(0, 1), 1.0};
  for (double tau : {1e-2, 5e-3, 2.5e-3}) {
    Field u{g, VectorXcd::Constant(1, Complex(0.7, 0.2))};
    const Field up = step(u, tau, zero_field(g), med, SatParams{1.0, 0.0}, 1e-14);
    // d|u|/dt = -|u| for the continuous generator at this node.
    const double want = std::abs(u.values[0]) * std::exp(-tau);
    CHECK(std::abs(std::abs(up.values[0]) - want) < 2.0 * tau * tau);
  }
}

TEST_CASE("mass is non-increasing without forcing") {
  std::mt19937_64 rng(211);
  const Grid g = make_grid(1, 48, 3.0);
  for (double m : {0.25, 0.75, 1.0}) {
    Medium med{constant_potential(g, 0.7), Complex(0.1, 1.0), m};
    if (classify_coefficient(med.a, m) == Classification::OutsideC)
      med.a = Complex(0, 1);
    Schedule s;
    s.tau = 0.01;
    s.t_end = 0.3;
    Field u0 = random_field(g, rng);
    u0.values /= l2_norm(u0);
    const RunResult r = run(u0, s, ForcingSpec{}, med);
    for (std::size_t i = 1; i < r.trace.rows.size(); ++i)
      CHECK(r.trace.rows[i].mass <= r.trace.rows[i - 1].mass * (1.0 + 1e-13));
  }
}

TEST_CASE("identity residual is first order in tau") {
  const Grid g = make_grid(1, 32, 5.0);
  Medium med{zero_potential(g), Complex(0, 1), 1.0};
  const Field u0 = first_mode(g);
  double prev = 0.0;
  for (int k = 0; k < 3; ++k) {
    Schedule s;
    s.tau = 2e-2 / (1 << k);
    s.t_end = 0.4;
    const RunResult r = run(u0, s, ForcingSpec{}, med);
    if (k > 0) CHECK(prev / r.trace.max_identity_residual >= 1.8);
    prev = r.trace.max_identity_residual;
  }
}

TEST_CASE("gradient does not grow for f = 0 and constant potential") {
  const Grid g = make_grid(1, 48, 2.0);
  Medium med{constant_potential(g, 1.3), Complex(0, 1), 0.5};
  Schedule s;
  s.tau = 0.01;
  s.t_end = 0.5;
  const RunResult r = run(first_mode(g), s, ForcingSpec{}, med);
  const double scale = r.trace.rows.front().h1_seminorm;
  for (std::size_t i = 1; i < r.trace.rows.size(); ++i)
    CHECK(r.trace.rows[i].h1_seminorm <=
          r.trace.rows[i - 1].h1_seminorm + 1e-8 * scale);
}

TEST_CASE("extinction is detected and sticky") {
  const Grid g = make_grid(1, 64, 5.0);
  Medium med{zero_potential(g), Complex(0, 1), 0.5};
  Schedule s;
  s.tau = 5e-3;
  s.t_end = 4.0;
  const RunResult r = run(first_mode(g), s, ForcingSpec{}, med);
  REQUIRE(r.trace.extinction_time.has_value());
  const double ts = *r.trace.extinction_time;
  CHECK(ts > 0.0);
  for (const TraceRow& row : r.trace.rows)
    if (row.t >= ts) CHECK(row.mass < r.trace.extinction_tol);
}

TEST_CASE("contraction defect stays within roundoff") {
  std::mt19937_64 rng(401);
  const Grid g = make_grid(1, 32, 2.0);
  Medium med{zero_potential(g), Complex(0, 1), 0.5};
  Schedule s;
  s.tau = 0.02;
  s.t_end = 0.2;

  Field u0 = random_field(g, rng);
  u0.values /= l2_norm(u0);
  Field v0 = u0;
  v0.values += 0.01 * random_field(g, rng).values;

  ForcingSpec f;
  f.kind = ForcingKind::CutoffAtT0;
  f.t0 = 0.15;
  f.amplitude = 0.2;
  ForcingSpec gf = f;
  gf.amplitude = 0.25;

  const double defect = contraction_check(u0, v0, f, gf, s, med);
  CHECK(defect <= 1e-10);

  // Identical trajectories: every defect term is <= 0.
  CHECK(contraction_check(u0, u0, f, f, s, med) <= 0.0);

  // Same forcing, different data: distances are non-increasing, so the
  // defect is still bounded by roundoff.
  CHECK(contraction_check(u0, v0, f, f, s, med) <= 1e-12);
}

TEST_CASE("csv export and determinism") {
  const Grid g = make_grid(1, 24, 2.0);
  Medium med{zero_potential(g), Complex(0, 1), 1.0};
  Schedule s;
  s.tau = 0.01;
  s.t_end = 0.1;
  const RunResult r1 = run(first_mode(g), s, ForcingSpec{}, med);
  const RunResult r2 = run(first_mode(g), s, ForcingSpec{}, med);
  write_csv(r1.trace, "trace_a.csv");
  write_csv(r2.trace, "trace_b.csv");
  std::ifstream a("trace_a.csv"), b("trace_b.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("t,mass,dissipation_power,forcing_work,identity_residual,"
                       "h1_seminorm,laplacian_l2\n", 0) == 0);

  // 17 significant digits round-trip the doubles exactly.
  std::string line;
  std::getline(sa, line);  // header
  std::getline(sa, line);
  double t = -1.0, mass = -1.0;
  CHECK(std::sscanf(line.c_str(), "%lg,%lg", &t, &mass) == 2);
  CHECK(t == r1.trace.rows[0].t);
  CHECK(mass == r1.trace.rows[0].mass);
  std::remove("trace_a.csv");
  std::remove("trace_b.csv");
}

TEST_CASE("stride keeps endpoints") {
  const Grid g = make_grid(1, 16, 2.0);
  Medium med{zero_potential(g), Complex(0, 1), 1.0};
  Schedule s;
  s.tau = 0.01;
  s.t_end = 0.1;
  s.stride = 3;
  const RunResult r = run(first_mode(g), s, ForcingSpec{}, med);
  CHECK(r.trace.rows.front().t == 0.0);
  CHECK(r.trace.rows.back().t == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("run validation") {
  const Grid g = make_grid(1, 8, 1.0);
  Medium bad{zero_potential(g), Complex(1, -1), 0.5};
  Schedule s;
  s.tau = 0.01;
  s.t_end = 0.1;
  CHECK_THROWS_AS(run(first_mode(g), s, ForcingSpec{}, bad), DomainError);

  Medium m0{zero_potential(g), Complex(0, 1), 0.0};
  Schedule s0 = s;
  s0.eps = 0.0;
  CHECK_THROWS_AS(run(first_mode(g), s0, ForcingSpec{}, m0), DomainError);
}
