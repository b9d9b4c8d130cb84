#ifndef EXTINGUISH_SATKERNEL_HPP
#define EXTINGUISH_SATKERNEL_HPP

#include <complex>
#include <cstdint>
#include <string>

#include "extinguish/coeffset.hpp"

namespace extinguish {

struct SatParams {
  double m = 1.0;
  double eps = 0.0;  // regularization; m + eps > 0 needed for evaluation at 0
};

// (|z|^2 + eps)^{-(1-m)/2} * z, extended by continuity at z = 0 when m > 0.
// For m = eps = 0 the kernel is the unit phase z/|z|, multivalued at z = 0;
// that point throws SingularArgument and callers must regularize with eps > 0.
Complex saturate(Complex z, const SatParams& p);

// Pairing Z = (g(z1) - g(z2)) * conj(z1 - z2) together with the two defects
// whose nonnegativity makes the damped operator monotone:
//   monotone_defect = Re(Z)                      (>= 0 always)
//   sector_defect   = (1-m) Re(Z) - 2 sqrt(m) |Im(Z)|   (>= 0 always)
struct PairingSample {
  Complex z1, z2;
  Complex Z;
  double monotone_defect;
  double sector_defect;
};

PairingSample pairing(Complex z1, Complex z2, const SatParams& p);

// Re(-i * a * Z); nonnegative whenever a is in the admissible sector.
double damping_defect(Complex z1, Complex z2, Complex a, const SatParams& p);

// The closed-form ratio F_eps(t,s,theta)^2 from the sector proof, and the
// bound ((1-m)^2/(4m)) * t^2 s^2 / ((t^2+eps)(s^2+eps)) it must stay below.
struct SectorRatio {
  double ratio_sq;
  double bound;
};

SectorRatio sector_ratio_bound(double t, double s, double theta, const SatParams& p);

// Deterministic seeded sampling battery for the monotonicity, sector and
// damping inequalities. Moduli are log-uniform over six decades with extra
// strata at the proof's tight cases (|z1| ~ |z2|, theta ~ 0, theta ~ pi).
struct CertificationReport {
  double m = 0.0;
  double eps = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  Complex boundary_a;             // boundary-of-C coefficient used for damping
  double min_monotone_defect = 0.0;
  double min_sector_defect = 0.0;     // normalized by (|Z| + 1)
  double min_damping_defect = 0.0;    // normalized by (|Z| + 1)
  double max_ratio_over_bound = 0.0;  // 0 unless 0 < m < 1
};

CertificationReport certify_region(const SatParams& p, std::int64_t sample_count,
                                   std::uint64_t seed);

// Flat key = value text record.
std::string to_text(const CertificationReport& r);

// A coefficient on the boundary of C(m) (a = i for m in {0,1}).
Complex boundary_coefficient(double m);

}  // namespace extinguish

#endif
