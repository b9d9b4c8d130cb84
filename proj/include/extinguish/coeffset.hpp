#ifndef EXTINGUISH_COEFFSET_HPP
#define EXTINGUISH_COEFFSET_HPP

#include <complex>

namespace extinguish {

using Complex = std::complex<double>;

// Where a damping coefficient sits relative to the admissible sector.
// For 0 < m < 1 the sector is { Im(z) > 0, 2*sqrt(m)*Im(z) >= (1-m)*|Re(z)| };
// its right boundary ray (Re(z) > 0, equality) is the excluded set D(m).
enum class Classification {
  InteriorOfC,    // strict sector inequality (the vertical ray for m = 0)
  OnBoundaryD,    // equality with Re(a) > 0, only for 0 < m < 1
  InCNotInterior, // equality with Re(a) < 0: admissible but not interior
  OutsideC,
};

const char* to_string(Classification c);

struct CoefficientContext {
  Complex a;
  double m;
  Classification classification;
};

// Total over all (a, m) with m in [0,1]. Boundary equalities are decided with a
// relative tolerance of 1e-12 so near-boundary coefficients are flagged
// instead of silently landing on one side.
Classification classify_coefficient(Complex a, double m);

CoefficientContext make_coefficient_context(Complex a, double m);

// delta_ell = ((N + 2*ell) - m*(N - 2*ell)) / (4*ell)
double extinction_exponent(int N, int ell, double m);

// Exponents and coefficients entering the mass ODE comparison.
// alpha and beta carry the estimated Gagliardo-Nirenberg constant and the
// trajectory sup-norms; omega_f = Im(a) - sup|f| drives the m = 0 branch.
struct ExtinctionExponents {
  int N = 1;
  int ell = 1;
  double delta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double omega_f = 0.0;
};

// Unimodular b with Re(b) > 0, Im(b) < 0 and a*b still interior, found on a
// fixed grid of 4096 angles in (-pi/2, 0) scanned from 0 outward.
Complex find_unimodular_multiplier(Complex a, double m);

}  // namespace extinguish

#endif
