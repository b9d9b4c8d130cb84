#include "extinguish/coeffset.hpp"

#include <cmath>

#include "extinguish/errors.hpp"

namespace extinguish {

const char* to_string(Classification c) {
  switch (c) {
    case Classification::InteriorOfC: return "InteriorOfC";
    case Classification::OnBoundaryD: return "OnBoundaryD";
    case Classification::InCNotInterior: return "InCNotInterior";
    case Classification::OutsideC: return "OutsideC";
  }
  return "?";
}

namespace {
constexpr double kBoundaryRelTol = 1e-12;
}

Classification classify_coefficient(Complex a, double m) {
  if (m < 0.0 || m > 1.0) throw DomainError("classify_coefficient: m must be in [0,1]");
  const double re = a.real();
  const double im = a.imag();
  if (!(im > 0.0)) return Classification::OutsideC;

  const double scale = std::abs(a);
  if (m == 0.0) {
    // Vertical ray: Re(a) = 0, Im(a) > 0.
    return std::abs(re) <= kBoundaryRelTol * scale ? Classification::InteriorOfC
                                                   : Classification::OutsideC;
  }
  if (m == 1.0) {
    return Classification::InteriorOfC;  // open upper half plane
  }

  const double lhs = 2.0 * std::sqrt(m) * im;
  const double rhs = (1.0 - m) * std::abs(re);
  const double tol = kBoundaryRelTol * (lhs + rhs);
  if (lhs < rhs - tol) return Classification::OutsideC;
  if (lhs > rhs + tol) return Classification::InteriorOfC;
  // On the sector boundary.  D(m) is the ray with Re(a) > 0.
  return re > 0.0 ? Classification::OnBoundaryD : Classification::InCNotInterior;
}

CoefficientContext make_coefficient_context(Complex a, double m) {
  return CoefficientContext{a, m, classify_coefficient(a, m)};
}

double extinction_exponent(int N, int ell, double m) {
  if (N < 1) throw DomainError("extinction_exponent: N must be >= 1");
  if (ell != 1 && ell != 2) throw DomainError("extinction_exponent: ell must be 1 or 2");
  if (m < 0.0 || m > 1.0) throw DomainError("extinction_exponent: m must be in [0,1]");
  return (double(N + 2 * ell) - m * double(N - 2 * ell)) / double(4 * ell);
}

Complex find_unimodular_multiplier(Complex a, double m) {
  if (!(m > 0.0 && m < 1.0))
    throw DomainError("find_unimodular_multiplier: requires 0 < m < 1");
  if (classify_coefficient(a, m) != Classification::InteriorOfC)
    throw NoMultiplierFound("find_unimodular_multiplier: a is not interior");

  constexpr int kAngles = 4096;
  // Angles in (-pi/2, 0), scanned from 0 outward so the smallest |arg(b)|
  // admissible wins; k = 0 (arg = 0) is excluded since Im(b) must be < 0.
  for (int k = 1; k <= kAngles; ++k) {
    const double phi = -(M_PI / 2.0) * double(k) / double(kAngles + 1);
    const Complex b = std::polar(1.0, phi);
    if (classify_coefficient(a * b, m) == Classification::InteriorOfC) return b;
  }
  throw NoMultiplierFound("find_unimodular_multiplier: angle sweep exhausted");
}

}  // namespace extinguish
