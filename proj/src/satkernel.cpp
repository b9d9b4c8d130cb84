#include "extinguish/satkernel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "extinguish/errors.hpp"
#include "extinguish/threading.hpp"

namespace extinguish {

Complex saturate(Complex z, const SatParams& p) {
  if (p.m < 0.0 || p.m > 1.0) throw DomainError("saturate: m must be in [0,1]");
  if (p.eps < 0.0) throw DomainError("saturate: eps must be >= 0");
  if (p.m == 1.0 && p.eps == 0.0) return z;
  const double r = std::norm(z);
  if (r == 0.0) {
    if (p.m == 0.0 && p.eps == 0.0)
      throw SingularArgument("saturate: g_0^0 is multivalued at z = 0");
    return Complex(0.0, 0.0);
  }
  return std::pow(r + p.eps, -(1.0 - p.m) / 2.0) * z;
}

PairingSample pairing(Complex z1, Complex z2, const SatParams& p) {
  PairingSample s;
  s.z1 = z1;
  s.z2 = z2;
  s.Z = (saturate(z1, p) - saturate(z2, p)) * std::conj(z1 - z2);
  s.monotone_defect = s.Z.real();
  s.sector_defect = (1.0 - p.m) * s.Z.real() - 2.0 * std::sqrt(p.m) * std::abs(s.Z.imag());
  return s;
}

double damping_defect(Complex z1, Complex z2, Complex a, const SatParams& p) {
  const Complex Z = pairing(z1, z2, p).Z;
  return (Complex(0.0, -1.0) * a * Z).real();
}

SectorRatio sector_ratio_bound(double t, double s, double theta, const SatParams& p) {
  if (!(p.m > 0.0 && p.m < 1.0))
    throw DomainError("sector_ratio_bound: requires 0 < m < 1");
  if (!(s > 0.0) || !(t > s)) throw DomainError("sector_ratio_bound: requires t > s > 0");
  const double e = p.eps;
  const double pw = (p.m - 1.0) / 2.0;
  const double P = std::pow(t * t + e, pw);
  const double Q = std::pow(s * s + e, pw);
  // F^2 = A (1 - cos^2) / (B - C cos)^2 with the proof's decomposition.
  const double A = t * t * s * s * (P - Q) * (P - Q);
  const double B = t * t * P + s * s * Q;
  const double C = t * s * (P + Q);
  const double c = std::cos(theta);
  const double den = B - C * c;
  SectorRatio out;
  out.ratio_sq = A * (1.0 - c * c) / (den * den);
  out.bound = ((1.0 - p.m) * (1.0 - p.m) / (4.0 * p.m)) * (t * t * s * s) /
              ((t * t + e) * (s * s + e));
  return out;
}

Complex boundary_coefficient(double m) {
  if (m <= 0.0 || m >= 1.0) return Complex(0.0, 1.0);
  // 2 sqrt(m) Im(a) = (1-m) Re(a) with Im(a) > 0.
  return Complex(2.0 * std::sqrt(m), 1.0 - m);
}

namespace {

struct ChunkResult {
  double min_monotone = std::numeric_limits<double>::infinity();
  double min_sector = std::numeric_limits<double>::infinity();
  double min_damping = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
};

Complex draw(std::mt19937_64& rng, std::uniform_real_distribution<double>& logmod,
             std::uniform_real_distribution<double>& phase) {
  return std::polar(std::pow(10.0, logmod(rng)), phase(rng));
}

ChunkResult certify_chunk(const SatParams& p, Complex a, std::int64_t count,
                          std::uint64_t chunk_seed) {
  std::mt19937_64 rng(chunk_seed);
  std::uniform_real_distribution<double> logmod(-3.0, 3.0);
  std::uniform_real_distribution<double> phase(-M_PI, M_PI);
  std::uniform_real_distribution<double> tiny(-1e-8, 1e-8);

  ChunkResult r;
  const bool ratio_applies = p.m > 0.0 && p.m < 1.0;
  for (std::int64_t i = 0; i < count; ++i) {
    Complex z1 = draw(rng, logmod, phase);
    Complex z2;
    switch (i % 4) {
      case 1:  // near-equal moduli
        z2 = std::polar(std::abs(z1) * (1.0 + tiny(rng)), phase(rng));
        break;
      case 2:  // nearly aligned phases
        z2 = std::polar(std::pow(10.0, logmod(rng)), std::arg(z1) + tiny(rng));
        break;
      case 3:  // nearly opposite phases
        z2 = std::polar(std::pow(10.0, logmod(rng)), std::arg(z1) + M_PI + tiny(rng));
        break;
      default:
        z2 = draw(rng, logmod, phase);
    }
    const PairingSample ps = pairing(z1, z2, p);
    const double scale = std::abs(ps.Z) + 1.0;
    r.min_monotone = std::min(r.min_monotone, ps.monotone_defect / scale);
    r.min_sector = std::min(r.min_sector, ps.sector_defect / scale);
    const double dd = (Complex(0.0, -1.0) * a * ps.Z).real();
    r.min_damping = std::min(r.min_damping, dd / scale);
    if (ratio_applies) {
      double t = std::abs(z1), s = std::abs(z2);
      if (s > t) std::swap(t, s);
      if (t > s * (1.0 + 1e-12)) {
        const SectorRatio sr =
            sector_ratio_bound(t, s, std::arg(std::conj(z1) * z2), p);
        r.max_ratio = std::max(r.max_ratio, sr.ratio_sq / sr.bound);
      }
    }
  }
  return r;
}

}  // namespace

CertificationReport certify_region(const SatParams& p, std::int64_t sample_count,
                                   std::uint64_t seed) {
  if (sample_count < 1) throw DomainError("certify_region: sample_count must be >= 1");
  CertificationReport rep;
  rep.m = p.m;
  rep.eps = p.eps;
  rep.samples = sample_count;
  rep.seed = seed;
  rep.boundary_a = boundary_coefficient(p.m);

  // Fixed chunking so results do not depend on the pool size.
  const int chunks = int(std::min<std::int64_t>(64, sample_count));
  std::vector<ChunkResult> results(chunks);
  const int pool = std::min(worker_count(), chunks);
  std::vector<std::thread> workers;
  workers.reserve(pool);
  for (int w = 0; w < pool; ++w) {
    workers.emplace_back([&, w] {
      for (int c = w; c < chunks; c += pool) {
        const std::int64_t lo = sample_count * c / chunks;
        const std::int64_t hi = sample_count * (c + 1) / chunks;
        results[c] = certify_chunk(p, rep.boundary_a, hi - lo,
                                   seed * 0x9e3779b97f4a7c15ULL + std::uint64_t(c) + 1);
      }
    });
  }
  for (auto& t : workers) t.join();

  rep.min_monotone_defect = std::numeric_limits<double>::infinity();
  rep.min_sector_defect = std::numeric_limits<double>::infinity();
  rep.min_damping_defect = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    rep.min_monotone_defect = std::min(rep.min_monotone_defect, r.min_monotone);
    rep.min_sector_defect = std::min(rep.min_sector_defect, r.min_sector);
    rep.min_damping_defect = std::min(rep.min_damping_defect, r.min_damping);
    rep.max_ratio_over_bound = std::max(rep.max_ratio_over_bound, r.max_ratio);
  }
  return rep;
}

std::string to_text(const CertificationReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "m = " << r.m << "\n"
     << "eps = " << r.eps << "\n"
     << "samples = " << r.samples << "\n"
     << "seed = " << r.seed << "\n"
     << "boundary_a_re = " << r.boundary_a.real() << "\n"
     << "boundary_a_im = " << r.boundary_a.imag() << "\n"
     << "min_monotone_defect = " << r.min_monotone_defect << "\n"
     << "min_sector_defect = " << r.min_sector_defect << "\n"
     << "min_damping_defect = " << r.min_damping_defect << "\n"
     << "max_ratio_over_bound = " << r.max_ratio_over_bound << "\n";
  return os.str();
}

}  // namespace extinguish
