#ifndef EXTINGUISH_DOMAIN_HPP
#define EXTINGUISH_DOMAIN_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>

namespace extinguish {

using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;
using Complex = std::complex<double>;

// Uniform tensor grid on a box with homogeneous Dirichlet boundary.
// Only interior nodes are stored; the boundary is identically zero.
struct Grid {
  int dim = 1;            // 1, 2 or 3
  int nodes_per_axis = 1; // interior nodes per axis
  double spacing = 1.0;   // h

  double extent() const { return (nodes_per_axis + 1) * spacing; }
  Eigen::Index size() const {
    Eigen::Index n = 1;
    for (int d = 0; d < dim; ++d) n *= nodes_per_axis;
    return n;
  }
  double cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= spacing;
    return v;
  }
  bool operator==(const Grid&) const = default;
};

Grid make_grid(int dim, int nodes_per_axis, double extent);

struct Field {
  Grid grid;
  VectorXcd values;  // flattened interior nodes, x fastest
};

Field zero_field(const Grid& g);
// Product of first Dirichlet sine modes, normalized to unit L2 norm.
Field first_mode(const Grid& g);

// Real potential split into a bounded part and an integrable part.
struct Potential {
  VectorXd v1;  // bounded
  VectorXd v2;  // L^{p_V}
  double p_v = 2.0;
};

Potential zero_potential(const Grid& g);
Potential constant_potential(const Grid& g, double value);
// Dimension rule: p_V = 2 (N=1), 2+beta (N=2), N (N=3).
double potential_exponent(int dim, double beta = 1.0);

// Second-order central stencil with Dirichlet zero padding.
Field laplacian(const Field& u);

Field apply_potential(const Field& u, const Potential& V);

// Real L2 pairing Re <u, v> with the grid measure.
double inner(const Field& u, const Field& v);

double l2_norm(const Field& u);
double lp_norm(const Field& u, double p);
// Forward differences including both boundary faces, so that
// inner(-laplacian(u), u) == h1_seminorm(u)^2 exactly (summation by parts).
double h1_seminorm(const Field& u);
// ||u||_{H1} + ||u||_{L^{2m}} + ||Delta u||_{L2}
double quasi_norm(const Field& u, double m);

// Constant-free check ||V1 u|| <= max|V1| ||u||; throws Unsupported if v2 != 0.
struct PotentialBound {
  double lhs;
  double rhs;
};
PotentialBound check_bounded_potential_bound(const Field& u, const Potential& V);

// Flat binary record: header (dim, nodes, spacing), then interleaved
// re/im as little-endian 64-bit floats.
void save_field(const Field& u, const std::string& path);
Field load_field(const std::string& path);

}  // namespace extinguish

#endif
