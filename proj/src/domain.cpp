#include "extinguish/domain.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "extinguish/errors.hpp"

namespace extinguish {

Grid make_grid(int dim, int nodes_per_axis, double extent) {
  if (dim < 1 || dim > 3) throw DomainError("make_grid: dim must be 1, 2 or 3");
  if (nodes_per_axis < 1) throw DomainError("make_grid: nodes_per_axis must be >= 1");
  if (!(extent > 0.0)) throw DomainError("make_grid: extent must be > 0");
  return Grid{dim, nodes_per_axis, extent / (nodes_per_axis + 1)};
}

Field zero_field(const Grid& g) { return Field{g, VectorXcd::Zero(g.size())}; }

Field first_mode(const Grid& g) {
  Field f = zero_field(g);
  const int n = g.nodes_per_axis;
  const double L = g.extent();
  for (Eigen::Index idx = 0; idx < g.size(); ++idx) {
    Eigen::Index rem = idx;
    double v = 1.0;
    for (int d = 0; d < g.dim; ++d) {
      const int c = int(rem % n);
      rem /= n;
      v *= std::sin(M_PI * (c + 1) * g.spacing / L);
    }
    f.values[idx] = v;
  }
  f.values /= l2_norm(f);
  return f;
}

Potential zero_potential(const Grid& g) {
  return Potential{VectorXd::Zero(g.size()), VectorXd::Zero(g.size()),
                   potential_exponent(g.dim)};
}

Potential constant_potential(const Grid& g, double value) {
  return Potential{VectorXd::Constant(g.size(), value), VectorXd::Zero(g.size()),
                   potential_exponent(g.dim)};
}

double potential_exponent(int dim, double beta) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 + beta;
    case 3: return 3.0;
  }
  throw DomainError("potential_exponent: dim must be 1, 2 or 3");
}

Field laplacian(const Field& u) {
  const Grid& g = u.grid;
  const int n = g.nodes_per_axis;
  const double inv_h2 = 1.0 / (g.spacing * g.spacing);
  Field out = zero_field(g);
  Eigen::Index stride[3] = {1, n, Eigen::Index(n) * n};
  for (Eigen::Index idx = 0; idx < g.size(); ++idx) {
    Eigen::Index rem = idx;
    Complex acc = -2.0 * double(g.dim) * u.values[idx];
    for (int d = 0; d < g.dim; ++d) {
      const int c = int(rem % n);
      rem /= n;
      if (c > 0) acc += u.values[idx - stride[d]];
      if (c < n - 1) acc += u.values[idx + stride[d]];
    }
    out.values[idx] = acc * inv_h2;
  }
  return out;
}

Field apply_potential(const Field& u, const Potential& V) {
  Field out = u;
  out.values.array() *= (V.v1 + V.v2).array().cast<Complex>();
  return out;
}

double inner(const Field& u, const Field& v) {
  return u.grid.cell_volume() * u.values.dot(v.values).real();
}

double l2_norm(const Field& u) {
  return std::sqrt(u.grid.cell_volume()) * u.values.norm();
}

double lp_norm(const Field& u, double p) {
  if (!(p > 0.0)) throw DomainError("lp_norm: p must be > 0");
  const double s = u.values.array().abs().pow(p).sum();
  return std::pow(u.grid.cell_volume() * s, 1.0 / p);
}

double h1_seminorm(const Field& u) {
  const Grid& g = u.grid;
  const int n = g.nodes_per_axis;
  Eigen::Index stride[3] = {1, n, Eigen::Index(n) * n};
  double acc = 0.0;
  for (Eigen::Index idx = 0; idx < g.size(); ++idx) {
    Eigen::Index rem = idx;
    for (int d = 0; d < g.dim; ++d) {
      const int c = int(rem % n);
      rem /= n;
      // Face to the left neighbor (the boundary face uses the zero pad);
      // the rightmost node also owns its boundary face.
      const Complex left = c > 0 ? u.values[idx - stride[d]] : Complex(0.0);
      acc += std::norm(u.values[idx] - left);
      if (c == n - 1) acc += std::norm(u.values[idx]);
    }
  }
  return std::sqrt(g.cell_volume() * acc) / g.spacing;
}

double quasi_norm(const Field& u, double m) {
  if (!(m > 0.0 && m < 1.0)) throw DomainError("quasi_norm: requires 0 < m < 1");
  const double l2 = l2_norm(u);
  const double semi = h1_seminorm(u);
  return std::sqrt(l2 * l2 + semi * semi) + lp_norm(u, 2.0 * m) + l2_norm(laplacian(u));
}

PotentialBound check_bounded_potential_bound(const Field& u, const Potential& V) {
  if (V.v2.size() > 0 && V.v2.cwiseAbs().maxCoeff() != 0.0)
    throw Unsupported("check_bounded_potential_bound: only the bounded part is checkable");
  Field vu = u;
  vu.values.array() *= V.v1.array().cast<Complex>();
  const double vmax = V.v1.size() > 0 ? V.v1.cwiseAbs().maxCoeff() : 0.0;
  return PotentialBound{l2_norm(vu), vmax * l2_norm(u)};
}

void save_field(const Field& u, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("save_field: cannot open " + path);
  const std::int32_t dim = u.grid.dim;
  const std::int32_t nodes = u.grid.nodes_per_axis;
  const double h = u.grid.spacing;
  os.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  os.write(reinterpret_cast<const char*>(&nodes), sizeof nodes);
  os.write(reinterpret_cast<const char*>(&h), sizeof h);
  os.write(reinterpret_cast<const char*>(u.values.data()),
           std::streamsize(sizeof(Complex)) * u.values.size());
}

Field load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("load_field: cannot open " + path);
  std::int32_t dim = 0, nodes = 0;
  double h = 0.0;
  is.read(reinterpret_cast<char*>(&dim), sizeof dim);
  is.read(reinterpret_cast<char*>(&nodes), sizeof nodes);
  is.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!is || dim < 1 || dim > 3 || nodes < 1 || !(h > 0.0))
    throw DomainError("load_field: bad header in " + path);
  Field f{Grid{int(dim), int(nodes), h}, VectorXcd(Grid{int(dim), int(nodes), h}.size())};
  is.read(reinterpret_cast<char*>(f.values.data()),
          std::streamsize(sizeof(Complex)) * f.values.size());
  if (!is) throw DomainError("load_field: truncated record in " + path);
  return f;
}

}  // namespace extinguish
