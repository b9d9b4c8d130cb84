#ifndef EXTINGUISH_ERRORS_HPP
#define EXTINGUISH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace extinguish {

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Evaluation of the saturation kernel at its multivalued point (m = eps = 0, z = 0).
struct SingularArgument : std::domain_error {
  using std::domain_error::domain_error;
};

struct NoMultiplierFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
  double residual;
  int iterations;
  NonConvergence(const std::string& what, double res, int iters)
      : std::runtime_error(what), residual(res), iterations(iters) {}
};

struct Unsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoExtinction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace extinguish

#endif
