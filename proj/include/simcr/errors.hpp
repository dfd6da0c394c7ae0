#pragma once

#include <stdexcept>
#include <string>

namespace simcr {

// Error taxonomy. The CLI maps these onto process exit codes:
// ConfigError -> 2, InfeasibleError -> 3, NumericalError (and children) -> 4.

// Bad scenario files, out-of-range parameters, missing upstream artifacts.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A QoS budget that no beamformer can satisfy (interference headroom <= 0).
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& msg, int subcarrier = -1)
      : std::runtime_error(msg), subcarrier(subcarrier) {}
  int subcarrier;
};

// Numerical failures: invalid inputs, singular systems, search breakdowns.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInputError : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularityError : NumericalError {
  explicit SingularityError(const std::string& msg, double cond_estimate)
      : NumericalError(msg), cond_estimate(cond_estimate) {}
  double cond_estimate;
};

// Bracketing phase of the dual search exhausted its doubling budget.
struct BracketError : NumericalError {
  using NumericalError::NumericalError;
};

// Bisection exhausted its iteration budget; carries the final gap.
struct ToleranceError : NumericalError {
  explicit ToleranceError(const std::string& msg, double final_gap)
      : NumericalError(msg), final_gap(final_gap) {}
  double final_gap;
};

// Geometry where a direction is undefined (target on the array's polar axis).
struct DegenerateGeometryError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace simcr
