#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace alcoint {

// Invalid model/plan/limit configuration (bad matrices, inconsistent limits, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// API misuse (wrong dimension for a univariate-only routine, ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input arrays too short (e.g. missing filter warm-up rows).
struct LengthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure of an estimation step (singular Gram matrix, ...).
struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Limit regime the samplers refuse (signed-infinite penalties in the rate-T
// objective); callers should fall back to the univariate closed-form limits.
struct UnsupportedRegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative solver ran out of iterations; carries the last iterate so callers
// can inspect how far it got.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& msg, std::vector<double> iterate,
                   double residual, int iters)
      : std::runtime_error(msg),
        last_iterate(std::move(iterate)),
        kkt_residual(residual),
        iterations(iters) {}

  std::vector<double> last_iterate;
  double kkt_residual;
  int iterations;
};

}  // namespace alcoint
