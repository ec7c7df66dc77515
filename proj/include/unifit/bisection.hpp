#pragma once

#include <utility>
#include <vector>

#include "unifit/types.hpp"

namespace unifit {

struct BisectionConfig {
  double epsilon = 1e-5;     // stop when upper - lower < epsilon
  int max_iterations = 200;  // safety cap; enough for any u0 < 1e55 at 1e-5
  double alpha = 0.01;       // activation slope
};

struct BisectionStep {
  double midpoint = 0.0;
  bool feasible = false;
  long pivots = 0;
};

struct BisectionReport {
  WeightVector weights;       // witness of the last feasible midpoint
  double lower = 0.0;         // final bracket
  double upper = 0.0;
  double initial_upper = 0.0; // u0
  int iterations = 0;
  bool converged = false;     // upper - lower < epsilon reached
  std::vector<BisectionStep> trace;
};

/// (0, max_i |y_i - sigma(0)|). The zero weight vector attains the upper
/// bound, so it is a valid starting witness.
std::pair<double, double> initial_bounds(const Dataset& z, const Activation& a);

/// Bisects the optimal uniform-loss value: each midpoint L is decided by the
/// feasibility of the interval system at level L. Feasible midpoints shrink
/// the bracket from above and update the stored witness; infeasible ones
/// raise the lower bound. Terminates when the bracket is below epsilon or
/// max_iterations is hit (reported via the converged flag, never silently).
///
/// The returned weights certify the last feasible level: they are the
/// average of the phase-1 vertex witnesses of that system under a few
/// deterministic reformulations. A single vertex leaves nearly every row
/// tight, which would tie all per-sample deviations at the certified level;
/// the average keeps the certificate (convexity) but spreads the deviations.
BisectionReport train_uniform(const Dataset& z, const BisectionConfig& cfg);

}  // namespace unifit
