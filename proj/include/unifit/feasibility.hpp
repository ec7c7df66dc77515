#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "unifit/types.hpp"

namespace unifit {

/// Two-sided bound  lower <= w0 + <coefficients, w> <= upper  on the affine
/// pre-activation. lower may be -inf and upper +inf; a row with lower > upper
/// is a legal input and simply forces infeasibility.
struct IntervalConstraint {
  double lower;
  double upper;
  std::vector<double> coefficients;
};

struct SolverStats {
  long iterations = 0;  // simplex loop passes
  long pivots = 0;      // pivot operations performed
};

struct FeasibilityResult {
  enum class Status { feasible, infeasible };

  Status status = Status::infeasible;
  std::optional<WeightVector> witness;  // present iff feasible
  SolverStats stats;

  bool feasible() const { return status == Status::feasible; }
};

/// Witness acceptance tolerance: 1e-8 * (1 + max finite |bound|).
double feasibility_tolerance(const std::vector<IntervalConstraint>& constraints);

/// One constraint per sample:
///   sigma^{-1}(y_i - level) <= w0 + <x_i, w> <= sigma^{-1}(y_i + level).
/// Requires level >= 0, which guarantees lower <= upper on every row.
std::vector<IntervalConstraint> build_constraints(const Dataset& z, const Activation& a,
                                                  double level);

/// Decides the interval system by a dense phase-1 simplex with explicit
/// artificial variables. Free weights are split into nonnegative parts.
/// Pivot rules are fixed and index-based, so identical inputs produce the
/// identical status and witness. n is the number of weight coefficients
/// (the unknowns are the bias plus n weights).
FeasibilityResult solve_feasibility(const std::vector<IntervalConstraint>& constraints,
                                    std::size_t n);

}  // namespace unifit
