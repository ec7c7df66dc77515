#include "unifit/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "unifit/model.hpp"

namespace unifit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPhase1Threshold = 1e-8;  // objective value accepted as feasible

void validate_constraints(const std::vector<IntervalConstraint>& constraints,
                          std::size_t n) {
  for (std::size_t r = 0; r < constraints.size(); ++r) {
    const IntervalConstraint& c = constraints[r];
    if (c.coefficients.size() != n) {
      throw std::invalid_argument("constraint " + std::to_string(r) + " has " +
                                  std::to_string(c.coefficients.size()) +
                                  " coefficients, expected " + std::to_string(n));
    }
    if (std::isnan(c.lower) || std::isnan(c.upper) || c.lower == kInf ||
        c.upper == -kInf) {
      throw std::invalid_argument("constraint " + std::to_string(r) +
                                  " has a non-finite bound that is not a valid "
                                  "-inf lower / +inf upper sentinel");
    }
    for (double v : c.coefficients) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("constraint " + std::to_string(r) +
                                    " has a non-finite coefficient");
      }
    }
  }
}

struct SidedRow {
  // le-form: <coeff, v> <= rhs over the original variables (bias first)
  std::vector<double> coeff;
  double rhs;
};

}  // namespace

double feasibility_tolerance(const std::vector<IntervalConstraint>& constraints) {
  double scale = 0.0;
  for (const IntervalConstraint& c : constraints) {
    if (std::isfinite(c.lower)) scale = std::max(scale, std::fabs(c.lower));
    if (std::isfinite(c.upper)) scale = std::max(scale, std::fabs(c.upper));
  }
  return 1e-8 * (1.0 + scale);
}

std::vector<IntervalConstraint> build_constraints(const Dataset& z, const Activation& a,
                                                  double level) {
  if (z.empty()) throw std::invalid_argument("dataset is empty");
  if (!std::isfinite(level) || level < 0.0) {
    throw std::invalid_argument("level must be a nonnegative finite value");
  }
  std::vector<IntervalConstraint> rows;
  rows.reserve(z.size());
  for (const Sample& s : z.samples()) {
    rows.push_back(IntervalConstraint{activate_inverse(a, s.target - level),
                                      activate_inverse(a, s.target + level),
                                      s.features});
  }
  return rows;
}

FeasibilityResult solve_feasibility(const std::vector<IntervalConstraint>& constraints,
                                    std::size_t n) {
  validate_constraints(constraints, n);

  const std::size_t d = n + 1;  // bias plus n weights
  FeasibilityResult result;

  // One-sided rows in le-form; a >= row is negated on entry.
  std::vector<SidedRow> rows;
  double coeff_scale = 1.0;
  for (const IntervalConstraint& c : constraints) {
    for (double v : c.coefficients) coeff_scale = std::max(coeff_scale, std::fabs(v));
    std::vector<double> full(d);
    full[0] = 1.0;
    std::copy(c.coefficients.begin(), c.coefficients.end(), full.begin() + 1);
    if (std::isfinite(c.upper)) {
      rows.push_back(SidedRow{full, c.upper});
    }
    if (std::isfinite(c.lower)) {
      for (double& v : full) v = -v;
      rows.push_back(SidedRow{std::move(full), -c.lower});
    }
  }

  const std::size_t m = rows.size();
  if (m == 0) {
    result.status = FeasibilityResult::Status::feasible;
    result.witness = WeightVector(n);
    return result;
  }

  // Artificial variables are needed where the slack alone cannot start basic.
  std::size_t artificial_count = 0;
  for (const SidedRow& r : rows) {
    if (r.rhs < 0.0) ++artificial_count;
  }

  const std::size_t struct_cols = 2 * d;  // split v = p - q, p,q >= 0
  const std::size_t ncols = struct_cols + m + artificial_count;
  const std::size_t width = ncols + 1;  // rhs in the last column

  std::vector<double> tab(m * width, 0.0);
  std::vector<std::size_t> basic(m);
  std::vector<char> is_artificial(ncols, 0);
  std::vector<char> banned(ncols, 0);

  std::size_t next_artificial = struct_cols + m;
  for (std::size_t i = 0; i < m; ++i) {
    double* row = tab.data() + i * width;
    const double sign = rows[i].rhs < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double v = sign * rows[i].coeff[j];
      row[j] = v;
      row[d + j] = -v;
    }
    row[struct_cols + i] = sign;  // slack (surplus when negated)
    row[ncols] = sign * rows[i].rhs;
    if (sign < 0.0) {
      row[next_artificial] = 1.0;
      is_artificial[next_artificial] = 1;
      basic[i] = next_artificial++;
    } else {
      basic[i] = struct_cols + i;
    }
  }

  // Phase-1 reduced costs: c_j - sum of artificial-basic rows, value = that sum.
  std::vector<double> zrow(ncols, 0.0);
  double obj_value = 0.0;
  for (std::size_t j = 0; j < ncols; ++j) zrow[j] = is_artificial[j] ? 1.0 : 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!is_artificial[basic[i]]) continue;
    const double* row = tab.data() + i * width;
    for (std::size_t j = 0; j < ncols; ++j) zrow[j] -= row[j];
    obj_value += row[ncols];
  }

  const double tol = 1e-9 * (1.0 + coeff_scale);
  const long stall_limit = std::max<long>(100, static_cast<long>(m));
  const long pivot_limit = 200000;
  bool bland = false;
  long stall_count = 0;
  double prev_obj = obj_value;
  SolverStats stats;

  std::vector<long> rejected_pass(ncols, -1);
  while (true) {
    ++stats.iterations;

    // Entering column; columns with no usable pivot row this pass are
    // skipped (cannot occur for an exact phase-1, but tiny pivots can).
    std::size_t enter = ncols;
    std::size_t leave = m;
    while (true) {
      enter = ncols;
      if (bland) {
        for (std::size_t j = 0; j < ncols; ++j) {
          if (!banned[j] && rejected_pass[j] != stats.iterations && zrow[j] < -tol) {
            enter = j;
            break;
          }
        }
      } else {
        double best = -tol;
        for (std::size_t j = 0; j < ncols; ++j) {
          if (!banned[j] && rejected_pass[j] != stats.iterations && zrow[j] < best) {
            best = zrow[j];
            enter = j;
          }
        }
      }
      if (enter == ncols) break;  // optimal

      // Ratio test: min ratio; ties go to the largest pivot element
      // (then lowest row), or under Bland's rule to the lowest basic index.
      leave = m;
      double best_ratio = 0.0;
      double best_piv = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double piv = tab[i * width + enter];
        if (piv <= tol) continue;
        const double ratio = std::max(tab[i * width + ncols], 0.0) / piv;
        if (leave == m) {
          leave = i;
          best_ratio = ratio;
          best_piv = piv;
          continue;
        }
        const double window =
            (bland ? 1e-12 : 1e-9) * (1.0 + std::min(ratio, best_ratio));
        if (ratio < best_ratio - window) {
          leave = i;
          best_ratio = ratio;
          best_piv = piv;
        } else if (ratio <= best_ratio + window) {
          if (bland ? basic[i] < basic[leave] : piv > best_piv) {
            leave = i;
            best_ratio = std::min(ratio, best_ratio);
            best_piv = piv;
          }
        }
      }
      if (leave != m) break;
      rejected_pass[enter] = stats.iterations;  // try the next candidate
    }

    if (enter == ncols) break;  // no improving column: phase-1 optimum

    // Pivot on (leave, enter).
    double* prow = tab.data() + leave * width;
    const double inv = 1.0 / prow[enter];
    for (std::size_t j = 0; j < width; ++j) prow[j] *= inv;
    prow[enter] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      double* row = tab.data() + i * width;
      const double f = row[enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) row[j] -= f * prow[j];
      row[enter] = 0.0;
    }
    const double zf = zrow[enter];
    if (zf != 0.0) {
      obj_value += zf * prow[ncols];
      for (std::size_t j = 0; j < ncols; ++j) zrow[j] -= zf * prow[j];
      zrow[enter] = 0.0;
    }
    if (is_artificial[basic[leave]]) banned[basic[leave]] = 1;
    basic[leave] = enter;
    ++stats.pivots;

    if (obj_value > prev_obj - 1e-12 * (1.0 + std::fabs(prev_obj))) {
      if (++stall_count > stall_limit) bland = true;
    } else {
      stall_count = 0;
    }
    prev_obj = obj_value;

    if (stats.pivots > pivot_limit) {
      throw std::runtime_error("phase-1 simplex exceeded the pivot limit (" +
                               std::to_string(pivot_limit) + ")");
    }
  }

  result.stats = stats;
  if (obj_value > kPhase1Threshold) {
    result.status = FeasibilityResult::Status::infeasible;
    return result;
  }

  // Read the witness off the basis: w_j = p_j - q_j.
  std::vector<double> value(ncols, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    value[basic[i]] = std::max(tab[i * width + ncols], 0.0);
  }
  WeightVector witness(n);
  witness.bias = value[0] - value[d];
  for (std::size_t j = 0; j < n; ++j) {
    witness.weights[j] = value[1 + j] - value[d + 1 + j];
  }

  // Independent row-by-row check before handing the witness out.
  const double tau = feasibility_tolerance(constraints);
  for (std::size_t r = 0; r < constraints.size(); ++r) {
    const IntervalConstraint& c = constraints[r];
    double pre = witness.bias;
    for (std::size_t j = 0; j < n; ++j) pre += c.coefficients[j] * witness.weights[j];
    if (pre < c.lower - tau || pre > c.upper + tau) {
      throw std::runtime_error("phase-1 witness failed verification on row " +
                               std::to_string(r) + " (value " + std::to_string(pre) +
                               " outside [" + std::to_string(c.lower) + ", " +
                               std::to_string(c.upper) + "] by more than tolerance)");
    }
  }

  result.status = FeasibilityResult::Status::feasible;
  result.witness = std::move(witness);
  return result;
}

}  // namespace unifit
