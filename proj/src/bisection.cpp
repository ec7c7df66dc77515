#include "unifit/bisection.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "unifit/feasibility.hpp"
#include "unifit/gradient_descent.hpp"
#include "unifit/model.hpp"

namespace unifit {

namespace {

// Smallest k >= 0 with u0 / 2^k < epsilon (halving is exact in binary).
int iterations_to_close(double u0, double epsilon) {
  int k = 0;
  double gap = u0;
  while (gap >= epsilon && k < 1100) {
    gap /= 2.0;
    ++k;
  }
  return k;
}

// A phase-1 vertex tends to leave almost every row tight at its bound, which
// ties all per-sample deviations at the certified level and starves the
// outlier-removal procedure of structure. Among the weights that certify the
// final level, prefer the one the squared error likes: descend the summed
// squared error from the vertex and keep the last iterate that still
// satisfies every level-L row exactly, so the certificate never weakens.
// When the certified set has room (underdetermined data) this spreads the
// per-sample deviations into an ordinary least-squares residual profile with
// the genuinely hard samples on top; in the determined regime the descent
// exits the set immediately and the vertex is kept.
WeightVector centered_witness(const Dataset& z, const Activation& act, double level,
                              const WeightVector& vertex) {
  constexpr int kMaxSteps = 400;
  constexpr int kProjectionSweeps = 25;
  const std::vector<IntervalConstraint> certified = build_constraints(z, act, level);
  const std::size_t n = z.feature_count();

  std::vector<double> gain;  // 1 / ||(1, x_i)||^2 per row
  double curvature = 0.0;    // squared-error curvature is at most 2 sum ||(1,x)||^2
  gain.reserve(certified.size());
  for (const IntervalConstraint& row : certified) {
    double norm_sq = 1.0;
    for (double v : row.coefficients) norm_sq += v * v;
    gain.push_back(1.0 / norm_sq);
    curvature += 2.0 * norm_sq;
  }
  const double step_size = 1.0 / curvature;

  // Kaczmarz sweeps back onto the certified bands; true once a full pass
  // needed no correction, i.e. every row holds exactly.
  const auto project = [&](WeightVector& w) {
    for (int sweep = 0; sweep < kProjectionSweeps; ++sweep) {
      double moved = 0.0;
      for (std::size_t r = 0; r < certified.size(); ++r) {
        const IntervalConstraint& band = certified[r];
        const double pre = pre_activation(w, band.coefficients);
        const double clamped = std::clamp(pre, band.lower, band.upper);
        if (clamped == pre) continue;
        const double shift = (clamped - pre) * gain[r];
        w.bias += shift;
        for (std::size_t j = 0; j < n; ++j) w.weights[j] += shift * band.coefficients[j];
        moved = std::max(moved, std::fabs(clamped - pre));
      }
      if (moved == 0.0) return true;
    }
    return false;
  };

  WeightVector best = vertex;
  WeightVector w = vertex;
  for (int step = 0; step < kMaxSteps; ++step) {
    const WeightVector grad = mse_gradient(w, act, z);
    w.bias -= step_size * grad.bias;
    for (std::size_t j = 0; j < n; ++j) w.weights[j] -= step_size * grad.weights[j];
    if (!project(w)) break;
    best = w;
  }
  return best;
}

}  // namespace

std::pair<double, double> initial_bounds(const Dataset& z, const Activation& a) {
  if (z.empty()) throw std::invalid_argument("dataset is empty");
  const double sigma0 = activate(a, 0.0);
  double upper = 0.0;
  for (const Sample& s : z.samples()) {
    upper = std::max(upper, std::fabs(s.target - sigma0));
  }
  return {0.0, upper};
}

BisectionReport train_uniform(const Dataset& z, const BisectionConfig& cfg) {
  if (z.empty()) throw std::invalid_argument("dataset is empty");
  if (!std::isfinite(cfg.epsilon) || cfg.epsilon <= 0.0) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (cfg.max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be at least 1");
  }
  const Activation act(cfg.alpha);

  const double u0 = initial_bounds(z, act).second;

  BisectionReport report;
  report.weights = WeightVector(z.feature_count());  // w = 0 certifies u0
  report.initial_upper = u0;

  const int needed = iterations_to_close(u0, cfg.epsilon);
  if (needed > cfg.max_iterations) {
    std::cerr << "train_uniform: max_iterations=" << cfg.max_iterations
              << " cannot close the bracket (needs " << needed << " at epsilon="
              << cfg.epsilon << ")\n";
  }

  // The bracket is carried as exact dyadic fractions of u0, so the gap is
  // u0 / 2^k by construction and never drifts with endpoint rounding.
  double unit_lower = 0.0;
  double unit_upper = 1.0;
  int k = 0;
  bool any_feasible_midpoint = false;
  double last_feasible_level = u0;
  while (k < cfg.max_iterations && u0 * (unit_upper - unit_lower) >= cfg.epsilon) {
    const double unit_mid = (unit_lower + unit_upper) / 2.0;
    if (unit_mid == unit_lower || unit_mid == unit_upper) break;  // out of precision
    const double midpoint = u0 * unit_mid;
    const auto constraints = build_constraints(z, act, midpoint);
    const FeasibilityResult feas = solve_feasibility(constraints, z.feature_count());
    ++k;
    report.trace.push_back(BisectionStep{midpoint, feas.feasible(), feas.stats.pivots});
    if (feas.feasible()) {
      unit_upper = unit_mid;
      report.weights = *feas.witness;
      any_feasible_midpoint = true;
      last_feasible_level = midpoint;
    } else {
      unit_lower = unit_mid;
    }
  }

  if (any_feasible_midpoint) {
    report.weights = centered_witness(z, act, last_feasible_level, report.weights);
  }

  report.lower = u0 * unit_lower;
  report.upper = u0 * unit_upper;
  report.iterations = k;
  report.converged = (u0 * (unit_upper - unit_lower) < cfg.epsilon);
  return report;
}

}  // namespace unifit
