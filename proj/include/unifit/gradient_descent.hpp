#pragma once

#include <cstdint>

#include "unifit/types.hpp"

namespace unifit {

struct GdConfig {
  double learning_rate = 1e-3;
  int epochs = 500;
  std::uint64_t init_seed = 0;
  double init_scale = 0.01;   // weights start uniform in [-init_scale, init_scale]
  bool standardize = false;   // opt-in per-feature standardization during training
};

/// Gradient of the summed squared error with respect to (bias, weights).
/// The activation derivative at the kink u = 0 is taken as 1.
WeightVector mse_gradient(const WeightVector& w, const Activation& a, const Dataset& z);

/// Full-batch gradient descent from a small seeded random initialization.
/// With standardize set, features are standardized internally and the
/// returned weights are mapped back to raw feature space. Throws
/// ConvergenceError when the loss exceeds 1e6 times its initial value or
/// becomes non-finite.
WeightVector train_mse(const Dataset& z, const GdConfig& cfg, const Activation& a);

}  // namespace unifit
