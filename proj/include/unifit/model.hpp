#pragma once

#include <functional>
#include <vector>

#include "unifit/types.hpp"

namespace unifit {

/// sigma(t) = alpha*t for t <= 0, t for t > 0. Strictly increasing.
double activate(const Activation& a, double t);

/// sigma^{-1}(s) = s/alpha for s <= 0, s for s > 0.
double activate_inverse(const Activation& a, double s);

/// The affine value w0 + <weights, x> fed into the activation.
double pre_activation(const WeightVector& w, const std::vector<double>& x);

/// Network output sigma(w0 + <weights, x>).
double forward(const WeightVector& w, const Activation& a, const std::vector<double>& x);

/// max_i |y_i - forward(x_i)|, the worst absolute deviation over the set.
double uniform_loss(const WeightVector& w, const Activation& a, const Dataset& z);

/// Same value computed as max_i max{y_i - out_i, out_i - y_i}.
/// Equal to uniform_loss on every input; kept as a separate code path so the
/// equality stays testable.
double uniform_loss_maxrep(const WeightVector& w, const Activation& a, const Dataset& z);

/// Summed squared error sum_i (y_i - forward(x_i))^2 (sum, not mean).
double mse_loss(const WeightVector& w, const Activation& a, const Dataset& z);

/// Convex combination lambda*x + (1-lambda)*y of two weight vectors.
WeightVector lerp(double lambda, const WeightVector& x, const WeightVector& y);

/// Samples f along the segment [w_a, w_b] at num_lambda equally spaced points
/// and checks f(lambda*a + (1-lambda)*b) <= max{f(a), f(b)} plus a slack of
/// 1e-9 * (1 + |max{f(a), f(b)}|) to absorb floating-point noise at max ties.
bool is_quasiconvex_on_segment(const std::function<double(const WeightVector&)>& f,
                               const WeightVector& w_a, const WeightVector& w_b,
                               int num_lambda);

}  // namespace unifit
