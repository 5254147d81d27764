#pragma once

#include <span>
#include <vector>

#include "ige/types.hpp"

namespace ige {

/// Anisotropic total variation: sum over horizontal and vertical neighbor
/// pairs and channels of |difference|.
double tv_loss(const ImageView& theta, Parallelism par = {});

/// Smoothed count of color changes: sum over 4-adjacent pixel pairs of
/// 2 * (sigmoid(sigmoid_alpha * ||theta_i - theta_j||) - 1/2).
double surface_loss(const ImageView& theta, double sigmoid_alpha, Parallelism par = {});

/// tv_weight * TV + surf_weight * surface + lambda * ||x - theta||^2.
double denoise_objective(const ImageView& theta, const ImageView& x, const DenoiseParams& params,
                         Parallelism par = {});

/// Writes the gradient of denoise_objective into `grad` (same length as
/// theta.values) and returns the objective. Non-differentiable points
/// (|difference| = 0) take subgradient 0.
double denoise_gradient(const ImageView& theta, const ImageView& x, const DenoiseParams& params,
                        std::span<double> grad, Parallelism par = {});

struct DenoiseState {
  std::vector<double> theta;
  int iteration = 0;
  /// Objective before the first update and after every iteration.
  std::vector<double> loss_history;
};

struct DenoiseResult {
  Image output;
  DenoiseState state;
  /// Updates that would have raised the objective. Each one is discarded and
  /// halves the step size.
  int rejected_steps = 0;
  double final_step_size = 0.0;
};

/// Gradient descent from theta = x for params.max_iters iterations. The
/// returned image is theta clamped to [0, 1].
DenoiseResult denoise(const Image& x, const DenoiseParams& params, Parallelism par = {});

}  // namespace ige
