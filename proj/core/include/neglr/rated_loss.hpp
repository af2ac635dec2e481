#pragma once

#include <span>
#include <vector>

namespace neglr {

/// Guards for the repulsive branch, whose gradient r/u has a pole at u = 0.
struct LossParams {
    double sing_epsilon = 1e-3;  ///< floor on |prediction - target|
    double grad_clip = 10.0;     ///< bound on each repulsive gradient component
};

void validate(const LossParams& params);

/// Per-example loss with learning-rate factor r, summed over components
/// with u = pred - target:
///   r > 0:  r * u^2 / 2
///   r < 0:  r * log(max(|u|, sing_epsilon))
///   r == 0: 0
double rated_loss(std::span<const double> pred, std::span<const double> target, double r,
                  const LossParams& params = {});

/// d(rated_loss)/d(pred). Positive branch r*u; negative branch r/u with |u|
/// floored at sing_epsilon (sign of u kept, u == 0 treated as positive) and
/// the result clipped to +-grad_clip.
std::vector<double> rated_loss_grad(std::span<const double> pred, std::span<const double> target,
                                    double r, const LossParams& params = {});

/// r * u for every r: the squared-error gradient scaled by the factor, with
/// no inversion for negative factors.
std::vector<double> scaled_sse_grad(std::span<const double> pred, std::span<const double> target,
                                    double r);

}  // namespace neglr
