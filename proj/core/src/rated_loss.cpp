#include "neglr/rated_loss.hpp"

#include <algorithm>
#include <cmath>

#include "neglr/errors.hpp"

namespace neglr {

namespace {

void check_dims(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) throw ShapeError("prediction and target dimensions differ");
}

}  // namespace

void validate(const LossParams& params) {
    if (!(params.sing_epsilon > 0.0)) throw InvalidArgument("sing_epsilon must be positive");
    if (!(params.grad_clip > 0.0)) throw InvalidArgument("grad_clip must be positive");
}

double rated_loss(std::span<const double> pred, std::span<const double> target, double r,
                  const LossParams& params) {
    check_dims(pred, target);
    if (r == 0.0) return 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double u = pred[i] - target[i];
        if (r > 0.0)
            loss += r * u * u / 2.0;
        else
            loss += r * std::log(std::max(std::abs(u), params.sing_epsilon));
    }
    return loss;
}

std::vector<double> rated_loss_grad(std::span<const double> pred, std::span<const double> target,
                                    double r, const LossParams& params) {
    check_dims(pred, target);
    std::vector<double> grad(pred.size(), 0.0);
    if (r == 0.0) return grad;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double u = pred[i] - target[i];
        if (r > 0.0) {
            grad[i] = r * u;
        } else {
            const double floored = std::copysign(std::max(std::abs(u), params.sing_epsilon),
                                                 u == 0.0 ? 1.0 : u);
            grad[i] = std::clamp(r / floored, -params.grad_clip, params.grad_clip);
        }
    }
    return grad;
}

std::vector<double> scaled_sse_grad(std::span<const double> pred, std::span<const double> target,
                                    double r) {
    check_dims(pred, target);
    std::vector<double> grad(pred.size(), 0.0);
    if (r == 0.0) return grad;
    for (std::size_t i = 0; i < pred.size(); ++i) grad[i] = r * (pred[i] - target[i]);
    return grad;
}

}  // namespace neglr
