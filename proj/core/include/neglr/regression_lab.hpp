#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "neglr/lr_channel.hpp"
#include "neglr/mlp.hpp"

namespace neglr {

struct TrainConfig {
    double global_lr = 0.01;  ///< mu
    std::size_t epochs = 5000;
    std::uint64_t seed = 0;
    double grad_clip = 10.0;
    double sing_epsilon = 1e-3;
};

void validate(const TrainConfig& config);

struct SinePoint {
    double x = 0.0;
    double z = 0.0;
};

/// x_i = -5 + 0.25 i, z_i ~ Uniform[-1, 1].
struct SineDataset {
    std::vector<SinePoint> points;
    std::uint64_t seed = 0;

    std::vector<double> xs() const;
};

SineDataset gen_sine_dataset(std::size_t n, std::uint64_t seed);
inline SineDataset gen_sine_dataset(std::uint64_t seed) { return gen_sine_dataset(40, seed); }

struct EvalReport {
    std::vector<double> grid;
    std::vector<double> predictions;
    std::vector<double> targets;
    double mse = 0.0;
};

/// Predictions against sin(x) on `grid`. Throws InvalidArgument when empty.
EvalReport evaluate_vs_sine(const Mlp& net, std::span<const double> grid);

/// 2001 evenly spaced points on [-5, 5].
std::vector<double> sine_eval_grid(std::size_t points = 2001, double lo = -5.0, double hi = 5.0);

struct LrChannelOptions {
    bool invert_gradient = false;
    bool resample_targets = false;
};

struct TrainingHistory {
    /// MSE against sin(x) on the training inputs after each epoch.
    std::vector<double> epoch_mse;
    /// Targets and factors of the last epoch that was trained.
    std::vector<RatedExample> last_batch;
};

/// Trains `net` on rated sine examples. Every epoch rates the current
/// targets with dist_sine and `scheme`, then visits them in a freshly
/// shuffled order with per-example update scale global_lr * factor. With
/// `invert_gradient`, negative factors use the repulsive branch of
/// rated_loss; otherwise the squared-error gradient is scaled by the factor.
/// With `resample_targets`, every epoch after the first redraws all z.
///
/// Throws ExplosionError if any parameter becomes non-finite.
TrainingHistory train_lr_channel(Mlp& net, const SineDataset& data, Scheme scheme,
                                 LrChannelOptions options, const TrainConfig& config);

/// Conventional supervised fit on (x_i, sin x_i) with factor 1, same
/// visiting order machinery as train_lr_channel.
TrainingHistory train_baseline(Mlp& net, const SineDataset& data, const TrainConfig& config);

}  // namespace neglr
