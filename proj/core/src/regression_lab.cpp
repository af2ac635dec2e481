#include "neglr/regression_lab.hpp"

#include <cmath>
#include <numeric>

#include "neglr/errors.hpp"
#include "neglr/rated_loss.hpp"
#include "neglr/rng.hpp"

namespace neglr {

namespace {

constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kResampleStream = 2;

double training_mse(const Mlp& net, std::span<const SinePoint> points) {
    double sum = 0.0;
    for (const auto& p : points) {
        const double x[1] = {p.x};
        const double err = net.predict(x)[0] - std::sin(p.x);
        sum += err * err;
    }
    return sum / static_cast<double>(points.size());
}

void check_regression_net(const Mlp& net) {
    if (net.input_dim() != 1 || net.output_dim() != 1)
        throw ShapeError("regression expects a scalar-in, scalar-out network");
}

enum class Update { Sse, Rated };

// One epoch of per-example SGD over `batch` in shuffled order.
void run_epoch(Mlp& net, const std::vector<RatedExample>& batch, Update update,
               const TrainConfig& config, Rng& shuffle_rng) {
    const LossParams loss{config.sing_epsilon, config.grad_clip};
    std::vector<std::size_t> order(batch.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_rng.shuffle(std::span(order));
    for (std::size_t idx : order) {
        const auto& ex = batch[idx];
        if (ex.factor == 0.0) continue;
        auto fwd = net.forward(ex.x);
        const auto out_grad = update == Update::Rated
                                  ? rated_loss_grad(fwd.output, ex.z, ex.factor, loss)
                                  : scaled_sse_grad(fwd.output, ex.z, ex.factor);
        net.train_step(fwd.trace, out_grad, config.global_lr, config.grad_clip);
    }
    if (!net.all_finite()) throw ExplosionError("network parameters became non-finite");
}

}  // namespace

void validate(const TrainConfig& config) {
    if (!(config.global_lr > 0.0) || !std::isfinite(config.global_lr))
        throw InvalidArgument("global_lr must be positive");
    if (!(config.grad_clip > 0.0)) throw InvalidArgument("grad_clip must be positive");
    if (!(config.sing_epsilon > 0.0)) throw InvalidArgument("sing_epsilon must be positive");
}

std::vector<double> SineDataset::xs() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.x);
    return out;
}

SineDataset gen_sine_dataset(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("dataset needs at least one point");
    SineDataset data;
    data.seed = seed;
    Rng rng(seed);
    data.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        data.points.push_back({-5.0 + 0.25 * static_cast<double>(i), rng.uniform(-1.0, 1.0)});
    return data;
}

std::vector<double> sine_eval_grid(std::size_t points, double lo, double hi) {
    if (points == 0) return {};
    if (points == 1) return {lo};
    std::vector<double> grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);
    grid.back() = hi;
    return grid;
}

EvalReport evaluate_vs_sine(const Mlp& net, std::span<const double> grid) {
    if (grid.empty()) throw InvalidArgument("evaluation grid is empty");
    check_regression_net(net);
    EvalReport report;
    report.grid.assign(grid.begin(), grid.end());
    double sum = 0.0;
    for (double x : grid) {
        const double in[1] = {x};
        const double pred = net.predict(in)[0];
        const double target = std::sin(x);
        report.predictions.push_back(pred);
        report.targets.push_back(target);
        sum += (pred - target) * (pred - target);
    }
    report.mse = sum / static_cast<double>(grid.size());
    return report;
}

TrainingHistory train_lr_channel(Mlp& net, const SineDataset& data, Scheme scheme,
                                 LrChannelOptions options, const TrainConfig& config) {
    validate(config);
    check_regression_net(net);
    if (data.points.empty()) throw EmptyInput("training set is empty");

    const Rng root(config.seed);
    Rng shuffle_rng = root.split(kShuffleStream);
    Rng resample_rng = root.split(kResampleStream);
    const Update update =
        options.invert_gradient && scheme == Scheme::SignedUnit ? Update::Rated : Update::Sse;

    std::vector<ExamplePair> pairs;
    pairs.reserve(data.points.size());
    for (const auto& p : data.points) pairs.push_back({{p.x}, {p.z}});

    TrainingHistory history;
    history.epoch_mse.reserve(config.epochs);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (options.resample_targets && epoch > 0)
            for (auto& p : pairs) p.z[0] = resample_rng.uniform(-1.0, 1.0);
        history.last_batch = rate_examples(pairs, dist_sine_vec, scheme);
        run_epoch(net, history.last_batch, update, config, shuffle_rng);
        history.epoch_mse.push_back(training_mse(net, data.points));
    }
    if (history.last_batch.empty()) history.last_batch = rate_examples(pairs, dist_sine_vec, scheme);
    return history;
}

TrainingHistory train_baseline(Mlp& net, const SineDataset& data, const TrainConfig& config) {
    validate(config);
    check_regression_net(net);
    if (data.points.empty()) throw EmptyInput("training set is empty");

    Rng shuffle_rng = Rng(config.seed).split(kShuffleStream);
    std::vector<RatedExample> batch;
    batch.reserve(data.points.size());
    for (const auto& p : data.points) batch.push_back({{p.x}, {std::sin(p.x)}, 1.0});

    TrainingHistory history;
    history.epoch_mse.reserve(config.epochs);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        run_epoch(net, batch, Update::Sse, config, shuffle_rng);
        history.epoch_mse.push_back(training_mse(net, data.points));
    }
    history.last_batch = std::move(batch);
    return history;
}

}  // namespace neglr
