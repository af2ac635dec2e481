#include <benchmark/benchmark.h>

#include <vector>

#include "neglr/gridworld.hpp"
#include "neglr/mlp.hpp"
#include "neglr/plearn.hpp"
#include "neglr/rated_loss.hpp"
#include "neglr/regression_lab.hpp"
#include "neglr/rng.hpp"

namespace {

void BM_ForwardBackwardScalar(benchmark::State& state) {
    const auto hidden = static_cast<std::size_t>(state.range(0));
    auto net = neglr::Mlp::init({1, hidden, 1}, 1);
    const std::vector<double> x{0.3};
    for (auto _ : state) {
        auto fwd = net.forward(x);
        const std::vector<double> g{fwd.output[0] - 0.2};
        auto grads = net.backward(fwd.trace, g);
        benchmark::DoNotOptimize(grads);
    }
}
BENCHMARK(BM_ForwardBackwardScalar)->Arg(32)->Arg(128)->Arg(512);

void BM_TrainStepOneHot(benchmark::State& state) {
    auto world = neglr::make_layout(neglr::LayoutKind::Cliff4x12);
    auto net = neglr::Mlp::init({world.tile_count(), 128, neglr::kActionCount}, 2);
    const auto x = world.encode({3, 1});
    const std::vector<double> z{0.0, 0.0, 1.0, 0.0};
    for (auto _ : state) {
        auto fwd = net.forward(x);
        const auto g = neglr::rated_loss_grad(fwd.output, z, -0.5, {});
        net.train_step(fwd.trace, g, 1e-4, 10.0);
    }
}
BENCHMARK(BM_TrainStepOneHot);

void BM_SineEpoch(benchmark::State& state) {
    const auto data = neglr::gen_sine_dataset(40, 3);
    auto net = neglr::Mlp::init({1, 128, 1}, 3);
    neglr::TrainConfig config;
    config.epochs = 1;
    for (auto _ : state) {
        auto h = neglr::train_lr_channel(net, data, neglr::Scheme::SignedUnit, {true, true}, config);
        benchmark::DoNotOptimize(h);
    }
}
BENCHMARK(BM_SineEpoch)->Unit(benchmark::kMicrosecond);

void BM_RandomCliffEpisode(benchmark::State& state) {
    const auto world = neglr::make_layout(neglr::LayoutKind::Cliff4x12);
    const auto actor = neglr::random_actor();
    neglr::Rng rng(4);
    for (auto _ : state) {
        auto ep = neglr::run_episode(world, actor, rng, true);
        benchmark::DoNotOptimize(ep);
    }
}
BENCHMARK(BM_RandomCliffEpisode);

void BM_PropagateRewards(benchmark::State& state) {
    const auto world = neglr::make_layout(neglr::LayoutKind::Cliff4x12);
    const auto actor = neglr::random_actor();
    neglr::Rng rng(5);
    std::vector<neglr::Experience> log;
    for (int g = 0; g < 200; ++g) {
        auto ep = neglr::run_episode(world, actor, rng, true, g);
        log.insert(log.end(), ep.experiences.begin(), ep.experiences.end());
    }
    for (auto _ : state) benchmark::DoNotOptimize(neglr::propagate_rewards(log, 0.9, true));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(log.size()));
}
BENCHMARK(BM_PropagateRewards)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
