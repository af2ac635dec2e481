#include "neglr/plearn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "neglr/errors.hpp"
#include "neglr/rated_loss.hpp"

namespace neglr {

namespace {

constexpr std::uint64_t kInitStream = 11;
constexpr std::uint64_t kExploreStream = 12;
constexpr std::uint64_t kTrainStream = 13;
constexpr std::uint64_t kEvalStream = 14;

}  // namespace

void validate(const RlConfig& config) {
    if (!(config.discount >= 0.0 && config.discount <= 1.0))
        throw InvalidArgument("discount must lie in [0, 1]");
    if (!(config.filter_epsilon >= 0.0)) throw InvalidArgument("filter_epsilon must be >= 0");
    if (!(config.global_lr > 0.0)) throw InvalidArgument("global_lr must be positive");
    if (config.exploration_games == 0) throw EmptyInput("exploration_games must be positive");
    if (config.rounds == 0) throw InvalidArgument("rounds must be positive");
    if (config.hidden == 0) throw InvalidArgument("hidden must be positive");
    if (config.eval_episodes == 0) throw InvalidArgument("eval_episodes must be positive");
}

std::vector<Experience> propagate_rewards(std::span<const Experience> experiences, double discount,
                                          bool propagate_negative) {
    for (std::size_t i = 1; i < experiences.size(); ++i) {
        const auto& a = experiences[i - 1];
        const auto& b = experiences[i];
        if (b.episode_id < a.episode_id || (b.episode_id == a.episode_id && b.t <= a.t))
            throw OrderingError("experiences must be ordered by (episode_id, t); violated at index " +
                                std::to_string(i));
    }

    std::vector<Experience> out(experiences.begin(), experiences.end());
    // Walk backwards; `carry` is the discounted source mass after index i,
    // expressed at the time of index i + 1.
    double carry = 0.0;
    for (std::size_t i = out.size(); i-- > 0;) {
        const bool episode_ends = i + 1 == out.size() || out[i + 1].episode_id != out[i].episode_id;
        double later = 0.0;
        if (!episode_ends) {
            const int gap = out[i + 1].t - out[i].t;
            later = std::pow(discount, gap) * carry;
        }
        out[i].ret = out[i].reward + later;
        const double source = propagate_negative || out[i].reward > 0.0 ? out[i].reward : 0.0;
        carry = source + later;
    }
    return out;
}

std::vector<RatedExample> experiences_to_examples(std::span<const Experience> experiences,
                                                  std::size_t action_count) {
    if (experiences.empty()) throw EmptyInput("no experiences to convert");
    std::vector<double> returns;
    returns.reserve(experiences.size());
    for (const auto& e : experiences) returns.push_back(e.ret);
    const auto factors = center_and_scale(returns);

    std::vector<RatedExample> out;
    out.reserve(experiences.size());
    for (std::size_t i = 0; i < experiences.size(); ++i) {
        const auto& e = experiences[i];
        if (e.action < 0 || static_cast<std::size_t>(e.action) >= action_count)
            throw InvalidArgument("experience action out of range");
        std::vector<double> target(action_count, 0.0);
        target[static_cast<std::size_t>(e.action)] = 1.0;
        out.push_back({e.state, std::move(target), factors[i]});
    }
    return out;
}

std::vector<RatedExample> filter_near_mean(std::span<const RatedExample> examples,
                                           std::span<const double> returns, double epsilon) {
    if (examples.size() != returns.size())
        throw ShapeError("one return per example is required");
    if (epsilon <= 0.0 || examples.empty()) return {examples.begin(), examples.end()};
    const double mean =
        std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(returns.size());
    std::vector<RatedExample> kept;
    for (std::size_t i = 0; i < examples.size(); ++i)
        if (std::abs(returns[i] - mean) >= epsilon) kept.push_back(examples[i]);
    return kept;
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

std::size_t select_action(const Mlp& policy, std::span<const double> state, SelectMode mode,
                          Rng& rng) {
    if (state.size() != policy.input_dim()) throw ShapeError("state encoding dimension mismatch");
    if (mode == SelectMode::Random) return rng.below(policy.output_dim());
    return argmax(policy.predict(state));
}

PolicyTrainHistory train_policy(Mlp& policy, std::span<const RatedExample> examples,
                                const RlConfig& config, Rng& rng) {
    for (const auto& ex : examples)
        if (ex.x.size() != policy.input_dim() || ex.z.size() != policy.output_dim())
            throw ShapeError("example does not match the policy network shape");
    const LossParams loss{config.sing_epsilon, config.grad_clip};

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < examples.size(); ++i)
        if (examples[i].factor != 0.0) order.push_back(i);

    PolicyTrainHistory history;
    for (std::size_t epoch = 0; epoch < config.train_epochs; ++epoch) {
        rng.shuffle(std::span(order));
        double total = 0.0;
        for (std::size_t idx : order) {
            const auto& ex = examples[idx];
            auto fwd = policy.forward(ex.x);
            total += rated_loss(fwd.output, ex.z, ex.factor, loss);
            const auto grad = rated_loss_grad(fwd.output, ex.z, ex.factor, loss);
            policy.train_step(fwd.trace, grad, config.global_lr, config.grad_clip);
        }
        if (!policy.all_finite()) throw ExplosionError("policy parameters became non-finite");
        history.epoch_loss.push_back(total);
    }
    return history;
}

Actor greedy_actor(const Mlp& policy) {
    return [&policy](const GridWorld& world, Tile state, Rng&) {
        return static_cast<Action>(argmax(policy.predict(world.encode(state))));
    };
}

Actor random_actor() {
    return [](const GridWorld&, Tile, Rng& rng) { return static_cast<Action>(rng.below(kActionCount)); };
}

PLearningResult run_p_learning(const GridWorld& world, const RlConfig& config) {
    validate(config);
    const Rng root(config.seed);
    Rng explore_rng = root.split(kExploreStream);
    Rng train_rng = root.split(kTrainStream);
    Rng eval_rng = root.split(kEvalStream);

    const std::size_t layers[] = {world.tile_count(), config.hidden, kActionCount};
    const std::uint64_t init_seed = root.split(kInitStream).next_u64();
    PLearningResult result{Mlp::init(layers, init_seed), {}, {}, {}, 0};

    std::vector<Experience> raw;
    const Actor explorer = random_actor();
    int episode_id = 0;
    for (std::size_t round = 0; round < config.rounds; ++round) {
        for (std::size_t g = 0; g < config.exploration_games; ++g) {
            auto ep = run_episode(world, explorer, explore_rng, true, episode_id++);
            raw.insert(raw.end(), std::make_move_iterator(ep.experiences.begin()),
                       std::make_move_iterator(ep.experiences.end()));
        }

        auto with_returns = propagate_rewards(raw, config.discount, config.propagate_negative);
        auto examples = experiences_to_examples(with_returns, kActionCount);
        std::vector<double> returns;
        std::vector<double> factors;
        returns.reserve(with_returns.size());
        factors.reserve(examples.size());
        for (const auto& e : with_returns) returns.push_back(e.ret);
        for (const auto& ex : examples) factors.push_back(ex.factor);
        const auto kept = filter_near_mean(examples, returns, config.filter_epsilon);

        Mlp policy = Mlp::init(layers, init_seed);
        train_policy(policy, kept, config, train_rng);

        const auto eval = evaluate_policy(world, greedy_actor(policy), config.eval_episodes, eval_rng);
        result.metrics.push_back({round, (round + 1) * config.exploration_games,
                                  eval.success_rate, eval.avg_steps});
        result.policy = std::move(policy);
        result.experiences = std::move(with_returns);
        result.factors = std::move(factors);
        result.examples_kept = kept.size();
    }
    return result;
}

}  // namespace neglr
