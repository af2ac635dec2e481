#include "neglr/qlearn.hpp"

#include <algorithm>

#include "neglr/errors.hpp"

namespace neglr {

namespace {

constexpr std::uint64_t kInitStream = 21;
constexpr std::uint64_t kActStream = 22;
constexpr std::uint64_t kEvalStream = 23;

}  // namespace

void validate(const QConfig& config) {
    if (!(config.alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    if (!(config.discount >= 0.0 && config.discount <= 1.0))
        throw InvalidArgument("discount must lie in [0, 1]");
    if (!(config.epsilon_greedy >= 0.0 && config.epsilon_greedy <= 1.0))
        throw InvalidArgument("epsilon_greedy must lie in [0, 1]");
    if (config.rounds == 0) throw InvalidArgument("rounds must be positive");
    if (config.eval_episodes == 0) throw InvalidArgument("eval_episodes must be positive");
}

double td_target(double reward, std::span<const double> next_q, bool terminal, double discount) {
    if (terminal || next_q.empty()) return reward;
    return reward + discount * *std::max_element(next_q.begin(), next_q.end());
}

QLearningResult train_q_learner(const GridWorld& world, Mlp& net, const QConfig& config) {
    validate(config);
    if (net.input_dim() != world.tile_count() || net.output_dim() != kActionCount)
        throw ShapeError("Q network must map tile encodings to one value per action");

    const Rng root(config.seed);
    Rng act_rng = root.split(kActStream);
    Rng eval_rng = root.split(kEvalStream);

    QLearningResult result;
    std::vector<double> out_grad(kActionCount, 0.0);
    int episode_id = 0;
    std::size_t played = 0;
    for (std::size_t round = 0; round < config.rounds; ++round) {
        // Spread the remainder over the first rounds.
        const std::size_t share = config.games / config.rounds + (round < config.games % config.rounds);
        for (std::size_t g = 0; g < share; ++g, ++episode_id) {
            Tile state = world.start();
            for (int t = 0; t < world.step_limit(); ++t) {
                auto fwd = net.forward(world.encode(state));
                // The coin is always drawn so that epsilon only changes which
                // branch is taken, never the stream alignment.
                const double coin = act_rng.uniform01();
                const std::size_t random_pick = act_rng.below(kActionCount);
                const std::size_t a = coin < config.epsilon_greedy ? random_pick : argmax(fwd.output);
                const StepOutcome out = step(world, state, static_cast<Action>(a), t);
                // Timeouts are a horizon cut, not an absorbing state.
                const bool absorbing = out.next_state == world.goal() || world.is_hazard(out.next_state);
                double target = out.reward;
                if (!absorbing) {
                    const auto next_q = net.predict(world.encode(out.next_state));
                    target = td_target(out.reward, next_q, false, config.discount);
                }
                std::fill(out_grad.begin(), out_grad.end(), 0.0);
                out_grad[a] = fwd.output[a] - target;
                net.train_step(fwd.trace, out_grad, config.alpha, config.grad_clip);

                Experience e;
                e.episode_id = episode_id;
                e.t = t;
                e.state_index = world.index_of(state);
                e.action = static_cast<int>(a);
                e.reward = out.reward;
                e.ret = out.reward;
                result.experiences.push_back(std::move(e));

                state = out.next_state;
                if (out.terminal) break;
            }
            if (!net.all_finite()) throw ExplosionError("Q network parameters became non-finite");
        }
        played += share;
        const auto eval = evaluate_policy(world, greedy_actor(net), config.eval_episodes, eval_rng);
        result.metrics.push_back({round, played, eval.success_rate, eval.avg_steps});
    }
    return result;
}

std::pair<Mlp, QLearningResult> run_q_learning(const GridWorld& world, const QConfig& config) {
    const std::size_t layers[] = {world.tile_count(), config.hidden, kActionCount};
    Mlp net = Mlp::init(layers, Rng(config.seed).split(kInitStream).next_u64());
    auto result = train_q_learner(world, net, config);
    return {std::move(net), std::move(result)};
}

}  // namespace neglr
