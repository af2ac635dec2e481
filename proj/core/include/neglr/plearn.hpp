#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "neglr/gridworld.hpp"
#include "neglr/lr_channel.hpp"
#include "neglr/mlp.hpp"
#include "neglr/rng.hpp"

namespace neglr {

struct RlConfig {
    double discount = 0.9;               ///< gamma in [0, 1]
    std::size_t exploration_games = 1000;  ///< random games collected per round
    std::size_t rounds = 1;               ///< collect -> train repetitions
    std::size_t train_epochs = 20;
    double global_lr = 0.01;  ///< mu
    double filter_epsilon = 0.0;
    std::uint64_t seed = 0;
    bool propagate_negative = true;
    std::size_t hidden = 128;
    std::size_t eval_episodes = 100;
    double sing_epsilon = 1e-3;
    double grad_clip = 10.0;
};

void validate(const RlConfig& config);

/// Replaces each reward with its discounted sum over the rest of its
/// episode: R_t = sum_{k >= t} gamma^(k - t) r_k, with k and t timesteps.
/// With `propagate_negative` off only positive rewards flow backwards; each
/// experience keeps its own reward either way. Input must be strictly
/// ordered by (episode_id, t), otherwise OrderingError.
std::vector<Experience> propagate_rewards(std::span<const Experience> experiences, double discount,
                                          bool propagate_negative);

/// x = state encoding, z = one-hot action, factor = (R - mean) / max|R - mean|.
/// Throws EmptyInput on an empty list.
std::vector<RatedExample> experiences_to_examples(std::span<const Experience> experiences,
                                                  std::size_t action_count);

/// Keeps examples whose return is at least `epsilon` away from the mean
/// return. `returns[i]` belongs to `examples[i]`.
std::vector<RatedExample> filter_near_mean(std::span<const RatedExample> examples,
                                           std::span<const double> returns, double epsilon);

enum class SelectMode { Random, Greedy };

/// Greedy breaks ties toward the lowest action index.
std::size_t select_action(const Mlp& policy, std::span<const double> state, SelectMode mode,
                          Rng& rng);

std::size_t argmax(std::span<const double> values);

struct PolicyTrainHistory {
    std::vector<double> epoch_loss;  ///< summed rated loss before each update
};

/// Per-epoch shuffled SGD with output gradient rated_loss_grad(pred, z, factor)
/// and step global_lr.
PolicyTrainHistory train_policy(Mlp& policy, std::span<const RatedExample> examples,
                                const RlConfig& config, Rng& rng);

struct RoundMetrics {
    std::size_t round = 0;
    std::size_t games = 0;  ///< cumulative games played when evaluated
    double success_rate = 0.0;
    double avg_steps = 0.0;
};

struct PLearningResult {
    Mlp policy;
    std::vector<RoundMetrics> metrics;
    std::vector<Experience> experiences;  ///< with returns, as trained on last
    std::vector<double> factors;          ///< factor for each experience
    std::size_t examples_kept = 0;        ///< after the near-mean filter
};

Actor greedy_actor(const Mlp& policy);
Actor random_actor();

/// Random exploration -> reward propagation -> signed factors -> near-mean
/// filter -> policy training -> greedy evaluation, once per round. Every
/// round adds `exploration_games` random games and trains a freshly
/// initialized policy on all experience gathered so far.
PLearningResult run_p_learning(const GridWorld& world, const RlConfig& config);

}  // namespace neglr
