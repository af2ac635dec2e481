#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "neglr/gridworld.hpp"
#include "neglr/mlp.hpp"
#include "neglr/plearn.hpp"

namespace neglr {

struct QConfig {
    double alpha = 0.1;  ///< TD step size (SGD learning rate)
    double discount = 0.9;
    double epsilon_greedy = 0.3;
    std::size_t games = 1000;
    std::size_t rounds = 1;  ///< games are split evenly; metrics after each round
    std::uint64_t seed = 0;
    std::size_t hidden = 128;
    std::size_t eval_episodes = 100;
    double grad_clip = 10.0;
};

void validate(const QConfig& config);

/// reward if terminal, otherwise reward + discount * max(next_q).
double td_target(double reward, std::span<const double> next_q, bool terminal, double discount);

struct QLearningResult {
    std::vector<RoundMetrics> metrics;
    std::vector<Experience> experiences;  ///< every transition taken while training
};

/// Online epsilon-greedy Q-learning. Each step regresses the taken action's
/// output toward td_target with squared error; the other outputs receive a
/// zero gradient.
QLearningResult train_q_learner(const GridWorld& world, Mlp& net, const QConfig& config);

/// Builds the network (one-hot tiles -> hidden tanh -> one output per action)
/// from the config seed and trains it.
std::pair<Mlp, QLearningResult> run_q_learning(const GridWorld& world, const QConfig& config);

}  // namespace neglr
