#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "neglr/rng.hpp"

namespace neglr {

/// Board coordinate; row 0 is the top of the board.
struct Tile {
    int col = 0;
    int row = 0;

    friend auto operator<=>(const Tile&, const Tile&) = default;
};

enum class Action : int { Up = 0, Down = 1, Left = 2, Right = 3 };
inline constexpr std::size_t kActionCount = 4;

std::string_view to_string(Action action);

/// "Mouse and cliff" board: reach the goal tile, avoid the hazard tiles.
class GridWorld {
public:
    /// Throws InvalidArgument when the layout invariants do not hold.
    GridWorld(int width, int height, Tile start, Tile goal, std::set<Tile> hazards,
              int step_limit = 100);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Tile start() const noexcept { return start_; }
    Tile goal() const noexcept { return goal_; }
    const std::set<Tile>& hazards() const noexcept { return hazards_; }
    int step_limit() const noexcept { return step_limit_; }

    std::size_t tile_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    bool in_bounds(Tile t) const noexcept {
        return t.col >= 0 && t.row >= 0 && t.col < width_ && t.row < height_;
    }
    bool is_hazard(Tile t) const { return hazards_.contains(t); }

    std::size_t index_of(Tile t) const noexcept {
        return static_cast<std::size_t>(t.row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(t.col);
    }
    Tile tile_at(std::size_t index) const noexcept {
        return {static_cast<int>(index % static_cast<std::size_t>(width_)),
                static_cast<int>(index / static_cast<std::size_t>(width_))};
    }

    /// One-hot vector over tiles.
    std::vector<double> encode(Tile t) const;

    friend bool operator==(const GridWorld&, const GridWorld&) = default;

private:
    int width_;
    int height_;
    Tile start_;
    Tile goal_;
    std::set<Tile> hazards_;
    int step_limit_;
};

struct StepOutcome {
    Tile next_state;
    double reward = 0.0;
    bool terminal = false;
};

/// Deterministic dynamics. Off-board moves stay in place. Goal gives +1,
/// hazard -1, anything else 0. `steps_taken` counts moves already made in
/// the episode; the move that uses up the step limit is terminal.
/// Throws InvalidState for an out-of-bounds state.
StepOutcome step(const GridWorld& world, Tile state, Action action, int steps_taken = 0);

enum class LayoutKind { Cliff4x12, Checkers8 };

GridWorld make_layout(LayoutKind kind);

/// ASCII map: S start, G goal, X hazard, '.' free; one line per row.
std::string render_layout(const GridWorld& world);
GridWorld parse_layout(std::string_view text, int step_limit = 100);

enum class Outcome { Goal, Hazard, Timeout };

std::string_view to_string(Outcome outcome);

struct Experience {
    int episode_id = 0;
    int t = 0;
    std::size_t state_index = 0;
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;  ///< raw reward received for this move
    double ret = 0.0;     ///< reward after propagation (equals reward until then)
};

struct EpisodeResult {
    std::vector<Experience> experiences;
    Outcome outcome = Outcome::Timeout;
    int steps = 0;
};

using Actor = std::function<Action(const GridWorld&, Tile, Rng&)>;

/// Plays from the start tile until a terminal move or the step limit.
EpisodeResult run_episode(const GridWorld& world, const Actor& actor, Rng& rng, bool record,
                          int episode_id = 0);

struct PolicyEvaluation {
    double success_rate = 0.0;
    double avg_steps = 0.0;
};

/// Throws InvalidArgument when n_episodes is zero.
PolicyEvaluation evaluate_policy(const GridWorld& world, const Actor& actor,
                                 std::size_t n_episodes, Rng& rng);

}  // namespace neglr
