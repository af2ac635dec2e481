#include "neglr/gridworld.hpp"

#include <sstream>

#include "neglr/errors.hpp"

namespace neglr {

std::string_view to_string(Action action) {
    switch (action) {
        case Action::Up: return "up";
        case Action::Down: return "down";
        case Action::Left: return "left";
        case Action::Right: return "right";
    }
    return "?";
}

std::string_view to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Goal: return "goal";
        case Outcome::Hazard: return "hazard";
        case Outcome::Timeout: return "timeout";
    }
    return "?";
}

GridWorld::GridWorld(int width, int height, Tile start, Tile goal, std::set<Tile> hazards,
                     int step_limit)
    : width_(width),
      height_(height),
      start_(start),
      goal_(goal),
      hazards_(std::move(hazards)),
      step_limit_(step_limit) {
    if (width_ <= 0 || height_ <= 0) throw InvalidArgument("board dimensions must be positive");
    if (step_limit_ <= 0) throw InvalidArgument("step_limit must be positive");
    if (!in_bounds(start_) || !in_bounds(goal_)) throw InvalidArgument("start or goal off board");
    if (start_ == goal_) throw InvalidArgument("start and goal coincide");
    for (const Tile& h : hazards_)
        if (!in_bounds(h)) throw InvalidArgument("hazard off board");
    if (is_hazard(start_) || is_hazard(goal_))
        throw InvalidArgument("start or goal placed on a hazard");
}

std::vector<double> GridWorld::encode(Tile t) const {
    if (!in_bounds(t)) throw InvalidState("tile off board");
    std::vector<double> v(tile_count(), 0.0);
    v[index_of(t)] = 1.0;
    return v;
}

StepOutcome step(const GridWorld& world, Tile state, Action action, int steps_taken) {
    if (!world.in_bounds(state)) throw InvalidState("state off board");
    Tile next = state;
    switch (action) {
        case Action::Up: --next.row; break;
        case Action::Down: ++next.row; break;
        case Action::Left: --next.col; break;
        case Action::Right: ++next.col; break;
        default: throw InvalidArgument("unknown action");
    }
    if (!world.in_bounds(next)) next = state;

    StepOutcome out{next, 0.0, false};
    if (next == world.goal()) {
        out.reward = 1.0;
        out.terminal = true;
    } else if (world.is_hazard(next)) {
        out.reward = -1.0;
        out.terminal = true;
    }
    if (steps_taken + 1 >= world.step_limit()) out.terminal = true;
    return out;
}

GridWorld make_layout(LayoutKind kind) {
    switch (kind) {
        case LayoutKind::Cliff4x12: {
            std::set<Tile> cliff;
            for (int c = 1; c <= 10; ++c) cliff.insert({c, 3});
            return GridWorld(12, 4, {0, 3}, {11, 3}, std::move(cliff), 100);
        }
        case LayoutKind::Checkers8: {
            std::set<Tile> hazards{{2, 0}, {5, 1}, {1, 2}, {3, 3},
                                   {6, 3}, {0, 5}, {4, 5}, {6, 6}};
            return GridWorld(8, 8, {0, 0}, {7, 7}, std::move(hazards), 100);
        }
    }
    throw InvalidArgument("unknown layout");
}

std::string render_layout(const GridWorld& world) {
    std::string out;
    for (int r = 0; r < world.height(); ++r) {
        for (int c = 0; c < world.width(); ++c) {
            const Tile t{c, r};
            char ch = '.';
            if (t == world.start())
                ch = 'S';
            else if (t == world.goal())
                ch = 'G';
            else if (world.is_hazard(t))
                ch = 'X';
            out.push_back(ch);
        }
        out.push_back('\n');
    }
    return out;
}

GridWorld parse_layout(std::string_view text, int step_limit) {
    std::vector<std::string> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    if (rows.empty()) throw ParseError("layout is empty");
    const std::size_t width = rows.front().size();
    int starts = 0;
    int goals = 0;
    Tile start;
    Tile goal;
    std::set<Tile> hazards;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width) throw ParseError("layout rows have different widths");
        for (std::size_t c = 0; c < width; ++c) {
            const Tile t{static_cast<int>(c), static_cast<int>(r)};
            switch (rows[r][c]) {
                case 'S': start = t; ++starts; break;
                case 'G': goal = t; ++goals; break;
                case 'X': hazards.insert(t); break;
                case '.': break;
                default:
                    throw ParseError(std::string("unexpected layout character '") + rows[r][c] +
                                     "'");
            }
        }
    }
    if (starts != 1 || goals != 1) throw ParseError("layout needs exactly one S and one G");
    try {
        return GridWorld(static_cast<int>(width), static_cast<int>(rows.size()), start, goal,
                         std::move(hazards), step_limit);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

EpisodeResult run_episode(const GridWorld& world, const Actor& actor, Rng& rng, bool record,
                          int episode_id) {
    EpisodeResult result;
    Tile state = world.start();
    for (int t = 0; t < world.step_limit(); ++t) {
        const Action action = actor(world, state, rng);
        const StepOutcome out = step(world, state, action, t);
        if (record) {
            Experience e;
            e.episode_id = episode_id;
            e.t = t;
            e.state_index = world.index_of(state);
            e.state = world.encode(state);
            e.action = static_cast<int>(action);
            e.reward = out.reward;
            e.ret = out.reward;
            result.experiences.push_back(std::move(e));
        }
        result.steps = t + 1;
        state = out.next_state;
        if (state == world.goal()) {
            result.outcome = Outcome::Goal;
            return result;
        }
        if (world.is_hazard(state)) {
            result.outcome = Outcome::Hazard;
            return result;
        }
    }
    result.outcome = Outcome::Timeout;
    return result;
}

PolicyEvaluation evaluate_policy(const GridWorld& world, const Actor& actor,
                                 std::size_t n_episodes, Rng& rng) {
    if (n_episodes == 0) throw InvalidArgument("evaluate_policy needs at least one episode");
    std::size_t successes = 0;
    double steps = 0.0;
    for (std::size_t i = 0; i < n_episodes; ++i) {
        const auto ep = run_episode(world, actor, rng, false);
        if (ep.outcome == Outcome::Goal) ++successes;
        steps += ep.steps;
    }
    return {static_cast<double>(successes) / static_cast<double>(n_episodes),
            steps / static_cast<double>(n_episodes)};
}

}  // namespace neglr
