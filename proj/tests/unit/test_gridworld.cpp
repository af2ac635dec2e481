#include "doctest.h"

#include <memory>

#include "neglr/errors.hpp"
#include "neglr/gridworld.hpp"

using namespace neglr;

namespace {

Actor scripted(std::vector<Action> moves) {
    auto i = std::make_shared<std::size_t>(0);
    return [moves = std::move(moves), i](const GridWorld&, Tile, Rng&) { return moves[(*i)++ % moves.size()]; };
}

Actor always(Action a) {
    return [a](const GridWorld&, Tile, Rng&) { return a; };
}

std::vector<Action> cliff_shortest_path() {
    std::vector<Action> path{Action::Up};
    for (int i = 0; i < 11; ++i) path.push_back(Action::Right);
    path.push_back(Action::Down);
    return path;
}

}  // namespace

TEST_CASE("step rewards and walls") {
    const auto world = make_layout(LayoutKind::Cliff4x12);
    const auto goal = step(world, {11, 2}, Action::Down);
    CHECK(goal.next_state == Tile{11, 3});
    CHECK(goal.reward == 1.0);
    CHECK(goal.terminal);

    const auto wall = step(world, {0, 1}, Action::Left);
    CHECK(wall.next_state == Tile{0, 1});
    CHECK(wall.reward == 0.0);
    CHECK_FALSE(wall.terminal);
    CHECK(step(world, {4, 0}, Action::Up).next_state == Tile{4, 0});
    CHECK(step(world, {11, 0}, Action::Right).next_state == Tile{11, 0});

    const auto fall = step(world, {0, 3}, Action::Right);
    CHECK(fall.next_state == Tile{1, 3});
    CHECK(fall.reward == -1.0);
    CHECK(fall.terminal);

    const auto last = step(world, {5, 1}, Action::Up, world.step_limit() - 1);
    CHECK(last.terminal);
    CHECK(last.reward == 0.0);

    CHECK_THROWS_AS(step(world, {12, 0}, Action::Up), InvalidState);
    CHECK_THROWS_AS(step(world, {0, -1}, Action::Up), InvalidState);
}

TEST_CASE("every move stays on the board") {
    for (auto kind : {LayoutKind::Cliff4x12, LayoutKind::Checkers8}) {
        const auto world = make_layout(kind);
        for (std::size_t i = 0; i < world.tile_count(); ++i)
            for (int a = 0; a < 4; ++a) CHECK(world.in_bounds(step(world, world.tile_at(i), static_cast<Action>(a)).next_state));
    }
}

TEST_CASE("built-in layouts") {
    const auto cliff = make_layout(LayoutKind::Cliff4x12);
    CHECK(cliff.width() == 12);
    CHECK(cliff.height() == 4);
    CHECK(cliff.hazards().size() == 10);
    CHECK(cliff.start() == Tile{0, 3});
    CHECK(cliff.goal() == Tile{11, 3});
    CHECK(cliff.step_limit() == 100);

    const auto checkers = make_layout(LayoutKind::Checkers8);
    CHECK(checkers.tile_count() == 64);
    CHECK(checkers.hazards().size() == 8);
    CHECK(checkers.start() == Tile{0, 0});
    CHECK(checkers.goal() == Tile{7, 7});
    CHECK(checkers.step_limit() == 100);
    for (const auto& w : {cliff, checkers}) CHECK_NOTHROW(GridWorld(w.width(), w.height(), w.start(), w.goal(), w.hazards()));
}

TEST_CASE("invalid boards") {
    CHECK_THROWS_AS(GridWorld(0, 3, {0, 0}, {0, 1}, {}), InvalidArgument);
    CHECK_THROWS_AS(GridWorld(3, 3, {0, 0}, {0, 0}, {}), InvalidArgument);
    CHECK_THROWS_AS(GridWorld(3, 3, {0, 0}, {3, 0}, {}), InvalidArgument);
    CHECK_THROWS_AS(GridWorld(3, 3, {0, 0}, {2, 2}, {{0, 0}}), InvalidArgument);
    CHECK_THROWS_AS(GridWorld(3, 3, {0, 0}, {2, 2}, {{2, 2}}), InvalidArgument);
    CHECK_THROWS_AS(GridWorld(3, 3, {0, 0}, {2, 2}, {{5, 1}}), InvalidArgument);
    CHECK_THROWS_AS(GridWorld(3, 3, {0, 0}, {2, 2}, {}, 0), InvalidArgument);
}

TEST_CASE("one-hot encoding and indexing") {
    const auto world = make_layout(LayoutKind::Cliff4x12);
    const auto code = world.encode({3, 2});
    CHECK(code.size() == 48);
    CHECK(code[world.index_of({3, 2})] == 1.0);
    double sum = 0.0;
    for (double c : code) sum += c;
    CHECK(sum == 1.0);
    for (std::size_t i = 0; i < world.tile_count(); ++i) CHECK(world.index_of(world.tile_at(i)) == i);
    CHECK_THROWS_AS(world.encode({-1, 0}), InvalidState);
}

TEST_CASE("episodes") {
    const auto world = make_layout(LayoutKind::Cliff4x12);
    Rng rng(1);

    const auto stuck = run_episode(world, always(Action::Left), rng, true);
    CHECK(stuck.outcome == Outcome::Timeout);
    CHECK(stuck.steps == 100);
    CHECK(stuck.experiences.size() == 100);

    const auto best = run_episode(world, scripted(cliff_shortest_path()), rng, true, 7);
    CHECK(best.outcome == Outcome::Goal);
    CHECK(best.steps == 13);
    REQUIRE(best.experiences.size() == 13);
    CHECK(best.experiences.back().reward == 1.0);
    for (std::size_t i = 0; i < best.experiences.size(); ++i) {
        CHECK(best.experiences[i].t == static_cast<int>(i));
        CHECK(best.experiences[i].episode_id == 7);
    }
    CHECK(best.experiences[0].state_index == world.index_of(world.start()));
    CHECK(best.experiences[0].state == world.encode(world.start()));

    const auto fall = run_episode(world, always(Action::Right), rng, true);
    CHECK(fall.outcome == Outcome::Hazard);
    CHECK(fall.steps == 1);

    CHECK(run_episode(world, always(Action::Left), rng, false).experiences.empty());
}

TEST_CASE("policy evaluation") {
    const auto world = make_layout(LayoutKind::Cliff4x12);
    Rng rng(2);
    const auto good = evaluate_policy(world, scripted(cliff_shortest_path()), 10, rng);
    CHECK(good.success_rate == 1.0);
    CHECK(good.avg_steps == 13.0);
    const auto up = evaluate_policy(world, always(Action::Up), 5, rng);
    CHECK(up.success_rate == 0.0);
    CHECK(up.avg_steps == 100.0);
    CHECK_THROWS_AS(evaluate_policy(world, always(Action::Up), 0, rng), InvalidArgument);
}

TEST_CASE("ascii layouts") {
    const auto cliff = make_layout(LayoutKind::Cliff4x12);
    const std::string map = render_layout(cliff);
    CHECK(map ==
          "............\n"
          "............\n"
          "............\n"
          "SXXXXXXXXXXG\n");
    CHECK(parse_layout(map) == cliff);
    const auto checkers = make_layout(LayoutKind::Checkers8);
    CHECK(parse_layout(render_layout(checkers)) == checkers);
    CHECK(parse_layout("S.\r\n.G\r\n").goal() == Tile{1, 1});

    CHECK_THROWS_AS(parse_layout(""), ParseError);
    CHECK_THROWS_AS(parse_layout("S..\n.G\n"), ParseError);
    CHECK_THROWS_AS(parse_layout("S.Q\n..G\n"), ParseError);
    CHECK_THROWS_AS(parse_layout("S..\n...\n"), ParseError);
    CHECK_THROWS_AS(parse_layout("SS.\n..G\n"), ParseError);
}
