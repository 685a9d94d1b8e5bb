#include <cmath>
#include <set>

#include "doctest.h"
#include "gridsoccer/env.hpp"
#include "gridsoccer/errors.hpp"
#include "gridsoccer/rng.hpp"

using namespace gridsoccer;

namespace {

std::vector<Action> all_hold(int agents) { return std::vector<Action>(agents); }

bool has_event(const StepOutcome& out, int slot, RewardEvent e) {
  const auto& ev = out.events[slot];
  return std::find(ev.begin(), ev.end(), e) != ev.end();
}

}  // namespace

TEST_CASE("move_target applies the eight displacements") {
  CHECK(move_target({4, 4}, 1) == GridPos{5, 4});
  CHECK(move_target({4, 4}, 2) == GridPos{4, 3});
  CHECK(move_target({4, 4}, 3) == GridPos{3, 4});
  CHECK(move_target({4, 4}, 4) == GridPos{4, 5});
  CHECK(move_target({4, 4}, 5) == GridPos{5, 5});
  CHECK(move_target({4, 4}, 6) == GridPos{5, 3});
  CHECK(move_target({4, 4}, 7) == GridPos{3, 3});
  CHECK(move_target({4, 4}, 8) == GridPos{3, 5});
  CHECK(move_target({0, 0}, 7) == GridPos{-1, -1});
  CHECK_THROWS_AS(move_target({0, 0}, 0), ContractError);
  CHECK_THROWS_AS(move_target({0, 0}, 9), ContractError);
}

TEST_CASE("reward table values are exact") {
  CHECK(reward_value(RewardEvent::AgentOwnGoal) == -100.0);
  CHECK(reward_value(RewardEvent::TeamOwnGoal) == -75.0);
  CHECK(reward_value(RewardEvent::AgentScoredGoal) == 50.0);
  CHECK(reward_value(RewardEvent::TeamScoredGoal) == 50.0);
  CHECK(reward_value(RewardEvent::OpponentScoredGoal) == -50.0);
  CHECK(reward_value(RewardEvent::OpponentOwnGoal) == 10.0);
  CHECK(reward_value(RewardEvent::AgentTurnover) == -10.0);
  CHECK(reward_value(RewardEvent::TeamTurnover) == -10.0);
  CHECK(reward_value(RewardEvent::AgentSteal) == 10.0);
  CHECK(reward_value(RewardEvent::TeamSteal) == 10.0);
  CHECK(reward_value(RewardEvent::AgentIllegalMove) == -3.0);
  CHECK(reward_value(RewardEvent::AgentSuccessfulPass) == -1.0);
  CHECK(reward_value(RewardEvent::AgentHold) == -1.0);
  CHECK(reward_value(RewardEvent::AgentLegalMove) == -2.0);
}

TEST_CASE("pass codes map to teammates by ascending index, self skipped") {
  // n=3, agent 0: code 9 -> teammate 1, code 10 -> teammate 2.
  CHECK(pass_target_index(0, 9, 3) == 1);
  CHECK(pass_target_index(0, 10, 3) == 2);
  // agent 1: code 9 -> teammate 0, code 10 -> teammate 2.
  CHECK(pass_target_index(1, 9, 3) == 0);
  CHECK(pass_target_index(1, 10, 3) == 2);
  for (int me = 0; me < 3; ++me)
    for (int code = 9; code <= 10; ++code)
      CHECK(pass_code_for_target(me, pass_target_index(me, code, 3), 3) == code);
}

TEST_CASE("new_game builds a valid mirrored formation") {
  const EnvConfig config{.height = 10, .width = 18, .players_per_team = 3, .seed = 7};
  const GameState s = new_game(config);
  CHECK(s.num_agents() == 6);
  std::set<std::pair<int, int>> cells;
  for (const GridPos& p : s.positions) {
    CHECK(s.in_bounds(p));
    cells.insert({p.row, p.col});
  }
  CHECK(cells.size() == 6);  // one player per cell
  CHECK(s.ball_holder == 1); // left center player
  CHECK(s.score == std::array<int, 2>{0, 0});
  CHECK(s.timestep == 0);
  CHECK(s.goal_row_lo == 3);
  CHECK(s.goal_row_hi == 6);
  // Mirror symmetry of the formation.
  for (int i = 0; i < 3; ++i) {
    CHECK(s.positions[i].row == s.positions[3 + i].row);
    CHECK(s.positions[i].col == 17 - s.positions[3 + i].col);
  }
  CHECK(new_game(config) == s);  // determinism
}

TEST_CASE("new_game rejects invalid configurations") {
  CHECK_THROWS_AS(new_game(EnvConfig{.height = 3, .width = 4, .players_per_team = 3}),
                  ConfigError);
  CHECK_THROWS_AS(new_game(EnvConfig{.height = 10, .width = 18, .players_per_team = 1}),
                  ConfigError);
  CHECK_THROWS_AS(new_game(EnvConfig{.height = 4, .width = 18, .players_per_team = 4}),
                  ConfigError);  // no room for 4 distinct rows
  EnvConfig bad_goal{.height = 10, .width = 18, .players_per_team = 3};
  bad_goal.goal_row_lo = 6;
  bad_goal.goal_row_hi = 3;
  CHECK_THROWS_AS(new_game(bad_goal), ConfigError);
}

TEST_CASE("all agents holding keeps positions and costs -1 each") {
  const GameState s = new_game(EnvConfig{});
  const StepOutcome out = step(s, all_hold(6));
  CHECK(out.next_state.positions == s.positions);
  CHECK(out.next_state.ball_holder == s.ball_holder);
  CHECK(out.next_state.timestep == s.timestep + 1);
  CHECK_FALSE(out.goal_scored.has_value());
  for (int i = 0; i < 6; ++i) {
    CHECK(out.events[i] == std::vector<RewardEvent>{RewardEvent::AgentHold});
    CHECK(out.rewards[i] == -1.0);
  }
}

TEST_CASE("step rejects bad action maps") {
  const GameState s = new_game(EnvConfig{});
  CHECK_THROWS_AS(step(s, all_hold(5)), ContractError);
  auto acts = all_hold(6);
  acts[2] = Action{11};  // n=3 has codes 0..10
  CHECK_THROWS_AS(step(s, acts), ContractError);
}

TEST_CASE("own goal pays exactly -100/-75/+10") {
  // Left holder next to its own goal walks onto the goal line.
  GameState s = make_state(10, 18, 3,
                           {{4, 1}, {1, 5}, {8, 5}, {2, 13}, {5, 13}, {8, 13}},
                           0, 3, 6);
  auto acts = all_hold(6);
  acts[0] = Action{2};  // (4,1) -> (4,0), inside goal rows 3..6
  const StepOutcome out = step(s, acts);
  REQUIRE(out.goal_scored.has_value());
  CHECK(*out.goal_scored == Team::Right);
  CHECK(out.rewards[0] == -100.0);
  CHECK(out.rewards[1] == -75.0);
  CHECK(out.rewards[2] == -75.0);
  CHECK(out.rewards[3] == 10.0);
  CHECK(out.rewards[4] == 10.0);
  CHECK(out.rewards[5] == 10.0);
  CHECK(out.next_state.score == std::array<int, 2>{0, 1});
  // Reset: conceding team (Left) center player holds the ball.
  CHECK(out.next_state.ball_holder == 1);
}

TEST_CASE("scoring in the attacked goal pays +50/-50") {
  GameState s = make_state(10, 18, 3,
                           {{4, 16}, {1, 5}, {8, 5}, {2, 13}, {5, 13}, {8, 13}},
                           0, 3, 6);
  auto acts = all_hold(6);
  acts[0] = Action{4};  // (4,16) -> (4,17): right goal line
  const StepOutcome out = step(s, acts);
  REQUIRE(out.goal_scored.has_value());
  CHECK(*out.goal_scored == Team::Left);
  CHECK(out.rewards[0] == 50.0);
  CHECK(out.rewards[1] == 50.0);
  CHECK(out.rewards[2] == 50.0);
  CHECK(out.rewards[3] == -50.0);
  CHECK(out.next_state.score == std::array<int, 2>{1, 0});
  CHECK(out.next_state.ball_holder == 4);  // right center player restarts
  CHECK(out.next_state.timestep == s.timestep + 1);
}

TEST_CASE("bump steal leaves the stealer in place and cancels the victim") {
  // Left holder (slot 0) walking into an opposing non-holder is illegal.
  GameState s = make_state(6, 9, 2, {{2, 4}, {0, 0}, {2, 5}, {5, 8}}, 0, 0, 5);
  std::vector<Action> acts = {Action{4}, Action{0}, Action{0}, Action{0}};
  const StepOutcome out = step(s, acts);
  CHECK(has_event(out, 0, RewardEvent::AgentIllegalMove));
  CHECK(out.next_state.ball_holder == 0);
  CHECK_FALSE(out.turnover);

  // The holder stays put (illegal move) and the later-resolving defender
  // bumps it: the steal succeeds because the holder's action was not hold.
  acts = {Action{4}, Action{0}, Action{2}, Action{0}};
  const StepOutcome out2 = step(s, acts);
  CHECK(out2.next_state.ball_holder == 2);
  CHECK(out2.turnover);
  CHECK(out2.rewards[0] == -13.0);  // illegal move plus turnover
  CHECK(out2.rewards[2] == 10.0);   // the steal stands in for the move event
  CHECK(out2.next_state.positions[2] == GridPos{2, 5});  // stealer stays put

  // An earlier-resolving stealer cancels the victim's pending move.
  GameState s2 = make_state(6, 9, 2, {{2, 3}, {0, 0}, {2, 4}, {5, 8}}, 2, 0, 5);
  acts = {Action{4}, Action{0}, Action{1}, Action{0}};
  const StepOutcome out3 = step(s2, acts);
  CHECK(out3.next_state.ball_holder == 0);
  CHECK(out3.turnover);
  CHECK(out3.next_state.positions[0] == GridPos{2, 3});  // stealer stays
  CHECK(out3.next_state.positions[2] == GridPos{2, 4});  // victim cancelled
  CHECK(out3.rewards[0] == 10.0);
  CHECK(out3.rewards[2] == -10.0);  // no move event for the cancelled victim
  CHECK(has_event(out3, 1, RewardEvent::TeamSteal));
  CHECK(has_event(out3, 3, RewardEvent::TeamTurnover));
  CHECK(out3.rewards[3] == -11.0);  // team turnover plus its own hold

  // A holding ball carrier cannot be bumped.
  acts = {Action{4}, Action{0}, Action{0}, Action{0}};
  const StepOutcome out4 = step(s2, acts);
  CHECK(out4.next_state.ball_holder == 2);
  CHECK(has_event(out4, 0, RewardEvent::AgentIllegalMove));
  CHECK_FALSE(out4.turnover);

  // An escaping holder vacates the cell before a later-resolving chaser.
  GameState s3 = make_state(6, 9, 2, {{2, 4}, {0, 0}, {2, 3}, {5, 8}}, 0, 0, 5);
  acts = {Action{4}, Action{0}, Action{4}, Action{0}};
  const StepOutcome out5 = step(s3, acts);
  CHECK(out5.next_state.ball_holder == 0);
  CHECK(out5.next_state.positions[0] == GridPos{2, 5});
  CHECK(out5.next_state.positions[2] == GridPos{2, 4});
  CHECK_FALSE(out5.turnover);
}

TEST_CASE("passes transfer the ball and can be intercepted") {
  // Clear lane: pass succeeds, only the passer pays -1.
  GameState s = make_state(6, 9, 2, {{2, 2}, {2, 6}, {5, 0}, {5, 8}}, 0, 0, 5);
  std::vector<Action> acts = {Action{9}, Action{0}, Action{0}, Action{0}};
  const StepOutcome out = step(s, acts);
  CHECK(out.next_state.ball_holder == 1);
  CHECK(out.rewards[0] == -1.0);
  CHECK(has_event(out, 0, RewardEvent::AgentSuccessfulPass));
  CHECK_FALSE(out.turnover);
  CHECK(out.rewards[1] == -1.0);  // its own hold

  // Opponent on the straight lane intercepts; nearest blocker takes the ball.
  GameState s2 = make_state(6, 9, 2, {{2, 2}, {2, 6}, {2, 4}, {5, 8}}, 0, 0, 5);
  const StepOutcome out2 = step(s2, acts);
  CHECK(out2.next_state.ball_holder == 2);
  CHECK(out2.turnover);
  CHECK(out2.rewards[0] == -10.0);
  CHECK(has_event(out2, 2, RewardEvent::AgentSteal));
  CHECK(has_event(out2, 3, RewardEvent::TeamSteal));
  CHECK(has_event(out2, 1, RewardEvent::TeamTurnover));

  // A teammate on the lane does not intercept (n=3, pass over a teammate).
  GameState s3 = make_state(6, 9, 3,
                            {{2, 2}, {2, 4}, {2, 6}, {5, 0}, {5, 8}, {0, 8}},
                            0, 2, 3);
  std::vector<Action> acts3(6);
  acts3[0] = Action{10};  // agent 0 passes to teammate index 2
  const StepOutcome out3 = step(s3, acts3);
  CHECK(out3.next_state.ball_holder == 2);
  CHECK(has_event(out3, 0, RewardEvent::AgentSuccessfulPass));

  // Pass by a non-holder is an illegal move.
  acts = {Action{0}, Action{9}, Action{0}, Action{0}};
  const StepOutcome out4 = step(s2, acts);
  CHECK(has_event(out4, 1, RewardEvent::AgentIllegalMove));
  CHECK(out4.next_state.ball_holder == 0);
}

TEST_CASE("out-of-bounds intents are illegal and keep the agent in place") {
  GameState s = make_state(6, 9, 2, {{0, 0}, {2, 6}, {5, 0}, {5, 8}}, 1, 2, 3);
  std::vector<Action> acts = {Action{3}, Action{0}, Action{0}, Action{0}};
  const StepOutcome out = step(s, acts);
  CHECK(out.next_state.positions[0] == GridPos{0, 0});
  CHECK(out.rewards[0] == -3.0);
  CHECK(has_event(out, 0, RewardEvent::AgentIllegalMove));
}

TEST_CASE("apply_goal_reset restores the formation and hands the ball over") {
  const EnvConfig config{.height = 10, .width = 18, .players_per_team = 3};
  GameState s = new_game(config);
  s.score = {2, 1};
  s.timestep = 321;
  // Right scored; Left (conceding) restarts with its center player.
  s.score[1] += 1;
  const GameState reset = apply_goal_reset(s, Team::Left);
  CHECK(reset.positions == new_game(config).positions);
  CHECK(reset.ball_holder == 1);
  CHECK(reset.score == std::array<int, 2>{2, 2});
  CHECK(reset.timestep == 321);
  CHECK(apply_goal_reset(s, Team::Left) == reset);  // determinism
  const GameState reset_r = apply_goal_reset(s, Team::Right);
  CHECK(reset_r.ball_holder == 4);
}

TEST_CASE("step cap soft-resets formations without scoring") {
  EnvConfig config{.height = 10, .width = 18, .players_per_team = 3};
  config.step_cap = 3;
  GameState s = new_game(config);
  StepOutcome out = step(s, all_hold(6));
  out = step(out.next_state, all_hold(6));
  CHECK(out.next_state.steps_since_reset == 2);
  out = step(out.next_state, all_hold(6));
  CHECK(out.next_state.steps_since_reset == 0);  // cap hit, reset
  CHECK(out.next_state.positions == new_game(config).positions);
  CHECK(out.next_state.score == std::array<int, 2>{0, 0});
  // The holding team (Left) loses possession at the cap.
  CHECK(out.next_state.ball_holder == 4);
}

TEST_CASE("render_ascii shape, purity and determinism") {
  const GameState s = new_game(EnvConfig{});
  const std::string text = render_ascii(s);
  int lines = 0;
  size_t start = 0;
  while (true) {
    const size_t nl = text.find('\n', start);
    if (nl == std::string::npos) break;
    const size_t len = nl - start;
    CHECK(len == 20);  // 18 cells plus two border chars
    ++lines;
    start = nl + 1;
  }
  CHECK(lines == 12);  // 10 rows plus two border lines
  CHECK(render_ascii(s) == text);
  const StepOutcome out = step(s, all_hold(6));
  CHECK(render_ascii(out.next_state) == text);  // hold changes nothing visible
  CHECK(render_ascii(new_game(EnvConfig{.seed = 7})) ==
        render_ascii(new_game(EnvConfig{.seed = 7})));
}

TEST_CASE("mirror_state is an involution that swaps teams") {
  GameState s = make_state(6, 9, 2, {{2, 2}, {0, 6}, {3, 4}, {5, 8}}, 2, 1, 4);
  s.score = {3, 1};
  const GameState m = mirror_state(s);
  CHECK(m.positions[0] == GridPos{3, 4});
  CHECK(m.positions[2] == GridPos{2, 6});
  CHECK(m.score == std::array<int, 2>{1, 3});
  CHECK(m.ball_holder == 0);
  CHECK(mirror_state(m) == s);
  for (int code = 0; code <= 9; ++code)
    CHECK(mirror_action_code(mirror_action_code(code)) == code);
}

TEST_CASE("random rollouts keep exactly one ball holder in bounds") {
  Rng rng(99);
  const EnvConfig config{.height = 10, .width = 18, .players_per_team = 3};
  for (int run = 0; run < 40; ++run) {
    GameState s = new_game(config);
    for (int t = 0; t < 250; ++t) {
      std::vector<Action> acts(6);
      for (auto& a : acts) a = Action{static_cast<int>(rng.uniform_int(11))};
      const StepOutcome out = step(s, acts);
      CHECK(out.next_state.ball_holder >= 0);
      CHECK(out.next_state.ball_holder < 6);
      for (const GridPos& p : out.next_state.positions)
        REQUIRE(out.next_state.in_bounds(p));
      // Reward decomposition invariant.
      for (int i = 0; i < 6; ++i) {
        double sum = 0.0;
        for (RewardEvent e : out.events[i]) sum += reward_value(e);
        REQUIRE(out.rewards[i] == sum);
      }
      if (out.goal_scored) {
        const int diff_before = s.score[0] - s.score[1];
        const int diff_after =
            out.next_state.score[0] - out.next_state.score[1];
        REQUIRE(std::abs(diff_after - diff_before) == 1);
      }
      s = out.next_state;
    }
  }
}

TEST_CASE("identical seeds and action sequences give identical trajectories") {
  const EnvConfig config{.height = 10, .width = 18, .players_per_team = 3, .seed = 5};
  auto rollout = [&] {
    Rng rng(1234);
    GameState s = new_game(config);
    std::vector<GameState> states;
    for (int t = 0; t < 200; ++t) {
      std::vector<Action> acts(6);
      for (auto& a : acts) a = Action{static_cast<int>(rng.uniform_int(11))};
      s = step(s, acts).next_state;
      states.push_back(s);
    }
    return states;
  };
  CHECK(rollout() == rollout());
}
