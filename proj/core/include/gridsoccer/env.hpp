#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridsoccer/rng.hpp"

namespace gridsoccer {

struct GridPos {
  int row = 0;
  int col = 0;
  bool operator==(const GridPos&) const = default;
};

enum class Team : int { Left = 0, Right = 1 };

inline Team other_team(Team t) { return t == Team::Left ? Team::Right : Team::Left; }
inline int team_index(Team t) { return static_cast<int>(t); }

/// Identifies one player: team plus index in [0, n).
struct AgentId {
  Team team = Team::Left;
  int index = 0;
  bool operator==(const AgentId&) const = default;
};

// Discrete per-agent action. Codes:
//   0      hold
//   1..8   move: (r+1,c) (r,c-1) (r-1,c) (r,c+1) (r+1,c+1) (r+1,c-1) (r-1,c-1) (r-1,c+1)
//   8+k    pass to teammate k, k = 1..n-1, teammates ordered by ascending
//          index with self skipped
struct Action {
  int code = 0;

  bool is_hold() const { return code == 0; }
  bool is_move() const { return code >= 1 && code <= 8; }
  bool is_pass(int players_per_team) const {
    return code > 8 && code < 8 + players_per_team;
  }
  bool operator==(const Action&) const = default;
};

inline int action_count(int players_per_team) { return players_per_team + 8; }

/// Raw Table-1 displacement; may leave the grid, callers check legality.
GridPos move_target(GridPos pos, int code);

/// Index of the teammate a pass action addresses (teammates of `agent_index`
/// ordered by ascending index, self skipped).
int pass_target_index(int agent_index, int pass_code, int players_per_team);
/// Inverse of pass_target_index: the pass code that reaches `target_index`.
int pass_code_for_target(int agent_index, int target_index, int players_per_team);

// The 14 possible per-agent outcomes of one timestep.
enum class RewardEvent : int {
  AgentOwnGoal = 0,
  TeamOwnGoal,
  AgentScoredGoal,
  TeamScoredGoal,
  OpponentScoredGoal,
  OpponentOwnGoal,
  AgentTurnover,
  TeamTurnover,
  AgentSteal,
  TeamSteal,
  AgentIllegalMove,
  AgentSuccessfulPass,
  AgentHold,
  AgentLegalMove,
};

inline constexpr int kRewardEventCount = 14;

double reward_value(RewardEvent kind);
std::string reward_event_name(RewardEvent kind);

struct EnvConfig {
  int height = 10;
  int width = 18;
  int players_per_team = 3;
  uint64_t seed = 0;
  // Goal line: boundary-column cells with row in [goal_row_lo, goal_row_hi].
  // Negative means "use the default middle band of up to four rows".
  int goal_row_lo = -1;
  int goal_row_hi = -1;
  // Steps without a goal before formations soft-reset (no score change).
  int step_cap = 500;

  int resolved_goal_lo() const;
  int resolved_goal_hi() const;
  void validate() const;
};

/// Authoritative simulator state. Grid geometry is embedded so that `step`
/// is self-contained; positions are indexed by slot (Left 0..n-1, then
/// Right 0..n-1).
struct GameState {
  int height = 0;
  int width = 0;
  int players_per_team = 0;
  int goal_row_lo = 0;
  int goal_row_hi = 0;
  int step_cap = 500;

  std::vector<GridPos> positions;  // size 2n, slot order
  int ball_holder = 0;             // slot
  std::array<int, 2> score = {0, 0};
  int64_t timestep = 0;
  int steps_since_reset = 0;
  uint64_t rng_state = 0;

  int num_agents() const { return 2 * players_per_team; }
  int slot_of(AgentId a) const {
    return team_index(a.team) * players_per_team + a.index;
  }
  AgentId agent_of(int slot) const {
    return AgentId{slot < players_per_team ? Team::Left : Team::Right,
                   slot % players_per_team};
  }
  Team team_of_slot(int slot) const {
    return slot < players_per_team ? Team::Left : Team::Right;
  }
  bool in_bounds(GridPos p) const {
    return p.row >= 0 && p.row < height && p.col >= 0 && p.col < width;
  }
  /// Column of the goal team `t` defends.
  int own_goal_col(Team t) const { return t == Team::Left ? 0 : width - 1; }
  /// Column of the goal team `t` attacks.
  int attack_goal_col(Team t) const { return own_goal_col(other_team(t)); }
  bool is_goal_cell(GridPos p) const {
    return (p.col == 0 || p.col == width - 1) && p.row >= goal_row_lo &&
           p.row <= goal_row_hi;
  }
  int slot_at(GridPos p) const;  // -1 if empty

  bool operator==(const GameState&) const = default;
};

struct StepOutcome {
  GameState next_state;
  std::vector<std::vector<RewardEvent>> events;  // by slot
  std::vector<double> rewards;                   // by slot, sum of event values
  std::optional<Team> goal_scored;               // team awarded the point
  bool turnover = false;                         // any steal or interception
};

/// Fresh game: mirrored line formations, ball with the Left center player.
GameState new_game(const EnvConfig& config);

/// Validates positions/holder invariants; used by tests that build states
/// directly on grids new_game would reject.
GameState make_state(int height, int width, int players_per_team,
                     std::vector<GridPos> positions, int ball_holder,
                     int goal_row_lo, int goal_row_hi, int step_cap = 500);

// One simultaneous timestep. Resolution is phased and deterministic:
//   1. the ball holder's pass (with Bresenham interception),
//   2. moves in slot order; a move into the opposing ball holder's cell is a
//      steal attempt (succeeds unless the holder's action is hold; the
//      stealer keeps its cell), any other occupied or out-of-bounds target is
//      an illegal move,
//   3. goal detection on the holder's cell, then formation reset.
// A holder that loses the ball before its slot resolves has its action
// cancelled. Occupancy and possession are evaluated at each slot's turn, so
// earlier movers free their cells and a holder can walk into a bump.
StepOutcome step(const GameState& state, const std::vector<Action>& actions);

/// Formation re-established as in new_game; ball to the conceding team's
/// center player. Score and timestep pass through untouched.
GameState apply_goal_reset(const GameState& state, Team conceding_team);

/// Intermediate cells of the integer Bresenham line from `from` to `to`,
/// endpoints excluded, ordered from `from`; the normative interception line
/// for passes.
std::vector<GridPos> pass_line_cells(GridPos from, GridPos to);

/// Horizontal flip (col -> W-1-col) with the teams swapped; maps a state to
/// the mirror-symmetric one. Used to run Left-trained policies as Right.
GameState mirror_state(const GameState& state);
/// Action-code image of the horizontal flip (left/right move codes swap).
int mirror_action_code(int code);

std::string render_ascii(const GameState& state);

}  // namespace gridsoccer
