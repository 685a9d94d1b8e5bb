#include "gridsoccer/handcoded.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace gridsoccer {

Role role_of(int agent_index) {
  switch (agent_index % 3) {
    case 0: return Role::Striker;
    case 1: return Role::Midfielder;
    default: return Role::Defender;
  }
}

namespace {

int chebyshev(GridPos a, GridPos b) {
  return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

GridPos nearest_goal_cell(const GameState& st, GridPos from, int goal_col) {
  return GridPos{std::clamp(from.row, st.goal_row_lo, st.goal_row_hi), goal_col};
}

bool marked(const GameState& st, Team team, GridPos p) {
  const int n = st.players_per_team;
  const int opp_base = team == Team::Left ? n : 0;
  for (int i = 0; i < n; ++i)
    if (chebyshev(st.positions[opp_base + i], p) <= 1) return true;
  return false;
}

bool lane_clear(const GameState& st, Team team, GridPos from, GridPos to) {
  for (const GridPos& cell : pass_line_cells(from, to)) {
    const int s = st.slot_at(cell);
    if (s >= 0 && st.team_of_slot(s) != team) return false;
  }
  return true;
}

// Deterministic greedy step: hold plus the eight moves, scored by `score`,
// lowest action code wins ties. `allow_enter` may name one slot whose cell
// is enterable (the bump-steal target).
template <typename ScoreFn>
Action greedy_step(const GameState& st, int slot, int allow_enter, ScoreFn score) {
  const GridPos here = st.positions[slot];
  int best_code = 0;
  int best_score = score(here);
  for (int code = 1; code <= 8; ++code) {
    const GridPos target = move_target(here, code);
    if (!st.in_bounds(target)) continue;
    const int occ = st.slot_at(target);
    if (occ >= 0 && occ != allow_enter) continue;
    const int s = score(target);
    if (s < best_score) {
      best_score = s;
      best_code = code;
    }
  }
  return Action{best_code};
}

}  // namespace

std::vector<Action> handcoded_actions(const GameState& state, Team team) {
  const int n = state.players_per_team;
  const int base = team_index(team) * n;
  const int attack_col = state.attack_goal_col(team);
  const int own_col = state.own_goal_col(team);
  std::vector<Action> actions(n);

  const bool we_hold = state.team_of_slot(state.ball_holder) == team;
  const GridPos ball = state.positions[state.ball_holder];

  for (int i = 0; i < n; ++i) {
    const int slot = base + i;
    const GridPos here = state.positions[slot];

    if (we_hold && slot == state.ball_holder) {
      if (marked(state, team, here)) {
        int receiver = -1;
        int receiver_dist = std::numeric_limits<int>::max();
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          const GridPos tp = state.positions[base + j];
          if (marked(state, team, tp)) continue;
          if (!lane_clear(state, team, here, tp)) continue;
          const int d = chebyshev(tp, nearest_goal_cell(state, tp, attack_col));
          if (d < receiver_dist) {
            receiver_dist = d;
            receiver = j;
          }
        }
        if (receiver >= 0) {
          actions[i] = Action{pass_code_for_target(i, receiver, n)};
          continue;
        }
      }
      actions[i] = greedy_step(state, slot, -1, [&](GridPos p) {
        return chebyshev(p, nearest_goal_cell(state, p, attack_col));
      });
      continue;
    }

    if (we_hold) {
      // Supporting run: advance, but stay out of teammates' pockets.
      actions[i] = greedy_step(state, slot, -1, [&](GridPos p) {
        int crowding = 0;
        for (int j = 0; j < n; ++j)
          if (base + j != slot && chebyshev(state.positions[base + j], p) <= 1)
            ++crowding;
        return chebyshev(p, nearest_goal_cell(state, p, attack_col)) + 2 * crowding;
      });
      continue;
    }

    // Defending.
    if (role_of(i) == Role::Striker) {
      actions[i] = greedy_step(state, slot, state.ball_holder,
                               [&](GridPos p) { return chebyshev(p, ball); });
      continue;
    }
    const GridPos goal = nearest_goal_cell(state, ball, own_col);
    const GridPos block =
        role_of(i) == Role::Midfielder
            ? GridPos{(ball.row + goal.row) / 2, (ball.col + goal.col) / 2}
            : GridPos{(ball.row + 3 * goal.row) / 4, (ball.col + 3 * goal.col) / 4};
    actions[i] = greedy_step(state, slot, -1,
                             [&](GridPos p) { return chebyshev(p, block); });
  }
  return actions;
}

}  // namespace gridsoccer
