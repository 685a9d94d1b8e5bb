// Independent straight-line reference implementation of the step resolution
// rules, used only to oracle-check gridsoccer::step. Keep this file dumb and
// literal: one pass over the documented rule list, no shared helpers with
// the library.
#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <vector>

#include "gridsoccer/env.hpp"

namespace refenv {

using gridsoccer::Action;
using gridsoccer::GameState;
using gridsoccer::GridPos;
using gridsoccer::RewardEvent;
using gridsoccer::Team;

struct RefOutcome {
  GameState next;
  std::vector<std::vector<RewardEvent>> events;
  std::vector<double> rewards;
  std::optional<Team> goal;
  bool turnover = false;
};

inline double ref_reward(RewardEvent e) {
  // Independent copy of the reward table.
  switch (e) {
    case RewardEvent::AgentOwnGoal: return -100;
    case RewardEvent::TeamOwnGoal: return -75;
    case RewardEvent::AgentScoredGoal: return 50;
    case RewardEvent::TeamScoredGoal: return 50;
    case RewardEvent::OpponentScoredGoal: return -50;
    case RewardEvent::OpponentOwnGoal: return 10;
    case RewardEvent::AgentTurnover: return -10;
    case RewardEvent::TeamTurnover: return -10;
    case RewardEvent::AgentSteal: return 10;
    case RewardEvent::TeamSteal: return 10;
    case RewardEvent::AgentIllegalMove: return -3;
    case RewardEvent::AgentSuccessfulPass: return -1;
    case RewardEvent::AgentHold: return -1;
    case RewardEvent::AgentLegalMove: return -2;
  }
  std::abort();
}

// Bresenham cells strictly between a and b (col = x, row = y); same tie rule
// as the documented pass contract: advance col when 2*err >= dy, row when
// 2*err <= dx.
inline std::vector<GridPos> ref_line_between(GridPos a, GridPos b) {
  std::vector<GridPos> cells;
  int cx = a.col, cy = a.row;
  const int dx = std::abs(b.col - a.col);
  const int dy = -std::abs(b.row - a.row);
  const int sx = a.col < b.col ? 1 : -1;
  const int sy = a.row < b.row ? 1 : -1;
  int err = dx + dy;
  while (cx != b.col || cy != b.row) {
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      cx += sx;
    }
    if (e2 <= dx) {
      err += dx;
      cy += sy;
    }
    if (cx == b.col && cy == b.row) break;
    cells.push_back(GridPos{cy, cx});
  }
  return cells;
}

inline std::vector<GridPos> ref_formation(int h, int w, int n) {
  std::vector<GridPos> pos(2 * n);
  for (int i = 0; i < n; ++i) {
    const int row = ((i + 1) * h) / (n + 1);
    pos[i] = GridPos{row, w / 4};
    pos[n + i] = GridPos{row, w - 1 - w / 4};
  }
  return pos;
}

inline RefOutcome ref_step(const GameState& st, const std::vector<Action>& acts) {
  const int n = st.players_per_team;
  const int N = 2 * n;
  std::vector<GridPos> pos = st.positions;
  int holder = st.ball_holder;
  RefOutcome out;
  out.events.resize(N);
  std::vector<bool> consumed(N, false);
  std::vector<bool> cancelled(N, false);

  auto team_of = [&](int s) { return s < n ? Team::Left : Team::Right; };
  auto occupant_of = [&](GridPos p) {
    for (int s = 0; s < N; ++s)
      if (pos[s].row == p.row && pos[s].col == p.col) return s;
    return -1;
  };
  auto steal_rewards = [&](int thief, int victim) {
    for (int s = 0; s < N; ++s) {
      if (team_of(s) == team_of(thief)) {
        out.events[s].push_back(s == thief ? RewardEvent::AgentSteal
                                           : RewardEvent::TeamSteal);
      } else {
        out.events[s].push_back(s == victim ? RewardEvent::AgentTurnover
                                            : RewardEvent::TeamTurnover);
      }
    }
    out.turnover = true;
  };

  // Phase 1: the holder's pass.
  const int code = acts[holder].code;
  if (code > 8) {
    const int k = code - 8;  // teammate k by ascending index, self skipped
    const int my_index = holder % n;
    int target_index = k - 1 >= my_index ? k : k - 1;
    const int target = (holder / n) * n + target_index;
    int thief = -1;
    for (const GridPos& cell : ref_line_between(pos[holder], pos[target])) {
      const int occ = occupant_of(cell);
      if (occ >= 0 && team_of(occ) != team_of(holder)) {
        thief = occ;
        break;
      }
    }
    consumed[holder] = true;
    if (thief >= 0) {
      steal_rewards(thief, holder);
      holder = thief;
    } else {
      out.events[holder].push_back(RewardEvent::AgentSuccessfulPass);
      holder = target;
    }
  }

  // Phase 2: moves in slot order.
  static const int kRow[9] = {0, 1, 0, -1, 0, 1, 1, -1, -1};
  static const int kCol[9] = {0, 0, -1, 0, 1, 1, -1, -1, 1};
  for (int s = 0; s < N; ++s) {
    if (consumed[s] || cancelled[s]) continue;
    consumed[s] = true;
    const int a = acts[s].code;
    if (a == 0) {
      out.events[s].push_back(RewardEvent::AgentHold);
      continue;
    }
    if (a > 8) {  // pass by a non-holder
      out.events[s].push_back(RewardEvent::AgentIllegalMove);
      continue;
    }
    const GridPos target{pos[s].row + kRow[a], pos[s].col + kCol[a]};
    if (target.row < 0 || target.row >= st.height || target.col < 0 ||
        target.col >= st.width) {
      out.events[s].push_back(RewardEvent::AgentIllegalMove);
      continue;
    }
    const int occ = occupant_of(target);
    if (occ < 0) {
      pos[s] = target;
      out.events[s].push_back(RewardEvent::AgentLegalMove);
      continue;
    }
    const bool stealable = occ == holder && team_of(occ) != team_of(s) &&
                           acts[occ].code != 0;
    if (stealable) {
      steal_rewards(s, occ);
      holder = s;
      if (!consumed[occ]) cancelled[occ] = true;
      continue;
    }
    out.events[s].push_back(RewardEvent::AgentIllegalMove);
  }

  // Phase 3: goal detection on the holder's cell.
  const GridPos hp = pos[holder];
  const bool on_line = (hp.col == 0 || hp.col == st.width - 1) &&
                       hp.row >= st.goal_row_lo && hp.row <= st.goal_row_hi;
  if (on_line) {
    const Team ht = team_of(holder);
    const int own_col = ht == Team::Left ? 0 : st.width - 1;
    const bool own_goal = hp.col == own_col;
    out.goal = own_goal ? (ht == Team::Left ? Team::Right : Team::Left) : ht;
    for (auto& ev : out.events) {
      ev.erase(std::remove_if(ev.begin(), ev.end(),
                              [](RewardEvent e) {
                                return e == RewardEvent::AgentHold ||
                                       e == RewardEvent::AgentLegalMove ||
                                       e == RewardEvent::AgentIllegalMove ||
                                       e == RewardEvent::AgentSuccessfulPass;
                              }),
               ev.end());
    }
    for (int s = 0; s < N; ++s) {
      if (s == holder)
        out.events[s].push_back(own_goal ? RewardEvent::AgentOwnGoal
                                         : RewardEvent::AgentScoredGoal);
      else if (team_of(s) == team_of(holder))
        out.events[s].push_back(own_goal ? RewardEvent::TeamOwnGoal
                                         : RewardEvent::TeamScoredGoal);
      else
        out.events[s].push_back(own_goal ? RewardEvent::OpponentOwnGoal
                                         : RewardEvent::OpponentScoredGoal);
    }
  }

  out.rewards.assign(N, 0.0);
  for (int s = 0; s < N; ++s)
    for (RewardEvent e : out.events[s]) out.rewards[s] += ref_reward(e);

  out.next = st;
  out.next.positions = pos;
  out.next.ball_holder = holder;
  out.next.timestep = st.timestep + 1;
  if (out.goal) {
    out.next.score[*out.goal == Team::Left ? 0 : 1] += 1;
    out.next.positions = ref_formation(st.height, st.width, n);
    const Team conceding = *out.goal == Team::Left ? Team::Right : Team::Left;
    out.next.ball_holder = (conceding == Team::Left ? 0 : n) + n / 2;
    out.next.steps_since_reset = 0;
  } else {
    out.next.steps_since_reset = st.steps_since_reset + 1;
    if (out.next.steps_since_reset >= st.step_cap) {
      out.next.positions = ref_formation(st.height, st.width, n);
      const Team loser = team_of(holder) == Team::Left ? Team::Right : Team::Left;
      out.next.ball_holder = (loser == Team::Left ? 0 : n) + n / 2;
      out.next.steps_since_reset = 0;
    }
  }
  return out;
}

}  // namespace refenv
