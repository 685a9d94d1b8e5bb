#include "gridsoccer/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "gridsoccer/errors.hpp"

namespace gridsoccer {

GridPos move_target(GridPos pos, int code) {
  static constexpr int dr[9] = {0, 1, 0, -1, 0, 1, 1, -1, -1};
  static constexpr int dc[9] = {0, 0, -1, 0, 1, 1, -1, -1, 1};
  if (code < 1 || code > 8) throw ContractError("move_target: code must be in [1,8]");
  return GridPos{pos.row + dr[code], pos.col + dc[code]};
}

int pass_target_index(int agent_index, int pass_code, int players_per_team) {
  const int k = pass_code - 8;
  if (k < 1 || k >= players_per_team)
    throw ContractError("pass_target_index: not a pass code for this team size");
  // Teammates ordered by ascending index, self skipped.
  int target = k - 1;
  if (target >= agent_index) ++target;
  return target;
}

int pass_code_for_target(int agent_index, int target_index, int players_per_team) {
  if (target_index == agent_index)
    throw ContractError("pass_code_for_target: cannot pass to self");
  int k = target_index < agent_index ? target_index : target_index - 1;
  (void)players_per_team;
  return 8 + k + 1;
}

double reward_value(RewardEvent kind) {
  switch (kind) {
    case RewardEvent::AgentOwnGoal: return -100.0;
    case RewardEvent::TeamOwnGoal: return -75.0;
    case RewardEvent::AgentScoredGoal: return 50.0;
    case RewardEvent::TeamScoredGoal: return 50.0;
    case RewardEvent::OpponentScoredGoal: return -50.0;
    case RewardEvent::OpponentOwnGoal: return 10.0;
    case RewardEvent::AgentTurnover: return -10.0;
    case RewardEvent::TeamTurnover: return -10.0;
    case RewardEvent::AgentSteal: return 10.0;
    case RewardEvent::TeamSteal: return 10.0;
    case RewardEvent::AgentIllegalMove: return -3.0;
    case RewardEvent::AgentSuccessfulPass: return -1.0;
    case RewardEvent::AgentHold: return -1.0;
    case RewardEvent::AgentLegalMove: return -2.0;
  }
  throw ContractError("reward_value: unknown event kind");
}

std::string reward_event_name(RewardEvent kind) {
  switch (kind) {
    case RewardEvent::AgentOwnGoal: return "agent_own_goal";
    case RewardEvent::TeamOwnGoal: return "team_own_goal";
    case RewardEvent::AgentScoredGoal: return "agent_scored_goal";
    case RewardEvent::TeamScoredGoal: return "team_scored_goal";
    case RewardEvent::OpponentScoredGoal: return "opponent_scored_goal";
    case RewardEvent::OpponentOwnGoal: return "opponent_own_goal";
    case RewardEvent::AgentTurnover: return "agent_turnover";
    case RewardEvent::TeamTurnover: return "team_turnover";
    case RewardEvent::AgentSteal: return "agent_steal";
    case RewardEvent::TeamSteal: return "team_steal";
    case RewardEvent::AgentIllegalMove: return "agent_illegal_move";
    case RewardEvent::AgentSuccessfulPass: return "agent_successful_pass";
    case RewardEvent::AgentHold: return "agent_hold";
    case RewardEvent::AgentLegalMove: return "agent_legal_move";
  }
  throw ContractError("reward_event_name: unknown event kind");
}

int EnvConfig::resolved_goal_lo() const {
  if (goal_row_lo >= 0) return goal_row_lo;
  return std::max(0, height / 2 - 2);
}

int EnvConfig::resolved_goal_hi() const {
  if (goal_row_hi >= 0) return goal_row_hi;
  return std::min(height - 1, height / 2 + 1);
}

void EnvConfig::validate() const {
  if (height < 4 || width < 6)
    throw ConfigError("env: grid must be at least 4x6");
  if (players_per_team < 2)
    throw ConfigError("env: need at least 2 players per team");
  if (players_per_team + 1 > height)
    throw ConfigError("env: too many players for the formation (need height >= n+1)");
  const int lo = resolved_goal_lo(), hi = resolved_goal_hi();
  if (lo < 0 || hi >= height || lo > hi)
    throw ConfigError("env: goal rows must be a non-empty range inside the grid");
  if (step_cap < 1) throw ConfigError("env: step_cap must be positive");
}

int GameState::slot_at(GridPos p) const {
  for (int s = 0; s < num_agents(); ++s)
    if (positions[s] == p) return s;
  return -1;
}

namespace {

// Line formations at column W/4 (mirrored), rows ((i+1)*H)/(n+1).
std::vector<GridPos> formation_positions(int height, int width, int n) {
  std::vector<GridPos> pos(2 * n);
  const int left_col = width / 4;
  const int right_col = width - 1 - left_col;
  for (int i = 0; i < n; ++i) {
    const int row = ((i + 1) * height) / (n + 1);
    pos[i] = GridPos{row, left_col};
    pos[n + i] = GridPos{row, right_col};
  }
  return pos;
}

int center_slot(Team team, int n) { return team_index(team) * n + n / 2; }

GameState soft_reset(const GameState& state) {
  GameState next = state;
  next.positions = formation_positions(state.height, state.width, state.players_per_team);
  // Stalling penalized: the team holding at the cap loses possession.
  const Team holder_team = state.team_of_slot(state.ball_holder);
  next.ball_holder = center_slot(other_team(holder_team), state.players_per_team);
  next.steps_since_reset = 0;
  return next;
}

}  // namespace

GameState new_game(const EnvConfig& config) {
  config.validate();
  GameState s;
  s.height = config.height;
  s.width = config.width;
  s.players_per_team = config.players_per_team;
  s.goal_row_lo = config.resolved_goal_lo();
  s.goal_row_hi = config.resolved_goal_hi();
  s.step_cap = config.step_cap;
  s.positions = formation_positions(s.height, s.width, s.players_per_team);
  s.ball_holder = center_slot(Team::Left, s.players_per_team);
  s.score = {0, 0};
  s.timestep = 0;
  s.steps_since_reset = 0;
  uint64_t x = config.seed;
  s.rng_state = splitmix64(x);
  return s;
}

GameState make_state(int height, int width, int players_per_team,
                     std::vector<GridPos> positions, int ball_holder,
                     int goal_row_lo, int goal_row_hi, int step_cap) {
  GameState s;
  s.height = height;
  s.width = width;
  s.players_per_team = players_per_team;
  s.goal_row_lo = goal_row_lo;
  s.goal_row_hi = goal_row_hi;
  s.step_cap = step_cap;
  s.positions = std::move(positions);
  s.ball_holder = ball_holder;
  if (static_cast<int>(s.positions.size()) != s.num_agents())
    throw ContractError("make_state: need one position per agent");
  if (ball_holder < 0 || ball_holder >= s.num_agents())
    throw ContractError("make_state: ball holder out of range");
  for (int i = 0; i < s.num_agents(); ++i) {
    if (!s.in_bounds(s.positions[i]))
      throw ContractError("make_state: position out of bounds");
    for (int j = i + 1; j < s.num_agents(); ++j)
      if (s.positions[i] == s.positions[j])
        throw ContractError("make_state: two players on one cell");
  }
  return s;
}

// The tie rule (advance col when 2*err >= dy, row when 2*err <= dx) is part
// of the pass-interception contract.
std::vector<GridPos> pass_line_cells(GridPos a, GridPos b) {
  std::vector<GridPos> cells;
  int x = a.col, y = a.row;
  const int x1 = b.col, y1 = b.row;
  const int dx = std::abs(x1 - x), sx = x < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y), sy = y < y1 ? 1 : -1;
  int err = dx + dy;
  while (!(x == x1 && y == y1)) {
    const int e2 = 2 * err;
    if (e2 >= dy) { err += dy; x += sx; }
    if (e2 <= dx) { err += dx; y += sy; }
    if (x == x1 && y == y1) break;
    cells.push_back(GridPos{y, x});
  }
  return cells;
}

namespace {

// On goal steps the goal outcome stands in for what each agent's own action
// would have earned; possession events (steals, turnovers) still mix in.
bool is_action_event(RewardEvent e) {
  return e == RewardEvent::AgentHold || e == RewardEvent::AgentLegalMove ||
         e == RewardEvent::AgentIllegalMove ||
         e == RewardEvent::AgentSuccessfulPass;
}

}  // namespace

StepOutcome step(const GameState& state, const std::vector<Action>& actions) {
  const int n = state.players_per_team;
  const int num = state.num_agents();
  if (static_cast<int>(actions.size()) != num)
    throw ContractError("step: one action per agent required");
  for (const Action& a : actions)
    if (a.code < 0 || a.code >= action_count(n))
      throw ContractError("step: action code out of range");

  std::vector<GridPos> pos = state.positions;
  int holder = state.ball_holder;
  std::vector<std::vector<RewardEvent>> events(num);
  std::vector<bool> acted(num, false);
  std::vector<bool> cancelled(num, false);
  bool turnover = false;

  auto team_of = [&](int slot) { return state.team_of_slot(slot); };
  auto slot_at = [&](GridPos p) {
    for (int s = 0; s < num; ++s)
      if (pos[s] == p) return s;
    return -1;
  };
  auto add_steal = [&](int stealer, int victim) {
    for (int s = 0; s < num; ++s) {
      if (team_of(s) == team_of(stealer))
        events[s].push_back(s == stealer ? RewardEvent::AgentSteal
                                         : RewardEvent::TeamSteal);
      else
        events[s].push_back(s == victim ? RewardEvent::AgentTurnover
                                        : RewardEvent::TeamTurnover);
    }
    holder = stealer;
    turnover = true;
  };

  // Phase 1: the holder's pass. Passes by non-holders are illegal moves and
  // fall through to phase 2.
  if (actions[holder].is_pass(n)) {
    const int passer = holder;
    const AgentId pid = state.agent_of(passer);
    const int target_index =
        pass_target_index(pid.index, actions[passer].code, n);
    const int target = state.slot_of(AgentId{pid.team, target_index});
    int interceptor = -1;
    for (const GridPos& cell : pass_line_cells(pos[passer], pos[target])) {
      const int s = slot_at(cell);
      if (s >= 0 && team_of(s) != pid.team) {
        interceptor = s;
        break;
      }
    }
    if (interceptor >= 0) {
      add_steal(interceptor, passer);
    } else {
      holder = target;
      events[passer].push_back(RewardEvent::AgentSuccessfulPass);
    }
    acted[passer] = true;
  }

  // Phase 2: moves in slot order against live occupancy and possession.
  for (int s = 0; s < num; ++s) {
    if (acted[s] || cancelled[s]) continue;
    const Action a = actions[s];
    acted[s] = true;
    if (a.is_hold()) {
      events[s].push_back(RewardEvent::AgentHold);
      continue;
    }
    if (a.is_pass(n)) {
      events[s].push_back(RewardEvent::AgentIllegalMove);
      continue;
    }
    const GridPos target = move_target(pos[s], a.code);
    if (!state.in_bounds(target)) {
      events[s].push_back(RewardEvent::AgentIllegalMove);
      continue;
    }
    const int occupant = slot_at(target);
    if (occupant < 0) {
      pos[s] = target;
      events[s].push_back(RewardEvent::AgentLegalMove);
      continue;
    }
    if (occupant == holder && team_of(occupant) != team_of(s) &&
        !actions[occupant].is_hold()) {
      // Bump steal: the stealer keeps its cell, the victim's pending action
      // is cancelled. The steal events stand in for the stealer's move event.
      add_steal(s, occupant);
      if (!acted[occupant]) cancelled[occupant] = true;
      continue;
    }
    events[s].push_back(RewardEvent::AgentIllegalMove);
  }

  // Phase 3: goal detection on the holder's final cell.
  std::optional<Team> goal_scored;
  if (state.is_goal_cell(pos[holder])) {
    const Team holder_team = team_of(holder);
    const bool own_goal = pos[holder].col == state.own_goal_col(holder_team);
    goal_scored = own_goal ? other_team(holder_team) : holder_team;
    for (int s = 0; s < num; ++s) std::erase_if(events[s], is_action_event);
    for (int s = 0; s < num; ++s) {
      if (s == holder)
        events[s].push_back(own_goal ? RewardEvent::AgentOwnGoal
                                     : RewardEvent::AgentScoredGoal);
      else if (team_of(s) == holder_team)
        events[s].push_back(own_goal ? RewardEvent::TeamOwnGoal
                                     : RewardEvent::TeamScoredGoal);
      else
        events[s].push_back(own_goal ? RewardEvent::OpponentOwnGoal
                                     : RewardEvent::OpponentScoredGoal);
    }
  }

  StepOutcome out;
  out.events = std::move(events);
  out.rewards.resize(num, 0.0);
  for (int s = 0; s < num; ++s)
    for (RewardEvent e : out.events[s]) out.rewards[s] += reward_value(e);
  out.goal_scored = goal_scored;
  out.turnover = turnover;

  GameState next = state;
  next.positions = std::move(pos);
  next.ball_holder = holder;
  next.timestep = state.timestep + 1;
  if (goal_scored) {
    next.score[team_index(*goal_scored)] += 1;
    next = apply_goal_reset(next, other_team(*goal_scored));
  } else {
    next.steps_since_reset = state.steps_since_reset + 1;
    if (next.steps_since_reset >= next.step_cap) next = soft_reset(next);
  }
  out.next_state = std::move(next);
  return out;
}

GameState apply_goal_reset(const GameState& state, Team conceding_team) {
  GameState next = state;
  next.positions =
      formation_positions(state.height, state.width, state.players_per_team);
  next.ball_holder = center_slot(conceding_team, state.players_per_team);
  next.steps_since_reset = 0;
  return next;
}

GameState mirror_state(const GameState& state) {
  const int n = state.players_per_team;
  GameState m = state;
  for (int s = 0; s < state.num_agents(); ++s) {
    const int src = s < n ? s + n : s - n;  // swap teams, keep index
    m.positions[s] = GridPos{state.positions[src].row,
                             state.width - 1 - state.positions[src].col};
  }
  m.ball_holder = state.ball_holder < n ? state.ball_holder + n
                                        : state.ball_holder - n;
  m.score = {state.score[1], state.score[0]};
  return m;
}

int mirror_action_code(int code) {
  switch (code) {
    case 2: return 4;
    case 4: return 2;
    case 5: return 6;
    case 6: return 5;
    case 7: return 8;
    case 8: return 7;
    default: return code;  // hold, vertical moves, passes
  }
}

std::string render_ascii(const GameState& state) {
  const int h = state.height, w = state.width;
  std::string border = "+" + std::string(w, '-') + "+\n";
  std::string out = border;
  for (int r = 0; r < h; ++r) {
    out += '|';
    for (int c = 0; c < w; ++c) {
      const GridPos p{r, c};
      const int s = state.slot_at(p);
      char glyph;
      if (s >= 0) {
        const bool left = state.team_of_slot(s) == Team::Left;
        if (s == state.ball_holder)
          glyph = left ? 'O' : 'o';
        else
          glyph = static_cast<char>((left ? 'A' : 'a') + s % state.players_per_team);
      } else if (state.is_goal_cell(p)) {
        glyph = '#';
      } else {
        glyph = '.';
      }
      out += glyph;
    }
    out += "|\n";
  }
  out += border;
  return out;
}

}  // namespace gridsoccer
