// Micro-grid equivalence: exhaustive joint-action enumeration against the
// straight-line reference implementation.

#include <algorithm>

#include "doctest.h"
#include "gridsoccer/env.hpp"
#include "gridsoccer/rng.hpp"
#include "reference_env.hpp"

using namespace gridsoccer;

namespace {

GameState random_micro_state(int n, Rng& rng, int step_cap) {
  const int h = 3, w = 4;
  std::vector<int> cells(h * w);
  for (int i = 0; i < h * w; ++i) cells[i] = i;
  // Partial Fisher-Yates for 2n distinct cells.
  std::vector<GridPos> pos;
  for (int i = 0; i < 2 * n; ++i) {
    const int j = i + static_cast<int>(rng.uniform_int(cells.size() - i));
    std::swap(cells[i], cells[j]);
    pos.push_back(GridPos{cells[i] / w, cells[i] % w});
  }
  const int holder = static_cast<int>(rng.uniform_int(2 * n));
  GameState st = make_state(h, w, n, pos, holder, 0, h - 1, step_cap);
  st.score = {static_cast<int>(rng.uniform_int(3)),
              static_cast<int>(rng.uniform_int(3))};
  st.timestep = static_cast<int>(rng.uniform_int(100));
  st.steps_since_reset = static_cast<int>(rng.uniform_int(step_cap));
  return st;
}

std::vector<std::vector<RewardEvent>> sorted_events(
    std::vector<std::vector<RewardEvent>> events) {
  for (auto& e : events) std::sort(e.begin(), e.end());
  return events;
}

int check_all_joint_actions(const GameState& st) {
  const int n = st.players_per_team;
  const int acts = action_count(n);
  const int agents = 2 * n;
  int total = 1;
  for (int i = 0; i < agents; ++i) total *= acts;
  int mismatches = 0;
  for (int joint = 0; joint < total; ++joint) {
    std::vector<Action> actions(agents);
    int rest = joint;
    for (int i = 0; i < agents; ++i) {
      actions[i] = Action{rest % acts};
      rest /= acts;
    }
    const StepOutcome got = step(st, actions);
    const refenv::RefOutcome want = refenv::ref_step(st, actions);
    const bool ok = got.next_state == want.next &&
                    sorted_events(got.events) == sorted_events(want.events) &&
                    got.rewards == want.rewards && got.goal_scored == want.goal &&
                    got.turnover == want.turnover;
    if (!ok) ++mismatches;
  }
  return mismatches;
}

}  // namespace

TEST_CASE("step matches the brute-force reference on 3x4 micro grids") {
  Rng rng(20240817);
  int mismatches = 0;
  // 1v1: 50 states x 81 joint actions.
  for (int s = 0; s < 50; ++s) {
    const int cap = s % 5 == 0 ? 1 + static_cast<int>(rng.uniform_int(3)) : 500;
    mismatches += check_all_joint_actions(random_micro_state(1, rng, cap));
  }
  // 2v2: 50 states x 10^4 joint actions.
  for (int s = 0; s < 50; ++s) {
    const int cap = s % 5 == 0 ? 1 + static_cast<int>(rng.uniform_int(3)) : 500;
    mismatches += check_all_joint_actions(random_micro_state(2, rng, cap));
  }
  CHECK(mismatches == 0);
}
