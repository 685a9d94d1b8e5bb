#pragma once

#include <vector>

#include "gridsoccer/env.hpp"

namespace gridsoccer {

enum class Role { Striker, Midfielder, Defender };

/// Fixed role assignment: agent index i gets role i mod 3.
Role role_of(int agent_index);

// Scripted opponent. The rule list below is the normative in-repo strategy:
//
// When this team holds the ball:
//   * the holder, if an opponent is within Chebyshev distance 1, passes to
//     the unmarked teammate (no opponent within distance 1) with a clear
//     lane that is closest to the attacked goal; ties by lowest index;
//   * otherwise (or with no such receiver) the holder takes the legal move
//     that minimizes Chebyshev distance to the nearest attacked-goal cell;
//   * non-holders advance the same way but with a +2 crowding penalty per
//     adjacent teammate, which spreads them into open lanes.
// When the opponents hold the ball:
//   * Strikers chase the holder's cell to bump-steal;
//   * Midfielders and Defenders move to blocking cells on the line from the
//     ball to the nearest own-goal cell (midpoint and three-quarter point).
// All greedy choices consider hold plus the eight moves, skip occupied or
// out-of-bounds targets (except the steal bump), and break ties by lowest
// action code.
std::vector<Action> handcoded_actions(const GameState& state, Team team);

}  // namespace gridsoccer
