#pragma once

#include <vector>

#include "gridsoccer/env.hpp"
#include "gridsoccer/tensor.hpp"

namespace gridsoccer {

enum class ObsLayout { Basic4, Comm, CriticFull };

/// Per-agent boolean image observation, stored channel-major {C, H, W}.
struct Observation {
  ObsLayout layout = ObsLayout::Basic4;
  int comm_symbols = 0;  // |A_g| when layout == Comm
  Tensor data;
};

/// 4 channels: self, teammates, opponents, ball.
Observation encode_basic(const GameState& state, AgentId agent);

// 3+|A_g| channels: self, opponents, ball, then one teammate channel per
// communication symbol. `last_comms[j]` is the symbol teammate j (index
// within `agent`'s team) broadcast on the previous step; the observer's own
// entry is ignored.
Observation encode_comm(const GameState& state, AgentId agent,
                        const std::vector<int>& last_comms, int comm_symbols);

/// n+2 channels for the centralized critic: one per own-team player (by
/// index), one shared opponent channel, one ball channel.
Observation encode_critic(const GameState& state, Team team);

/// Environment action paired with a broadcast communication symbol.
struct JointCommAction {
  Action base;
  int comm = 0;
  bool operator==(const JointCommAction&) const = default;
};

int basic_head_size(int players_per_team);
int joint_head_size(int players_per_team, int comm_symbols);

/// Flat index of a plain action; the identity on valid codes.
int action_flat_index(Action a, int players_per_team);
Action action_from_flat(int flat, int players_per_team);

/// Flat index base.code * |A_g| + comm, bijective with [0, (n+8)*|A_g|).
int joint_flat_index(const JointCommAction& a, int comm_symbols);
JointCommAction joint_from_flat(int flat, int players_per_team, int comm_symbols);

}  // namespace gridsoccer
