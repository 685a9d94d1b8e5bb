#pragma once

#include "gridsoccer/nn.hpp"

namespace gridsoccer {

// Network presets. The full-size stacks follow the published critic/policy
// layout (conv 32@3x3/s1, conv 64@4x4/s2, dense 128, dense 64) and the
// in-repo normative DQN stack (conv 32@3x3/s1, conv 64@3x3/s1, conv
// 64@4x4/s2, dense 256); the small stacks are for grids the full kernels do
// not fit on and for fast desk-scale runs.

bool full_dqn_fits(int height, int width);
bool full_coma_fits(int height, int width);

NetworkSpec dqn_net_spec(int in_channels, int height, int width, int head_size,
                         bool small);
NetworkSpec policy_net_spec(int players_per_team, int height, int width,
                            bool small);
NetworkSpec critic_net_spec(int players_per_team, int height, int width,
                            bool small);

/// Side-input size of the critic: one-hot u^{-a} blocks plus one-hot agent.
int critic_side_dim(int players_per_team);

}  // namespace gridsoccer
