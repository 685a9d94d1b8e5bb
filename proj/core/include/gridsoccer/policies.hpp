#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "gridsoccer/config.hpp"
#include "gridsoccer/env.hpp"
#include "gridsoccer/nn.hpp"

namespace gridsoccer {

// A frozen controller for one team. Stateful policies (comm histories,
// exploration streams) survive checkpointing through save/load.
class TeamPolicy {
public:
  virtual ~TeamPolicy() = default;
  virtual std::vector<Action> act(const GameState& state) = 0;
  virtual void on_episode_reset() {}
  virtual std::string kind() const = 0;
  virtual void save(std::ostream& os) const;
  virtual void load(std::istream& is);
};

std::unique_ptr<TeamPolicy> make_random_policy(Team side, Rng stream);
std::unique_ptr<TeamPolicy> make_handcoded_policy(Team side);

// Frozen epsilon-greedy DQN controller. `nets` holds one shared net or one
// per agent; comm_symbols > 0 switches to the comm encoder and joint head.
// Right-side controllers act on the mirrored state.
std::unique_ptr<TeamPolicy> make_dqn_policy(Team side, int players_per_team,
                                            std::vector<NetworkParams> nets,
                                            EncoderKind encoder, int comm_symbols,
                                            double epsilon, Rng stream);

/// Frozen stochastic policy controller sampling from the unmixed softmax.
std::unique_ptr<TeamPolicy> make_coma_policy(Team side, int players_per_team,
                                             NetworkParams policy_net, Rng stream);

/// Reconstructs a policy previously written with save() (kind() tag first).
std::unique_ptr<TeamPolicy> load_team_policy(std::istream& is, Team side);
void save_team_policy(std::ostream& os, const TeamPolicy& policy);

}  // namespace gridsoccer
