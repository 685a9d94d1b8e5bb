#pragma once

#include <vector>

#include "gridsoccer/encoding.hpp"
#include "gridsoccer/nn.hpp"

namespace gridsoccer {

/// One timestep of an inter-goal episode as seen by one team.
struct EpisodeStep {
  Tensor critic_obs;              // CriticFull encoding of the state
  std::vector<Tensor> agent_obs;  // Basic4 per agent, by index
  std::vector<int> actions;       // per-agent action codes
  std::vector<double> rewards;    // per-agent rewards
};

struct EpisodeTrace {
  std::vector<EpisodeStep> steps;
  bool ended_by_goal = false;  // false when the step cap truncated play
};

/// One-hot u^{-a} blocks (others by ascending index) followed by the one-hot
/// agent id; the critic's side input.
Tensor critic_side_input(int players_per_team,
                         const std::vector<int>& joint_actions, int agent);

/// Q(s, (u^{-a}, .)) for all candidate actions of `agent` in one pass.
Tensor critic_q(const NetworkParams& critic, const Tensor& critic_obs,
                int agent, const std::vector<int>& joint_actions);

// Forward-view lambda-returns per (timestep, agent), bootstrapped on the Q
// of the action actually taken at each horizon; the tail is the Monte Carlo
// return (episodes end at a goal or at the step cap, and both truncate the
// same way). targets[t][agent].
std::vector<std::vector<double>> sarsa_lambda_targets(const EpisodeTrace& trace,
                                                      const NetworkParams& critic,
                                                      double lambda,
                                                      double gamma);

/// Squared-error regression of the taken-action Q toward the targets, one
/// Adam step over the whole episode. Returns the batch loss.
double critic_update(NetworkParams& critic, const EpisodeTrace& trace,
                     const std::vector<std::vector<double>>& targets,
                     AdamState& optimizer);

/// (1-eps) * pi + eps * uniform; a valid distribution with a floor of
/// eps / |A| on every action.
Tensor explore_policy(const Tensor& pi, double epsilon);

/// Q of the taken action minus the policy expectation over the agent's
/// alternatives with everyone else's action held fixed.
double counterfactual_advantage(const Tensor& q_values, int taken_action,
                                const Tensor& pi);

// One ascent step on sum_t sum_a log pi^a(u^a) * A^a via the optimizer.
// Log-probs come from the pre-exploration-mix policy, floored at 1e-8.
// Returns the surrogate objective (before negation for the minimizer).
double policy_gradient_update(NetworkParams& policy, const EpisodeTrace& trace,
                              const std::vector<std::vector<double>>& advantages,
                              AdamState& optimizer);

/// Softmax policy for one agent: Basic4 observation plus one-hot agent side.
Tensor policy_distribution(const NetworkParams& policy, const Tensor& agent_obs,
                           int agent, int players_per_team);

/// Draw from a probability vector with a single uniform draw (CDF walk).
int sample_from(const Tensor& distribution, Rng& rng);

}  // namespace gridsoccer
