#include "gridsoccer/coma.hpp"

#include <algorithm>
#include <cmath>

#include "gridsoccer/errors.hpp"

namespace gridsoccer {

Tensor critic_side_input(int players_per_team,
                         const std::vector<int>& joint_actions, int agent) {
  const int n = players_per_team;
  const int acts = action_count(n);
  if (static_cast<int>(joint_actions.size()) != n)
    throw ContractError("critic_side_input: need the full joint action");
  if (agent < 0 || agent >= n)
    throw ContractError("critic_side_input: agent out of range");
  Tensor side({(n - 1) * acts + n});
  int block = 0;
  for (int j = 0; j < n; ++j) {
    if (j == agent) continue;
    const int a = joint_actions[j];
    if (a < 0 || a >= acts)
      throw ContractError("critic_side_input: action code out of range");
    side[block * acts + a] = 1.0;
    ++block;
  }
  side[(n - 1) * acts + agent] = 1.0;
  return side;
}

Tensor critic_q(const NetworkParams& critic, const Tensor& critic_obs,
                int agent, const std::vector<int>& joint_actions) {
  const int n = static_cast<int>(joint_actions.size());
  const Tensor side = critic_side_input(n, joint_actions, agent);
  return forward(critic, critic_obs, &side);
}

std::vector<std::vector<double>> sarsa_lambda_targets(const EpisodeTrace& trace,
                                                      const NetworkParams& critic,
                                                      double lambda,
                                                      double gamma) {
  if (trace.steps.empty())
    throw ContractError("sarsa_lambda_targets: empty trace");
  if (lambda < 0.0 || lambda > 1.0)
    throw ContractError("sarsa_lambda_targets: lambda must be in [0,1]");
  const int T = static_cast<int>(trace.steps.size());
  const int n = static_cast<int>(trace.steps[0].actions.size());

  // Q of the actually-taken action for every (t, agent); the bootstrap values.
  std::vector<std::vector<double>> q_taken(T, std::vector<double>(n));
  for (int t = 0; t < T; ++t) {
    const EpisodeStep& s = trace.steps[t];
    for (int a = 0; a < n; ++a) {
      const Tensor q = critic_q(critic, s.critic_obs, a, s.actions);
      q_taken[t][a] = q[s.actions[a]];
    }
  }

  std::vector<std::vector<double>> targets(T, std::vector<double>(n));
  for (int a = 0; a < n; ++a) {
    for (int t = 0; t < T; ++t) {
      const int m = T - 1 - t;  // number of bootstrapped k-step returns
      double disc_sum = 0.0;    // sum_{j<k} gamma^j r_{t+j}
      double gamma_k = 1.0;
      double lambda_k = 1.0;  // lambda^{k-1}
      double acc = 0.0;
      for (int k = 1; k <= m; ++k) {
        disc_sum += gamma_k * trace.steps[t + k - 1].rewards[a];
        gamma_k *= gamma;
        acc += lambda_k * (disc_sum + gamma_k * q_taken[t + k][a]);
        lambda_k *= lambda;
      }
      const double mc = disc_sum + gamma_k * trace.steps[T - 1].rewards[a];
      targets[t][a] = (1.0 - lambda) * acc + lambda_k * mc;
    }
  }
  return targets;
}

double critic_update(NetworkParams& critic, const EpisodeTrace& trace,
                     const std::vector<std::vector<double>>& targets,
                     AdamState& optimizer) {
  if (trace.steps.size() != targets.size())
    throw ContractError("critic_update: targets do not match trace");
  const int T = static_cast<int>(trace.steps.size());
  const int n = static_cast<int>(trace.steps[0].actions.size());
  const double inv_m = 1.0 / static_cast<double>(T * n);
  Gradients grads = zero_gradients(critic);
  double loss = 0.0;
  for (int t = 0; t < T; ++t) {
    const EpisodeStep& s = trace.steps[t];
    for (int a = 0; a < n; ++a) {
      const Tensor side = critic_side_input(n, s.actions, a);
      ForwardCache cache;
      const Tensor q = forward(critic, s.critic_obs, &side, &cache);
      const double delta = targets[t][a] - q[s.actions[a]];
      loss += delta * delta * inv_m;
      Tensor out_grad(q.shape());
      out_grad[s.actions[a]] = -2.0 * delta * inv_m;
      backward(critic, cache, out_grad, &grads);
    }
  }
  if (!std::isfinite(loss)) throw TrainingError("critic_update: non-finite loss");
  adam_step(critic, grads, optimizer);
  return loss;
}

Tensor explore_policy(const Tensor& pi, double epsilon) {
  Tensor out = pi;
  const double u = epsilon / static_cast<double>(pi.size());
  for (size_t k = 0; k < out.size(); ++k)
    out[k] = (1.0 - epsilon) * out[k] + u;
  return out;
}

double counterfactual_advantage(const Tensor& q_values, int taken_action,
                                const Tensor& pi) {
  if (q_values.size() != pi.size())
    throw ContractError("counterfactual_advantage: size mismatch");
  if (taken_action < 0 || static_cast<size_t>(taken_action) >= q_values.size())
    throw ContractError("counterfactual_advantage: action out of range");
  double baseline = 0.0;
  for (size_t k = 0; k < q_values.size(); ++k) baseline += pi[k] * q_values[k];
  return q_values[taken_action] - baseline;
}

double policy_gradient_update(NetworkParams& policy, const EpisodeTrace& trace,
                              const std::vector<std::vector<double>>& advantages,
                              AdamState& optimizer) {
  if (trace.steps.size() != advantages.size())
    throw ContractError("policy_gradient_update: advantages do not match trace");
  const int T = static_cast<int>(trace.steps.size());
  const int n = static_cast<int>(trace.steps[0].actions.size());
  Gradients grads = zero_gradients(policy);
  double objective = 0.0;
  for (int t = 0; t < T; ++t) {
    const EpisodeStep& s = trace.steps[t];
    for (int a = 0; a < n; ++a) {
      Tensor side({n});
      side[a] = 1.0;
      ForwardCache cache;
      const Tensor pi = forward(policy, s.agent_obs[a], &side, &cache);
      const int u = s.actions[a];
      const double p = std::max(pi[u], 1e-8);
      const double adv = advantages[t][a];
      objective += std::log(p) * adv;
      // d(-objective)/d pi[u]; the softmax backward turns this into
      // -adv * (onehot(u) - pi) on the logits.
      Tensor out_grad(pi.shape());
      out_grad[u] = -adv / p;
      backward(policy, cache, out_grad, &grads);
    }
  }
  if (!std::isfinite(objective))
    throw TrainingError("policy_gradient_update: non-finite objective");
  adam_step(policy, grads, optimizer);
  return objective;
}

Tensor policy_distribution(const NetworkParams& policy, const Tensor& agent_obs,
                           int agent, int players_per_team) {
  Tensor side({players_per_team});
  if (agent < 0 || agent >= players_per_team)
    throw ContractError("policy_distribution: agent out of range");
  side[agent] = 1.0;
  return forward(policy, agent_obs, &side);
}

int sample_from(const Tensor& distribution, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (size_t k = 0; k < distribution.size(); ++k) {
    acc += distribution[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(distribution.size() - 1);
}

}  // namespace gridsoccer
