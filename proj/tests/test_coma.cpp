#include <cmath>

#include "doctest.h"
#include "gridsoccer/coma.hpp"
#include "gridsoccer/errors.hpp"
#include "gridsoccer/netspecs.hpp"

using namespace gridsoccer;

namespace {

// Critic that ignores its inputs and always outputs `q`; lets the
// lambda-return tests pin exact bootstrap values.
NetworkParams constant_critic(int n, const std::vector<double>& q) {
  const int side = critic_side_dim(n);
  NetworkSpec spec{{1},
                   {LayerSpec::concat_side(side),
                    LayerSpec::dense(static_cast<int>(q.size()))}};
  NetworkParams p = zero_params(spec);
  for (size_t i = 0; i < q.size(); ++i) p.biases[1][i] = q[i];
  return p;
}

EpisodeTrace one_agent_trace(const std::vector<int>& actions,
                             const std::vector<double>& rewards) {
  EpisodeTrace trace;
  for (size_t t = 0; t < actions.size(); ++t) {
    EpisodeStep s;
    s.critic_obs = Tensor({1}, {1.0});
    s.actions = {actions[t]};
    s.rewards = {rewards[t]};
    trace.steps.push_back(std::move(s));
  }
  trace.ended_by_goal = true;
  return trace;
}

// Independent one-step SARSA and Monte Carlo computations for the limit
// checks (criterion oracle).
std::vector<double> one_step_targets(const std::vector<double>& r,
                                     const std::vector<double>& q_taken,
                                     double gamma) {
  std::vector<double> out(r.size());
  for (size_t t = 0; t < r.size(); ++t)
    out[t] = t + 1 < r.size() ? r[t] + gamma * q_taken[t + 1] : r[t];
  return out;
}

std::vector<double> monte_carlo_targets(const std::vector<double>& r,
                                        double gamma) {
  std::vector<double> out(r.size(), 0.0);
  for (int t = static_cast<int>(r.size()) - 1; t >= 0; --t)
    out[t] = r[t] + (t + 1 < static_cast<int>(r.size()) ? gamma * out[t + 1] : 0.0);
  return out;
}

}  // namespace

TEST_CASE("critic side input lays out one-hot blocks then the agent id") {
  const Tensor side = critic_side_input(3, {4, 7, 10}, 1);
  REQUIRE(side.size() == 2 * 11 + 3);
  CHECK(side[4] == 1.0);        // agent 0's action in block 0
  CHECK(side[11 + 10] == 1.0);  // agent 2's action in block 1
  CHECK(side[22 + 1] == 1.0);   // one-hot agent id
  CHECK(side.sum() == 3.0);
  // Swapping the other agents' actions moves the block contents.
  const Tensor swapped = critic_side_input(3, {10, 7, 4}, 1);
  CHECK(swapped[10] == 1.0);
  CHECK(swapped[11 + 4] == 1.0);
  CHECK_THROWS_AS(critic_side_input(3, {4, 7}, 1), ContractError);
}

TEST_CASE("zero critic produces a zero Q vector of head size") {
  const NetworkParams critic = zero_params(critic_net_spec(3, 10, 18, false));
  const Tensor obs({5, 10, 18});
  const Tensor q = critic_q(critic, obs, 0, {1, 2, 3});
  REQUIRE(q.size() == 11);
  for (size_t i = 0; i < q.size(); ++i) CHECK(q[i] == 0.0);
}

TEST_CASE("lambda returns match the hand-computed 3-step table") {
  // gamma 0.5, lambda 0.8, rewards (1,2,3), bootstrap Q (10,20,30).
  const NetworkParams critic = constant_critic(1, {10, 20, 30, 0, 0, 0, 0, 0, 0});
  const EpisodeTrace trace = one_agent_trace({0, 1, 2}, {1.0, 2.0, 3.0});
  const auto targets = sarsa_lambda_targets(trace, critic, 0.8, 0.5);
  REQUIRE(targets.size() == 3);
  CHECK(targets[0][0] == doctest::Approx(5.48).epsilon(1e-12));
  CHECK(targets[1][0] == doctest::Approx(6.2).epsilon(1e-12));
  CHECK(targets[2][0] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("lambda 0 is one-step SARSA, lambda 1 is Monte Carlo") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int T = 1 + static_cast<int>(rng.uniform_int(12));
    std::vector<int> actions(T);
    std::vector<double> rewards(T);
    std::vector<double> q(9);
    for (auto& a : actions) a = static_cast<int>(rng.uniform_int(9));
    for (auto& r : rewards) r = rng.uniform(-10.0, 10.0);
    for (auto& v : q) v = rng.uniform(-5.0, 5.0);
    const double gamma = rng.uniform(0.1, 0.99);
    const NetworkParams critic = constant_critic(1, q);
    const EpisodeTrace trace = one_agent_trace(actions, rewards);

    std::vector<double> q_taken(T);
    for (int t = 0; t < T; ++t) q_taken[t] = q[actions[t]];

    const auto zero = sarsa_lambda_targets(trace, critic, 0.0, gamma);
    const auto want_zero = one_step_targets(rewards, q_taken, gamma);
    const auto one = sarsa_lambda_targets(trace, critic, 1.0, gamma);
    const auto want_one = monte_carlo_targets(rewards, gamma);
    for (int t = 0; t < T; ++t) {
      REQUIRE(std::abs(zero[t][0] - want_zero[t]) < 1e-10);
      REQUIRE(std::abs(one[t][0] - want_one[t]) < 1e-10);
    }
  }
  CHECK_THROWS_AS(
      sarsa_lambda_targets(EpisodeTrace{}, constant_critic(1, {0}), 0.5, 0.9),
      ContractError);
}

TEST_CASE("critic update is a fixed point when targets equal current Q") {
  NetworkParams critic = constant_critic(1, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const NetworkParams before = critic;
  const EpisodeTrace trace = one_agent_trace({0, 4, 8}, {0.0, 0.0, 0.0});
  std::vector<std::vector<double>> targets = {{1.0}, {5.0}, {9.0}};
  AdamState adam = init_adam(critic, AdamConfig{0.001});
  const double loss = critic_update(critic, trace, targets, adam);
  CHECK(loss == 0.0);
  CHECK(critic == before);
}

TEST_CASE("critic update descends the batch loss") {
  Rng rng(71);
  int descended = 0;
  for (int trial = 0; trial < 100; ++trial) {
    NetworkSpec spec{{1},
                     {LayerSpec::concat_side(critic_side_dim(1)),
                      LayerSpec::dense(6), LayerSpec::relu(),
                      LayerSpec::dense(9)}};
    NetworkParams critic = init_params(spec, rng);
    const int T = 2 + static_cast<int>(rng.uniform_int(6));
    std::vector<int> actions(T);
    std::vector<double> rewards(T);
    for (auto& a : actions) a = static_cast<int>(rng.uniform_int(9));
    for (auto& r : rewards) r = rng.uniform(-5.0, 5.0);
    EpisodeTrace trace = one_agent_trace(actions, rewards);
    for (auto& s : trace.steps) s.critic_obs[0] = rng.uniform(-1.0, 1.0);
    const auto targets = sarsa_lambda_targets(trace, critic, 0.8, 0.9);
    AdamState adam = init_adam(critic, AdamConfig{1e-4});
    const double before = critic_update(critic, trace, targets, adam);
    const double after = critic_update(critic, trace, targets, adam);
    if (after < before) ++descended;
  }
  CHECK(descended >= 95);
}

TEST_CASE("explore_policy mixes toward uniform and stays a distribution") {
  const Tensor pi({4}, {1.0, 0.0, 0.0, 0.0});
  const Tensor same = explore_policy(pi, 0.0);
  CHECK(same == pi);
  const Tensor uniform = explore_policy(pi, 1.0);
  for (size_t i = 0; i < 4; ++i) CHECK(uniform[i] == doctest::Approx(0.25));
  const Tensor half = explore_policy(pi, 0.5);
  CHECK(half[0] == doctest::Approx(0.5 + 0.5 / 4));
  CHECK(half[1] == doctest::Approx(0.5 / 4));
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor p({11});
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
      p[i] = rng.uniform01();
      sum += p[i];
    }
    for (size_t i = 0; i < p.size(); ++i) p[i] /= sum;
    const double eps = rng.uniform01();
    const Tensor mixed = explore_policy(p, eps);
    double total = 0.0;
    for (size_t i = 0; i < mixed.size(); ++i) {
      REQUIRE(mixed[i] >= eps / 11 - 1e-15);
      total += mixed[i];
    }
    REQUIRE(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("counterfactual advantage examples and expectation identity") {
  // Deterministic policy on the taken action: baseline equals Q(s,u).
  Tensor onehot({11});
  onehot[6] = 1.0;
  Tensor q({11});
  for (int i = 0; i < 11; ++i) q[i] = 3.0 * i - 7.0;
  CHECK(counterfactual_advantage(q, 6, onehot) == 0.0);

  // Uniform policy over Q = (0..10), taken = argmax: 10 - mean = 5.
  Tensor iota({11});
  for (int i = 0; i < 11; ++i) iota[i] = i;
  Tensor uniform({11});
  uniform.fill(1.0 / 11);
  CHECK(counterfactual_advantage(iota, 10, uniform) == doctest::Approx(5.0));

  // E_{a ~ pi}[A(s, (u^{-a}, a))] = 0 for any Q and pi.
  Rng rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    Tensor qv({11}), pi({11});
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
      qv[i] = rng.uniform(-10.0, 10.0);
      pi[i] = rng.uniform01() + 1e-6;
      sum += pi[i];
    }
    for (int i = 0; i < 11; ++i) pi[i] /= sum;
    double expectation = 0.0;
    for (int a = 0; a < 11; ++a)
      expectation += pi[a] * counterfactual_advantage(qv, a, pi);
    REQUIRE(std::abs(expectation) < 1e-12);
  }
}

TEST_CASE("policy gradient update: zero advantages change nothing") {
  NetworkSpec spec{{2},
                   {LayerSpec::concat_side(1), LayerSpec::dense(2),
                    LayerSpec::softmax()}};
  Rng rng(5);
  NetworkParams policy = init_params(spec, rng);
  const NetworkParams before = policy;
  EpisodeTrace trace;
  EpisodeStep s;
  s.agent_obs = {Tensor({2}, {0.3, -0.7})};
  s.actions = {1};
  s.rewards = {0.0};
  trace.steps.push_back(s);
  AdamState adam = init_adam(policy, AdamConfig{0.01});
  policy_gradient_update(policy, trace, {{0.0}}, adam);
  CHECK(policy == before);
}

TEST_CASE("policy gradient matches finite differences on a toy policy") {
  NetworkSpec spec{{2},
                   {LayerSpec::concat_side(1), LayerSpec::dense(2),
                    LayerSpec::softmax()}};
  Rng rng(17);
  NetworkParams policy = init_params(spec, rng);
  const Tensor obs({2}, {0.4, -0.2});
  const Tensor side({1}, {1.0});
  const int taken = 0;
  const double advantage = 1.7;

  // Analytic gradient of the surrogate -log pi[taken] * A.
  ForwardCache cache;
  const Tensor pi = forward(policy, obs, &side, &cache);
  Tensor out_grad(pi.shape());
  out_grad[taken] = -advantage / std::max(pi[taken], 1e-8);
  Gradients grads = zero_gradients(policy);
  backward(policy, cache, out_grad, &grads);

  const double h = 1e-6;
  for (size_t k = 0; k < policy.weights[1].size(); ++k) {
    const double saved = policy.weights[1][k];
    auto objective = [&] {
      const Tensor p = forward(policy, obs, &side);
      return std::log(std::max(p[taken], 1e-8)) * advantage;
    };
    policy.weights[1][k] = saved + h;
    const double up = objective();
    policy.weights[1][k] = saved - h;
    const double down = objective();
    policy.weights[1][k] = saved;
    const double fd = (up - down) / (2 * h);
    // grads holds the minimizer's gradient of the negated objective.
    CHECK(-grads.weights[1][k] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("positive advantage on an action raises its probability") {
  NetworkSpec spec{{2},
                   {LayerSpec::concat_side(1), LayerSpec::dense(2),
                    LayerSpec::softmax()}};
  Rng rng(23);
  NetworkParams policy = init_params(spec, rng);
  const Tensor obs({2}, {0.4, -0.2});
  EpisodeTrace trace;
  EpisodeStep s;
  s.agent_obs = {obs};
  s.actions = {0};
  s.rewards = {1.0};
  trace.steps.push_back(s);
  const double before = policy_distribution(policy, obs, 0, 1)[0];
  AdamState adam = init_adam(policy, AdamConfig{0.001});
  policy_gradient_update(policy, trace, {{2.0}}, adam);
  const double after = policy_distribution(policy, obs, 0, 1)[0];
  CHECK(after > before);
}

TEST_CASE("sample_from walks the CDF deterministically") {
  const Tensor dist({3}, {0.2, 0.5, 0.3});
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(sample_from(dist, a) == sample_from(dist, b));
  // Frequencies roughly match the distribution.
  Rng rng(33);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) ++counts[sample_from(dist, rng)];
  CHECK(counts[0] > 5200);
  CHECK(counts[0] < 6800);
  CHECK(counts[1] > 14000);
  CHECK(counts[1] < 16000);
}
