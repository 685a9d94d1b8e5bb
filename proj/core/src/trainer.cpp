#include "gridsoccer/trainer.hpp"

#include <algorithm>
#include <ostream>

#include "gridsoccer/checkpoint.hpp"
#include "gridsoccer/dqn.hpp"
#include "gridsoccer/errors.hpp"
#include "gridsoccer/netspecs.hpp"

namespace gridsoccer {

namespace {

void write_rng(std::ostream& os, const Rng& rng) {
  for (uint64_t w : rng.state()) io::write_u64(os, w);
}

Rng read_rng(std::istream& is) {
  std::array<uint64_t, 4> st;
  for (auto& w : st) w = io::read_u64(is);
  Rng rng;
  rng.set_state(st);
  return rng;
}

std::string side_tag(Team side) {
  return side == Team::Left ? "left" : "right";
}

bool episode_ended(const StepOutcome& outcome) {
  return outcome.goal_scored.has_value() ||
         outcome.next_state.steps_since_reset == 0;
}

// Scripted, non-learning team (the Handcoded and Random "protocols").
class ScriptedTrainer final : public Trainer {
public:
  ScriptedTrainer(Team side, Protocol protocol, uint64_t root_seed)
      : Trainer(side), protocol_(protocol) {
    if (protocol == Protocol::Random)
      policy_ = make_random_policy(
          side, Rng::stream(root_seed, "policy/" + side_tag(side)));
    else
      policy_ = make_handcoded_policy(side);
  }

  std::vector<Action> act(const GameState& state, double) override {
    return policy_->act(state);
  }

  std::optional<double> observe(const StepOutcome&) override { return {}; }

  void on_episode_reset() override { policy_->on_episode_reset(); }

  std::unique_ptr<TeamPolicy> make_eval_policy(Rng stream) const override {
    if (protocol_ == Protocol::Random) return make_random_policy(side_, stream);
    return make_handcoded_policy(side_);
  }

  void save(std::ostream& os) const override { save_team_policy(os, *policy_); }
  void load(std::istream& is) override { policy_ = load_team_policy(is, side_); }

private:
  Protocol protocol_;
  std::unique_ptr<TeamPolicy> policy_;
};

// Concurrent (per-agent nets) and ParamShare (one net) online Q-learning.
class DqnTrainer final : public Trainer {
public:
  DqnTrainer(const TrainConfig& config, Team side, uint64_t root_seed)
      : Trainer(side),
        n_(config.env.players_per_team),
        shared_(config.protocol == Protocol::ParamShare),
        encoder_(config.resolved_encoder()),
        comm_symbols_(config.comm_symbols),
        gamma_(config.gamma),
        learning_(config.learning_enabled),
        explore_rng_(Rng::stream(root_seed, "explore/" + side_tag(side))) {
    if (encoder_ == EncoderKind::Comm && comm_symbols_ != 1)
      throw ConfigError(
          "concurrent/paramshare with the comm encoder requires comm_symbols=1");
    const int channels = encoder_ == EncoderKind::Comm ? 3 + comm_symbols_ : 4;
    const int head = encoder_ == EncoderKind::Comm
                         ? joint_head_size(n_, comm_symbols_)
                         : basic_head_size(n_);
    const NetworkSpec spec = dqn_net_spec(channels, config.env.height,
                                          config.env.width, head,
                                          config.net_is_small());
    Rng init = Rng::stream(root_seed, "init/" + side_tag(side));
    const int copies = shared_ ? 1 : n_;
    for (int i = 0; i < copies; ++i) {
      nets_.push_back(init_params(spec, init));
      targets_.push_back(nets_.back());
      adams_.push_back(init_adam(nets_.back(), AdamConfig{config.lr}));
    }
    zero_comms_.assign(n_, 0);
  }

  std::vector<Action> act(const GameState& state, double epsilon) override {
    const GameState view = side_ == Team::Left ? state : mirror_state(state);
    pending_obs_.clear();
    pending_flat_.clear();
    std::vector<Action> actions(n_);
    for (int i = 0; i < n_; ++i) {
      Tensor obs = encode(view, i);
      const int flat = select_action(net(i), obs, epsilon, explore_rng_);
      int code = flat;
      if (encoder_ == EncoderKind::Comm)
        code = joint_from_flat(flat, n_, comm_symbols_).base.code;
      actions[i] = Action{side_ == Team::Left ? code : mirror_action_code(code)};
      pending_obs_.push_back(std::move(obs));
      pending_flat_.push_back(flat);
    }
    return actions;
  }

  std::optional<double> observe(const StepOutcome& outcome) override {
    if (pending_obs_.empty())
      throw ContractError("trainer: observe without a matching act");
    const GameState view = side_ == Team::Left ? outcome.next_state
                                               : mirror_state(outcome.next_state);
    const bool terminal = outcome.goal_scored.has_value();
    const int base = team_index(side_) * n_;
    std::optional<double> mean_loss;
    double loss_sum = 0.0;
    for (int i = 0; i < n_; ++i) {
      Experience e;
      e.obs = std::move(pending_obs_[i]);
      e.action = pending_flat_[i];
      e.reward = outcome.rewards[base + i];
      e.obs_next = encode(view, i);
      e.terminal = terminal;
      if (learning_) {
        const int k = shared_ ? 0 : i;
        const TdLoss td =
            td_loss_and_gradient(nets_[k], targets_[k], {&e}, gamma_);
        adam_step(nets_[k], td.grads, adams_[k]);
        loss_sum += td.loss;
      }
    }
    pending_obs_.clear();
    pending_flat_.clear();
    if (learning_) mean_loss = loss_sum / n_;
    return mean_loss;
  }

  void sync_target() override { targets_ = nets_; }

  std::unique_ptr<TeamPolicy> make_eval_policy(Rng stream) const override {
    return make_dqn_policy(side_, n_, nets_, encoder_, comm_symbols_,
                           eval_epsilon_, stream);
  }

  void save(std::ostream& os) const override {
    io::write_u32(os, static_cast<uint32_t>(nets_.size()));
    for (size_t i = 0; i < nets_.size(); ++i) {
      write_params(os, nets_[i]);
      write_params(os, targets_[i]);
      write_adam(os, adams_[i]);
    }
    write_rng(os, explore_rng_);
  }

  void load(std::istream& is) override {
    const uint32_t count = io::read_u32(is);
    if (count != nets_.size())
      throw CheckpointError("trainer: checkpoint net count mismatch");
    for (size_t i = 0; i < count; ++i) {
      nets_[i] = read_params(is);
      targets_[i] = read_params(is);
      adams_[i] = read_adam(is);
    }
    explore_rng_ = read_rng(is);
  }

  void set_eval_epsilon(double eps) { eval_epsilon_ = eps; }
  void set_learning(bool on) override { learning_ = on; }

private:
  Tensor encode(const GameState& view, int agent) const {
    if (encoder_ == EncoderKind::Comm)
      return encode_comm(view, AgentId{Team::Left, agent}, zero_comms_,
                         comm_symbols_)
          .data;
    return encode_basic(view, AgentId{Team::Left, agent}).data;
  }

  const NetworkParams& net(int agent) const {
    return nets_[shared_ ? 0 : agent];
  }

  int n_;
  bool shared_;
  EncoderKind encoder_;
  int comm_symbols_;
  double gamma_;
  bool learning_;
  double eval_epsilon_ = 0.05;
  std::vector<NetworkParams> nets_, targets_;
  std::vector<AdamState> adams_;
  Rng explore_rng_;
  std::vector<int> zero_comms_;
  std::vector<Tensor> pending_obs_;
  std::vector<int> pending_flat_;
};

// Coordinated learning with communication: shared net over the joint
// (action, symbol) head, replay buffer plus minibatch updates.
class CoordinatedTrainer final : public Trainer {
public:
  CoordinatedTrainer(const TrainConfig& config, Team side, uint64_t root_seed)
      : Trainer(side),
        n_(config.env.players_per_team),
        comm_symbols_(config.comm_symbols),
        gamma_(config.gamma),
        learning_(config.learning_enabled),
        credit_mode_(config.credit_mode),
        minibatch_(static_cast<size_t>(config.minibatch_size)),
        update_interval_(config.coordinated_update_interval),
        buffer_(static_cast<size_t>(config.buffer_capacity)),
        explore_rng_(Rng::stream(root_seed, "explore/" + side_tag(side))),
        replay_rng_(Rng::stream(root_seed, "replay/" + side_tag(side))),
        comm_history_(config.env.players_per_team, 0) {
    if (config.resolved_encoder() != EncoderKind::Comm)
      throw ConfigError("coordinated protocol requires the comm encoder");
    const NetworkSpec spec =
        dqn_net_spec(3 + comm_symbols_, config.env.height, config.env.width,
                     joint_head_size(n_, comm_symbols_), config.net_is_small());
    Rng init = Rng::stream(root_seed, "init/" + side_tag(side));
    net_ = init_params(spec, init);
    target_ = net_;
    adam_ = init_adam(net_, AdamConfig{config.lr});
  }

  std::vector<Action> act(const GameState& state, double epsilon) override {
    const GameState view = side_ == Team::Left ? state : mirror_state(state);
    pending_ = coordinated_step(net_, view, Team::Left, comm_history_,
                                comm_symbols_, epsilon, explore_rng_);
    std::vector<Action> actions(n_);
    for (int i = 0; i < n_; ++i) {
      const int code = pending_.joint[i].base.code;
      actions[i] = Action{side_ == Team::Left ? code : mirror_action_code(code)};
    }
    return actions;
  }

  std::optional<double> observe(const StepOutcome& outcome) override {
    if (pending_.observations.empty())
      throw ContractError("trainer: observe without a matching act");
    const GameState view = side_ == Team::Left ? outcome.next_state
                                               : mirror_state(outcome.next_state);
    const bool terminal = outcome.goal_scored.has_value();
    const int base = team_index(side_) * n_;

    std::vector<double> rewards(n_);
    for (int i = 0; i < n_; ++i) rewards[i] = outcome.rewards[base + i];
    if (credit_mode_ == CreditMode::Ratio) {
      std::vector<double> q_taken(n_);
      for (int i = 0; i < n_; ++i)
        q_taken[i] =
            forward(net_, pending_.observations[i])[pending_.flat_indices[i]];
      rewards = credit_assign(rewards, q_taken, credit_mode_);
    }

    for (int i = 0; i < n_; ++i) {
      Experience e;
      e.obs = std::move(pending_.observations[i]);
      e.action = pending_.flat_indices[i];
      e.reward = rewards[i];
      e.obs_next = encode_comm(view, AgentId{Team::Left, i},
                               pending_.next_comms, comm_symbols_)
                       .data;
      e.terminal = terminal;
      buffer_.push(std::move(e));
    }
    comm_history_ = pending_.next_comms;
    pending_ = CoordinatedSelection{};

    ++steps_seen_;
    if (learning_ && steps_seen_ % update_interval_ == 0 &&
        buffer_.ready(minibatch_)) {
      const auto batch = buffer_.sample(minibatch_, replay_rng_);
      const TdLoss td = td_loss_and_gradient(net_, target_, batch, gamma_);
      adam_step(net_, td.grads, adam_);
      return td.loss;
    }
    return {};
  }

  void sync_target() override { target_ = net_; }

  void on_episode_reset() override {
    std::fill(comm_history_.begin(), comm_history_.end(), 0);
  }

  std::unique_ptr<TeamPolicy> make_eval_policy(Rng stream) const override {
    return make_dqn_policy(side_, n_, {net_}, EncoderKind::Comm, comm_symbols_,
                           eval_epsilon_, stream);
  }

  void save(std::ostream& os) const override {
    write_params(os, net_);
    write_params(os, target_);
    write_adam(os, adam_);
    buffer_.save(os);
    io::write_i64(os, steps_seen_);
    for (int c : comm_history_) io::write_u32(os, static_cast<uint32_t>(c));
    write_rng(os, explore_rng_);
    write_rng(os, replay_rng_);
  }

  void load(std::istream& is) override {
    net_ = read_params(is);
    target_ = read_params(is);
    adam_ = read_adam(is);
    buffer_ = ReplayBuffer::load(is);
    steps_seen_ = io::read_i64(is);
    for (int& c : comm_history_) c = static_cast<int>(io::read_u32(is));
    explore_rng_ = read_rng(is);
    replay_rng_ = read_rng(is);
  }

  void set_eval_epsilon(double eps) { eval_epsilon_ = eps; }
  void set_learning(bool on) override { learning_ = on; }

private:
  int n_;
  int comm_symbols_;
  double gamma_;
  bool learning_;
  CreditMode credit_mode_;
  size_t minibatch_;
  int64_t update_interval_;
  double eval_epsilon_ = 0.05;
  NetworkParams net_, target_;
  AdamState adam_;
  ReplayBuffer buffer_;
  Rng explore_rng_, replay_rng_;
  std::vector<int> comm_history_;
  int64_t steps_seen_ = 0;
  CoordinatedSelection pending_;
};

// Counterfactual policy gradients: shared softmax policy with agent one-hot,
// centralized critic trained with episodic SARSA(lambda) returns.
class ComaTrainer final : public Trainer {
public:
  ComaTrainer(const TrainConfig& config, Team side, uint64_t root_seed)
      : Trainer(side),
        n_(config.env.players_per_team),
        gamma_(config.gamma),
        lambda_(config.lambda),
        learning_(config.learning_enabled),
        explore_rng_(Rng::stream(root_seed, "explore/" + side_tag(side))) {
    const bool small = config.net_is_small();
    Rng init = Rng::stream(root_seed, "init/" + side_tag(side));
    critic_ =
        init_params(critic_net_spec(n_, config.env.height, config.env.width, small),
                    init);
    policy_ =
        init_params(policy_net_spec(n_, config.env.height, config.env.width, small),
                    init);
    critic_adam_ = init_adam(critic_, AdamConfig{config.lr});
    policy_adam_ = init_adam(policy_, AdamConfig{config.alpha});
  }

  std::vector<Action> act(const GameState& state, double epsilon) override {
    const GameState view = side_ == Team::Left ? state : mirror_state(state);
    pending_ = EpisodeStep{};
    pending_.critic_obs = encode_critic(view, Team::Left).data;
    pending_.agent_obs.resize(n_);
    pending_.actions.resize(n_);
    std::vector<Action> actions(n_);
    for (int i = 0; i < n_; ++i) {
      pending_.agent_obs[i] = encode_basic(view, AgentId{Team::Left, i}).data;
      const Tensor pi = policy_distribution(policy_, pending_.agent_obs[i], i, n_);
      const Tensor mixed = explore_policy(pi, epsilon);
      const int code = sample_from(mixed, explore_rng_);
      pending_.actions[i] = code;
      actions[i] = Action{side_ == Team::Left ? code : mirror_action_code(code)};
    }
    return actions;
  }

  std::optional<double> observe(const StepOutcome& outcome) override {
    if (pending_.actions.empty())
      throw ContractError("trainer: observe without a matching act");
    const int base = team_index(side_) * n_;
    pending_.rewards.resize(n_);
    for (int i = 0; i < n_; ++i) pending_.rewards[i] = outcome.rewards[base + i];
    trace_.steps.push_back(std::move(pending_));
    pending_ = EpisodeStep{};

    if (!episode_ended(outcome)) return {};
    trace_.ended_by_goal = outcome.goal_scored.has_value();
    std::optional<double> loss;
    if (learning_) {
      const auto targets = sarsa_lambda_targets(trace_, critic_, lambda_, gamma_);
      loss = critic_update(critic_, trace_, targets, critic_adam_);
      std::vector<std::vector<double>> advantages(trace_.steps.size(),
                                                  std::vector<double>(n_));
      for (size_t t = 0; t < trace_.steps.size(); ++t) {
        const EpisodeStep& s = trace_.steps[t];
        for (int a = 0; a < n_; ++a) {
          const Tensor q = critic_q(critic_, s.critic_obs, a, s.actions);
          const Tensor pi = policy_distribution(policy_, s.agent_obs[a], a, n_);
          advantages[t][a] = counterfactual_advantage(q, s.actions[a], pi);
        }
      }
      policy_gradient_update(policy_, trace_, advantages, policy_adam_);
    }
    trace_ = EpisodeTrace{};
    return loss;
  }

  void set_learning(bool on) override { learning_ = on; }

  std::unique_ptr<TeamPolicy> make_eval_policy(Rng stream) const override {
    return make_coma_policy(side_, n_, policy_, stream);
  }

  void save(std::ostream& os) const override {
    write_params(os, critic_);
    write_params(os, policy_);
    write_adam(os, critic_adam_);
    write_adam(os, policy_adam_);
    write_rng(os, explore_rng_);
    io::write_u32(os, trace_.ended_by_goal ? 1 : 0);
    io::write_u64(os, trace_.steps.size());
    for (const EpisodeStep& s : trace_.steps) {
      io::write_tensor(os, s.critic_obs);
      for (const Tensor& t : s.agent_obs) io::write_tensor(os, t);
      for (int a : s.actions) io::write_u32(os, static_cast<uint32_t>(a));
      for (double r : s.rewards) io::write_f64(os, r);
    }
  }

  void load(std::istream& is) override {
    critic_ = read_params(is);
    policy_ = read_params(is);
    critic_adam_ = read_adam(is);
    policy_adam_ = read_adam(is);
    explore_rng_ = read_rng(is);
    trace_ = EpisodeTrace{};
    trace_.ended_by_goal = io::read_u32(is) != 0;
    const uint64_t steps = io::read_u64(is);
    for (uint64_t k = 0; k < steps; ++k) {
      EpisodeStep s;
      s.critic_obs = io::read_tensor(is);
      s.agent_obs.resize(n_);
      for (Tensor& t : s.agent_obs) t = io::read_tensor(is);
      s.actions.resize(n_);
      for (int& a : s.actions) a = static_cast<int>(io::read_u32(is));
      s.rewards.resize(n_);
      for (double& r : s.rewards) r = io::read_f64(is);
      trace_.steps.push_back(std::move(s));
    }
  }

private:
  int n_;
  double gamma_, lambda_;
  bool learning_;
  NetworkParams critic_, policy_;
  AdamState critic_adam_, policy_adam_;
  Rng explore_rng_;
  EpisodeTrace trace_;
  EpisodeStep pending_;
};

}  // namespace

std::unique_ptr<Trainer> make_trainer(const TrainConfig& config, Team side,
                                      uint64_t root_seed) {
  switch (config.protocol) {
    case Protocol::Concurrent:
    case Protocol::ParamShare: {
      auto t = std::make_unique<DqnTrainer>(config, side, root_seed);
      t->set_eval_epsilon(config.epsilon.end);
      return t;
    }
    case Protocol::Coordinated: {
      auto t = std::make_unique<CoordinatedTrainer>(config, side, root_seed);
      t->set_eval_epsilon(config.epsilon.end);
      return t;
    }
    case Protocol::Coma:
      return std::make_unique<ComaTrainer>(config, side, root_seed);
    case Protocol::Handcoded:
    case Protocol::Random:
      return std::make_unique<ScriptedTrainer>(side, config.protocol, root_seed);
  }
  throw ConfigError("make_trainer: unknown protocol");
}

}  // namespace gridsoccer
