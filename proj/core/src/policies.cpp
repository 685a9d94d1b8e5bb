#include "gridsoccer/policies.hpp"

#include <ostream>

#include "gridsoccer/checkpoint.hpp"
#include "gridsoccer/coma.hpp"
#include "gridsoccer/dqn.hpp"
#include "gridsoccer/encoding.hpp"
#include "gridsoccer/errors.hpp"
#include "gridsoccer/handcoded.hpp"

namespace gridsoccer {

void TeamPolicy::save(std::ostream&) const {}
void TeamPolicy::load(std::istream&) {}

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

class RandomPolicy final : public TeamPolicy {
public:
  RandomPolicy(Team, Rng stream) : rng_(stream) {}

  std::vector<Action> act(const GameState& state) override {
    const int n = state.players_per_team;
    std::vector<Action> actions(n);
    for (int i = 0; i < n; ++i)
      actions[i] = Action{static_cast<int>(rng_.uniform_int(action_count(n)))};
    return actions;
  }

  std::string kind() const override { return "random"; }
  void save(std::ostream& os) const override { write_rng(os, rng_); }
  void load(std::istream& is) override { rng_ = read_rng(is); }

private:
  Rng rng_;
};

class HandcodedPolicy final : public TeamPolicy {
public:
  explicit HandcodedPolicy(Team side) : side_(side) {}

  std::vector<Action> act(const GameState& state) override {
    return handcoded_actions(state, side_);
  }

  std::string kind() const override { return "handcoded"; }

private:
  Team side_;
};

class DqnPolicy final : public TeamPolicy {
public:
  DqnPolicy(Team side, int n, std::vector<NetworkParams> nets,
            EncoderKind encoder, int comm_symbols, double epsilon, Rng stream)
      : side_(side),
        n_(n),
        nets_(std::move(nets)),
        encoder_(encoder),
        comm_symbols_(comm_symbols),
        epsilon_(epsilon),
        rng_(stream),
        comm_history_(n, 0) {
    if (nets_.empty()) throw ContractError("dqn policy: no networks");
  }

  std::vector<Action> act(const GameState& state) override {
    const GameState view = side_ == Team::Left ? state : mirror_state(state);
    std::vector<Action> actions(n_);
    std::vector<int> next_comms(n_, 0);
    for (int i = 0; i < n_; ++i) {
      const NetworkParams& net = nets_[nets_.size() == 1 ? 0 : i];
      int code;
      if (encoder_ == EncoderKind::Comm) {
        const Observation obs = encode_comm(view, AgentId{Team::Left, i},
                                            comm_history_, comm_symbols_);
        const int flat = select_action(net, obs.data, epsilon_, rng_);
        const JointCommAction joint = joint_from_flat(flat, n_, comm_symbols_);
        next_comms[i] = joint.comm;
        code = joint.base.code;
      } else {
        const Observation obs = encode_basic(view, AgentId{Team::Left, i});
        code = select_action(net, obs.data, epsilon_, rng_);
      }
      actions[i] = Action{side_ == Team::Left ? code : mirror_action_code(code)};
    }
    if (encoder_ == EncoderKind::Comm) comm_history_ = next_comms;
    return actions;
  }

  void on_episode_reset() override {
    std::fill(comm_history_.begin(), comm_history_.end(), 0);
  }

  std::string kind() const override { return "dqn"; }

  void save(std::ostream& os) const override {
    io::write_u32(os, static_cast<uint32_t>(n_));
    io::write_u32(os, encoder_ == EncoderKind::Comm ? 1 : 0);
    io::write_u32(os, static_cast<uint32_t>(comm_symbols_));
    io::write_f64(os, epsilon_);
    io::write_u32(os, static_cast<uint32_t>(nets_.size()));
    for (const auto& net : nets_) write_params(os, net);
    for (int c : comm_history_) io::write_u32(os, static_cast<uint32_t>(c));
    write_rng(os, rng_);
  }

  void load(std::istream& is) override {
    n_ = static_cast<int>(io::read_u32(is));
    encoder_ = io::read_u32(is) ? EncoderKind::Comm : EncoderKind::Basic;
    comm_symbols_ = static_cast<int>(io::read_u32(is));
    epsilon_ = io::read_f64(is);
    nets_.resize(io::read_u32(is));
    for (auto& net : nets_) net = read_params(is);
    comm_history_.resize(n_);
    for (int& c : comm_history_) c = static_cast<int>(io::read_u32(is));
    rng_ = read_rng(is);
  }

private:
  Team side_;
  int n_;
  std::vector<NetworkParams> nets_;
  EncoderKind encoder_;
  int comm_symbols_;
  double epsilon_;
  Rng rng_;
  std::vector<int> comm_history_;
};

class ComaPolicy final : public TeamPolicy {
public:
  ComaPolicy(Team side, int n, NetworkParams policy_net, Rng stream)
      : side_(side), n_(n), policy_(std::move(policy_net)), rng_(stream) {}

  std::vector<Action> act(const GameState& state) override {
    const GameState view = side_ == Team::Left ? state : mirror_state(state);
    std::vector<Action> actions(n_);
    for (int i = 0; i < n_; ++i) {
      const Observation obs = encode_basic(view, AgentId{Team::Left, i});
      const Tensor pi = policy_distribution(policy_, obs.data, i, n_);
      const int code = sample_from(pi, rng_);
      actions[i] = Action{side_ == Team::Left ? code : mirror_action_code(code)};
    }
    return actions;
  }

  std::string kind() const override { return "coma"; }

  void save(std::ostream& os) const override {
    io::write_u32(os, static_cast<uint32_t>(n_));
    write_params(os, policy_);
    write_rng(os, rng_);
  }

  void load(std::istream& is) override {
    n_ = static_cast<int>(io::read_u32(is));
    policy_ = read_params(is);
    rng_ = read_rng(is);
  }

private:
  Team side_;
  int n_;
  NetworkParams policy_;
  Rng rng_;
};

}  // namespace

std::unique_ptr<TeamPolicy> make_random_policy(Team side, Rng stream) {
  return std::make_unique<RandomPolicy>(side, stream);
}

std::unique_ptr<TeamPolicy> make_handcoded_policy(Team side) {
  return std::make_unique<HandcodedPolicy>(side);
}

std::unique_ptr<TeamPolicy> make_dqn_policy(Team side, int players_per_team,
                                            std::vector<NetworkParams> nets,
                                            EncoderKind encoder, int comm_symbols,
                                            double epsilon, Rng stream) {
  return std::make_unique<DqnPolicy>(side, players_per_team, std::move(nets),
                                     encoder, comm_symbols, epsilon, stream);
}

std::unique_ptr<TeamPolicy> make_coma_policy(Team side, int players_per_team,
                                             NetworkParams policy_net, Rng stream) {
  return std::make_unique<ComaPolicy>(side, players_per_team,
                                      std::move(policy_net), stream);
}

void save_team_policy(std::ostream& os, const TeamPolicy& policy) {
  io::write_string(os, policy.kind());
  policy.save(os);
}

std::unique_ptr<TeamPolicy> load_team_policy(std::istream& is, Team side) {
  const std::string kind = io::read_string(is);
  std::unique_ptr<TeamPolicy> policy;
  if (kind == "random") {
    policy = make_random_policy(side, Rng(0));
  } else if (kind == "handcoded") {
    policy = make_handcoded_policy(side);
  } else if (kind == "dqn") {
    policy = make_dqn_policy(side, 1, {NetworkParams{}}, EncoderKind::Basic, 1,
                             0.0, Rng(0));
  } else if (kind == "coma") {
    policy = make_coma_policy(side, 1, NetworkParams{}, Rng(0));
  } else {
    throw CheckpointError("unknown policy kind: " + kind);
  }
  policy->load(is);
  return policy;
}

}  // namespace gridsoccer
