#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <vector>

#include "gridsoccer/encoding.hpp"
#include "gridsoccer/nn.hpp"

namespace gridsoccer {

/// One (s, a, r, s') transition; `terminal` marks a goal ending play.
struct Experience {
  Tensor obs;
  int action = 0;  // flat index into the protocol's head
  double reward = 0.0;
  Tensor obs_next;
  bool terminal = false;
  bool operator==(const Experience&) const = default;
};

/// FIFO ring with uniform with-replacement sampling.
class ReplayBuffer {
public:
  explicit ReplayBuffer(size_t capacity);

  void push(Experience e);
  size_t size() const { return storage_.size(); }
  size_t capacity() const { return capacity_; }
  bool ready(size_t minibatch) const { return storage_.size() >= minibatch; }
  const Experience& at(size_t i) const { return storage_[i]; }

  /// Uniform with replacement; ContractError when not ready(m).
  std::vector<const Experience*> sample(size_t m, Rng& rng) const;

  void save(std::ostream& os) const;
  static ReplayBuffer load(std::istream& is);
  bool operator==(const ReplayBuffer&) const = default;

private:
  size_t capacity_;
  std::deque<Experience> storage_;
};

/// Linear decay from start to end over decay_steps, clamped.
struct EpsilonSchedule {
  double start = 0.5;
  double end = 0.05;
  int64_t decay_steps = 300000;

  double value(int64_t t) const;
};

/// Highest Q entry, ties to the lowest index.
int greedy_action(const Tensor& q_values);

/// Epsilon-greedy over the network head. Always consumes one uniform draw
/// for the explore decision and one more only when exploring, so action
/// traces are comparable across protocols under a shared stream.
int select_action(const NetworkParams& q_net, const Tensor& obs, double epsilon,
                  Rng& rng);

struct TdLoss {
  double loss = 0.0;
  Gradients grads;
};

// Mean squared TD error over the batch against the frozen target net; the
// bootstrap max is dropped on terminal transitions and gradients flow only
// through Q(s, a).
TdLoss td_loss_and_gradient(const NetworkParams& q_net,
                            const NetworkParams& target_net,
                            const std::vector<const Experience*>& batch,
                            double gamma);

enum class CreditMode { Off, Ratio };

// Q-weighted credit assignment. Ratio mode rescales each agent's reward by
// q_taken[i] / mean(q_taken) after shifting the Q values so their minimum is
// at least 1, clamped to [0.5, 2] times the original reward (sign kept).
std::vector<double> credit_assign(const std::vector<double>& rewards,
                                  const std::vector<double>& q_taken,
                                  CreditMode mode);

/// Result of one coordinated action selection for a whole team.
struct CoordinatedSelection {
  std::vector<JointCommAction> joint;  // by agent index
  std::vector<int> flat_indices;       // joint head indices
  std::vector<Tensor> observations;    // encoded comm observations
  std::vector<int> next_comms;         // broadcast symbols for the next step
};

// Decentralized coordinated selection: each agent encodes its comm
// observation from the previous step's symbols and epsilon-greedily picks a
// joint (action, symbol) index; the chosen symbols become the next history.
CoordinatedSelection coordinated_step(const NetworkParams& q_net,
                                      const GameState& state, Team team,
                                      const std::vector<int>& comm_history,
                                      int comm_symbols, double epsilon,
                                      Rng& rng);

}  // namespace gridsoccer
