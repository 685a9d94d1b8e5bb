#include "gridsoccer/dqn.hpp"

#include <algorithm>
#include <cmath>

#include "gridsoccer/checkpoint.hpp"
#include "gridsoccer/errors.hpp"

namespace gridsoccer {

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ContractError("replay buffer needs capacity > 0");
}

void ReplayBuffer::push(Experience e) {
  storage_.push_back(std::move(e));
  if (storage_.size() > capacity_) storage_.pop_front();
}

std::vector<const Experience*> ReplayBuffer::sample(size_t m, Rng& rng) const {
  if (!ready(m)) throw ContractError("replay buffer not ready for this minibatch");
  std::vector<const Experience*> batch(m);
  for (size_t i = 0; i < m; ++i)
    batch[i] = &storage_[rng.uniform_int(storage_.size())];
  return batch;
}

void ReplayBuffer::save(std::ostream& os) const {
  io::write_u64(os, capacity_);
  io::write_u64(os, storage_.size());
  for (const Experience& e : storage_) {
    io::write_tensor(os, e.obs);
    io::write_u32(os, static_cast<uint32_t>(e.action));
    io::write_f64(os, e.reward);
    io::write_tensor(os, e.obs_next);
    io::write_u32(os, e.terminal ? 1 : 0);
  }
}

ReplayBuffer ReplayBuffer::load(std::istream& is) {
  ReplayBuffer buf(io::read_u64(is));
  const uint64_t n = io::read_u64(is);
  for (uint64_t i = 0; i < n; ++i) {
    Experience e;
    e.obs = io::read_tensor(is);
    e.action = static_cast<int>(io::read_u32(is));
    e.reward = io::read_f64(is);
    e.obs_next = io::read_tensor(is);
    e.terminal = io::read_u32(is) != 0;
    buf.storage_.push_back(std::move(e));
  }
  return buf;
}

double EpsilonSchedule::value(int64_t t) const {
  if (decay_steps <= 0 || t >= decay_steps) return end;
  if (t <= 0) return start;
  return start + (end - start) * static_cast<double>(t) /
                     static_cast<double>(decay_steps);
}

int greedy_action(const Tensor& q_values) {
  int best = 0;
  for (size_t i = 1; i < q_values.size(); ++i)
    if (q_values[i] > q_values[best]) best = static_cast<int>(i);
  return best;
}

int select_action(const NetworkParams& q_net, const Tensor& obs, double epsilon,
                  Rng& rng) {
  const size_t head = shape_size(q_net.spec.output_shape());
  const double u = rng.uniform01();
  if (u < epsilon) return static_cast<int>(rng.uniform_int(head));
  return greedy_action(forward(q_net, obs));
}

TdLoss td_loss_and_gradient(const NetworkParams& q_net,
                            const NetworkParams& target_net,
                            const std::vector<const Experience*>& batch,
                            double gamma) {
  if (batch.empty()) throw ContractError("td_loss: empty batch");
  if (gamma < 0.0 || gamma >= 1.0)
    throw ContractError("td_loss: gamma must be in [0,1)");
  TdLoss result;
  result.grads = zero_gradients(q_net);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  const size_t head = shape_size(q_net.spec.output_shape());
  for (const Experience* e : batch) {
    ForwardCache cache;
    const Tensor q = forward(q_net, e->obs, nullptr, &cache);
    if (e->action < 0 || static_cast<size_t>(e->action) >= head)
      throw ContractError("td_loss: action outside network head");
    double target = e->reward;
    if (!e->terminal) {
      const Tensor q_next = forward(target_net, e->obs_next);
      target += gamma * q_next[greedy_action(q_next)];
    }
    const double delta = target - q[e->action];
    result.loss += delta * delta * inv_m;
    Tensor out_grad(q.shape());
    out_grad[e->action] = -2.0 * delta * inv_m;
    backward(q_net, cache, out_grad, &result.grads);
  }
  if (!std::isfinite(result.loss))
    throw TrainingError("td_loss: non-finite loss");
  return result;
}

std::vector<double> credit_assign(const std::vector<double>& rewards,
                                  const std::vector<double>& q_taken,
                                  CreditMode mode) {
  if (mode == CreditMode::Off) return rewards;
  if (rewards.size() != q_taken.size() || rewards.empty())
    throw ContractError("credit_assign: need matching non-empty inputs");
  const double q_min = *std::min_element(q_taken.begin(), q_taken.end());
  const double shift = q_min < 1.0 ? 1.0 - q_min : 0.0;
  double mean = 0.0;
  for (double q : q_taken) mean += q + shift;
  mean /= static_cast<double>(q_taken.size());
  std::vector<double> out(rewards.size());
  for (size_t i = 0; i < rewards.size(); ++i) {
    const double scaled = rewards[i] * (q_taken[i] + shift) / mean;
    const double lo = std::min(0.5 * rewards[i], 2.0 * rewards[i]);
    const double hi = std::max(0.5 * rewards[i], 2.0 * rewards[i]);
    out[i] = std::clamp(scaled, lo, hi);
  }
  return out;
}

CoordinatedSelection coordinated_step(const NetworkParams& q_net,
                                      const GameState& state, Team team,
                                      const std::vector<int>& comm_history,
                                      int comm_symbols, double epsilon,
                                      Rng& rng) {
  const int n = state.players_per_team;
  if (static_cast<int>(comm_history.size()) != n)
    throw ContractError("coordinated_step: comm history must cover the team");
  CoordinatedSelection sel;
  sel.joint.resize(n);
  sel.flat_indices.resize(n);
  sel.observations.resize(n);
  sel.next_comms.resize(n);
  for (int i = 0; i < n; ++i) {
    Observation obs =
        encode_comm(state, AgentId{team, i}, comm_history, comm_symbols);
    const int flat = select_action(q_net, obs.data, epsilon, rng);
    sel.joint[i] = joint_from_flat(flat, n, comm_symbols);
    sel.flat_indices[i] = flat;
    sel.observations[i] = std::move(obs.data);
    sel.next_comms[i] = sel.joint[i].comm;
  }
  return sel;
}

}  // namespace gridsoccer
