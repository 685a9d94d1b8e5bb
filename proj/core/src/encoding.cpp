#include "gridsoccer/encoding.hpp"

#include "gridsoccer/errors.hpp"

namespace gridsoccer {

namespace {

Tensor blank_channels(const GameState& st, int channels) {
  return Tensor({channels, st.height, st.width});
}

}  // namespace

Observation encode_basic(const GameState& state, AgentId agent) {
  const int n = state.players_per_team;
  if (agent.index < 0 || agent.index >= n)
    throw ContractError("encode_basic: agent not in state");
  Observation obs;
  obs.layout = ObsLayout::Basic4;
  obs.data = blank_channels(state, 4);
  const int self_slot = state.slot_of(agent);
  for (int s = 0; s < state.num_agents(); ++s) {
    const GridPos p = state.positions[s];
    int channel;
    if (s == self_slot)
      channel = 0;
    else if (state.team_of_slot(s) == agent.team)
      channel = 1;
    else
      channel = 2;
    obs.data.at3(channel, p.row, p.col) = 1.0;
  }
  const GridPos ball = state.positions[state.ball_holder];
  obs.data.at3(3, ball.row, ball.col) = 1.0;
  return obs;
}

Observation encode_comm(const GameState& state, AgentId agent,
                        const std::vector<int>& last_comms, int comm_symbols) {
  const int n = state.players_per_team;
  if (agent.index < 0 || agent.index >= n)
    throw ContractError("encode_comm: agent not in state");
  if (comm_symbols < 1) throw ContractError("encode_comm: need at least one symbol");
  if (static_cast<int>(last_comms.size()) != n)
    throw ContractError("encode_comm: need one comm entry per teammate");
  Observation obs;
  obs.layout = ObsLayout::Comm;
  obs.comm_symbols = comm_symbols;
  obs.data = blank_channels(state, 3 + comm_symbols);
  const int self_slot = state.slot_of(agent);
  for (int s = 0; s < state.num_agents(); ++s) {
    const GridPos p = state.positions[s];
    if (s == self_slot) {
      obs.data.at3(0, p.row, p.col) = 1.0;
    } else if (state.team_of_slot(s) != agent.team) {
      obs.data.at3(1, p.row, p.col) = 1.0;
    } else {
      const int sym = last_comms[state.agent_of(s).index];
      if (sym < 0 || sym >= comm_symbols)
        throw ContractError("encode_comm: comm symbol out of range");
      obs.data.at3(3 + sym, p.row, p.col) = 1.0;
    }
  }
  const GridPos ball = state.positions[state.ball_holder];
  obs.data.at3(2, ball.row, ball.col) = 1.0;
  return obs;
}

Observation encode_critic(const GameState& state, Team team) {
  const int n = state.players_per_team;
  Observation obs;
  obs.layout = ObsLayout::CriticFull;
  obs.data = blank_channels(state, n + 2);
  for (int s = 0; s < state.num_agents(); ++s) {
    const GridPos p = state.positions[s];
    if (state.team_of_slot(s) == team)
      obs.data.at3(state.agent_of(s).index, p.row, p.col) = 1.0;
    else
      obs.data.at3(n, p.row, p.col) = 1.0;
  }
  const GridPos ball = state.positions[state.ball_holder];
  obs.data.at3(n + 1, ball.row, ball.col) = 1.0;
  return obs;
}

int basic_head_size(int players_per_team) { return action_count(players_per_team); }

int joint_head_size(int players_per_team, int comm_symbols) {
  return action_count(players_per_team) * comm_symbols;
}

int action_flat_index(Action a, int players_per_team) {
  if (a.code < 0 || a.code >= action_count(players_per_team))
    throw ContractError("action_flat_index: code out of range");
  return a.code;
}

Action action_from_flat(int flat, int players_per_team) {
  if (flat < 0 || flat >= action_count(players_per_team))
    throw ContractError("action_from_flat: index out of range");
  return Action{flat};
}

int joint_flat_index(const JointCommAction& a, int comm_symbols) {
  if (a.comm < 0 || a.comm >= comm_symbols)
    throw ContractError("joint_flat_index: comm symbol out of range");
  return a.base.code * comm_symbols + a.comm;
}

JointCommAction joint_from_flat(int flat, int players_per_team, int comm_symbols) {
  if (flat < 0 || flat >= joint_head_size(players_per_team, comm_symbols))
    throw ContractError("joint_from_flat: index out of range");
  return JointCommAction{Action{flat / comm_symbols}, flat % comm_symbols};
}

}  // namespace gridsoccer
