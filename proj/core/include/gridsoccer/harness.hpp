#pragma once

#include <deque>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gridsoccer/config.hpp"
#include "gridsoccer/trainer.hpp"

namespace gridsoccer {

/// Ring of the last K goal outcomes (which team scored).
struct GoalWindow {
  size_t capacity = 200;
  std::deque<Team> outcomes;

  void record(Team scorer);
  /// Absent until the first goal; otherwise goals-for / current fill.
  std::optional<double> ratio_for(Team team) const;
};

struct RunLogRow {
  int64_t timestep = 0;
  int64_t goals_for = 0;
  int64_t goals_against = 0;
  std::optional<double> goal_ratio;
  double mean_reward = 0.0;
  double epsilon = 0.0;
  double loss_mean = 0.0;
  bool operator==(const RunLogRow&) const = default;
};

struct RunLog {
  std::vector<RunLogRow> rows;
  bool operator==(const RunLog&) const = default;
};

std::string metrics_header();
void export_metrics(const RunLog& log, const std::string& path);
RunLog import_metrics(const std::string& path);

// Line-delimited JSON trace: one header record, then one record per
// timestep with positions, ball holder, actions, events, rewards and score.
class TraceWriter {
public:
  TraceWriter(const std::string& path, const GameState& initial, bool append);
  void record(const GameState& prev, const std::vector<Action>& actions,
              const StepOutcome& outcome);

private:
  std::unique_ptr<std::ofstream> os_;
};

struct TraceFrame {
  int64_t timestep = 0;
  int steps_since_reset = 0;
  std::vector<GridPos> positions;
  int ball_holder = 0;
  std::array<int, 2> score = {0, 0};
  std::vector<int> actions;
  std::vector<std::vector<std::string>> events;
  std::vector<double> rewards;
  std::optional<Team> goal;
  bool turnover = false;
};

struct TraceFile {
  int height = 0, width = 0, players_per_team = 0;
  int goal_row_lo = 0, goal_row_hi = 0, step_cap = 0;
  std::vector<TraceFrame> frames;
};

TraceFile read_trace(const std::string& path);
/// Rebuilds a renderable state from one frame.
GameState frame_state(const TraceFile& trace, const TraceFrame& frame);

// One training run: the learner plays Left against the configured opponent.
// Every piece of mutable state (env, trainer, opponent, window, interval
// accumulators, RNG streams) is checkpointed, so a resumed session replays
// the exact trajectory of an uninterrupted one.
class TrainSession {
public:
  static TrainSession fresh(const TrainConfig& config);
  static TrainSession from_checkpoint(const std::string& path);

  /// Advance up to k environment steps; stops at total_timesteps.
  int64_t run_steps(int64_t k);
  bool finished() const { return timestep_ >= config_.total_timesteps; }
  int64_t timestep() const { return timestep_; }
  const RunLog& log() const { return log_; }
  const TrainConfig& config() const { return config_; }
  const GameState& state() const { return state_; }
  Trainer& trainer() { return *trainer_; }
  std::optional<double> goal_ratio() const;

  void save_checkpoint(const std::string& path) const;

private:
  TrainSession() = default;
  void step_once();
  void append_log_row();

  TrainConfig config_;
  GameState state_;
  std::unique_ptr<Trainer> trainer_;
  std::unique_ptr<TeamPolicy> opponent_;
  GoalWindow window_;
  RunLog log_;
  int64_t timestep_ = 0;
  int64_t goals_for_ = 0, goals_against_ = 0;
  double interval_reward_sum_ = 0.0;
  int64_t interval_reward_count_ = 0;
  double interval_loss_sum_ = 0.0;
  int64_t interval_loss_count_ = 0;
  std::unique_ptr<TraceWriter> trace_;
};

struct TrainResult {
  std::string checkpoint_path;
  RunLog log;
};

// Runs the configured protocol to completion, writing metrics.csv, periodic
// checkpoints and final.ckpt under out_dir. A TrainingError still writes
// diagnostic.ckpt before propagating.
TrainResult train(const TrainConfig& config, const std::string& out_dir);
TrainResult resume_train(const std::string& checkpoint_path,
                         const std::string& out_dir);

struct MatchReport {
  int64_t goals_a = 0, goals_b = 0;
  double goal_ratio_a = 0.0;
  double mean_episode_length = 0.0;
  int64_t steals_a = 0, steals_b = 0;
  int64_t turnovers_a = 0, turnovers_b = 0;
  int64_t steps = 0;
};

/// "handcoded", "random", or a checkpoint path.
std::unique_ptr<TeamPolicy> make_team_policy(const std::string& spec, Team side,
                                             Rng stream);

MatchReport play_match(TeamPolicy& a, TeamPolicy& b, const EnvConfig& env,
                       int num_goals);

// Frozen-policy evaluation: a plays Left, b plays Right, until num_goals
// total goals. The env comes from `env_override`, else from a checkpoint
// side's stored config, else the 10x18 3v3 default.
MatchReport evaluate(const std::string& a_spec, const std::string& b_spec,
                     int num_goals, uint64_t seed,
                     const std::optional<EnvConfig>& env_override = {});

struct LoadedCheckpoint {
  TrainConfig config;
  std::unique_ptr<Trainer> trainer;
};

LoadedCheckpoint load_trainer_checkpoint(const std::string& path, Team side);
void save_trainer_checkpoint(const std::string& path, const TrainConfig& config,
                             const Trainer& trainer);

struct AdversarialResult {
  RunLog log_a, log_b;
  std::string checkpoint_a, checkpoint_b;
};

// Both pretrained teams keep learning in the same game (a as Left, b as
// Right), each at its own exploration floor. Goal windows and logs are kept
// per team; metrics_a.csv / metrics_b.csv and final checkpoints land in
// out_dir.
AdversarialResult adversarial_train(const TrainConfig& shared,
                                    const std::string& checkpoint_a,
                                    const std::string& checkpoint_b,
                                    bool learn_a, bool learn_b,
                                    const std::string& out_dir);

}  // namespace gridsoccer
