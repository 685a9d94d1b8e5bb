#include "gridsoccer/harness.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gridsoccer/checkpoint.hpp"
#include "gridsoccer/errors.hpp"

namespace gridsoccer {

using nlohmann::json;

void GoalWindow::record(Team scorer) {
  outcomes.push_back(scorer);
  if (outcomes.size() > capacity) outcomes.pop_front();
}

std::optional<double> GoalWindow::ratio_for(Team team) const {
  if (outcomes.empty()) return {};
  size_t wins = 0;
  for (Team t : outcomes)
    if (t == team) ++wins;
  return static_cast<double>(wins) / static_cast<double>(outcomes.size());
}

std::string metrics_header() {
  return "timestep,goals_for,goals_against,goal_ratio,mean_reward,epsilon,loss_mean";
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void export_metrics(const RunLog& log, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("metrics: cannot open " + path + " for writing");
  os << metrics_header() << "\n";
  for (const RunLogRow& r : log.rows) {
    os << r.timestep << ',' << r.goals_for << ',' << r.goals_against << ',';
    if (r.goal_ratio) os << format_double(*r.goal_ratio);
    os << ',' << format_double(r.mean_reward) << ',' << format_double(r.epsilon)
       << ',' << format_double(r.loss_mean) << "\n";
  }
  if (!os) throw ConfigError("metrics: write failed for " + path);
}

RunLog import_metrics(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("metrics: cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != metrics_header())
    throw ConfigError("metrics: bad header in " + path);
  RunLog log;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != 7)
      throw ConfigError("metrics: malformed row in " + path);
    RunLogRow r;
    r.timestep = std::stoll(fields[0]);
    r.goals_for = std::stoll(fields[1]);
    r.goals_against = std::stoll(fields[2]);
    if (!fields[3].empty()) r.goal_ratio = std::stod(fields[3]);
    r.mean_reward = std::stod(fields[4]);
    r.epsilon = std::stod(fields[5]);
    r.loss_mean = std::stod(fields[6]);
    log.rows.push_back(r);
  }
  return log;
}

TraceWriter::TraceWriter(const std::string& path, const GameState& initial,
                         bool append)
    : os_(std::make_unique<std::ofstream>(
          path, append ? std::ios::app : std::ios::out)) {
  if (!*os_) throw ConfigError("trace: cannot open " + path + " for writing");
  if (!append) {
    json header = {
        {"type", "header"},
        {"height", initial.height},
        {"width", initial.width},
        {"players", initial.players_per_team},
        {"goal_row_lo", initial.goal_row_lo},
        {"goal_row_hi", initial.goal_row_hi},
        {"step_cap", initial.step_cap},
    };
    *os_ << header.dump() << "\n";
  }
}

void TraceWriter::record(const GameState& prev, const std::vector<Action>& actions,
                         const StepOutcome& outcome) {
  json positions = json::array();
  for (const GridPos& p : prev.positions) positions.push_back({p.row, p.col});
  json acts = json::array();
  for (const Action& a : actions) acts.push_back(a.code);
  json events = json::array();
  for (const auto& agent_events : outcome.events) {
    json names = json::array();
    for (RewardEvent e : agent_events) names.push_back(reward_event_name(e));
    events.push_back(names);
  }
  json frame = {
      {"t", prev.timestep},
      {"since_reset", prev.steps_since_reset},
      {"positions", positions},
      {"ball", prev.ball_holder},
      {"score", {prev.score[0], prev.score[1]}},
      {"actions", acts},
      {"events", events},
      {"rewards", outcome.rewards},
      {"turnover", outcome.turnover},
  };
  if (outcome.goal_scored)
    frame["goal"] = *outcome.goal_scored == Team::Left ? "left" : "right";
  else
    frame["goal"] = nullptr;
  *os_ << frame.dump() << "\n";
}

TraceFile read_trace(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("trace: cannot open " + path);
  TraceFile tf;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j.value("type", "") == "header") {
      tf.height = j.at("height");
      tf.width = j.at("width");
      tf.players_per_team = j.at("players");
      tf.goal_row_lo = j.at("goal_row_lo");
      tf.goal_row_hi = j.at("goal_row_hi");
      tf.step_cap = j.at("step_cap");
      have_header = true;
      continue;
    }
    TraceFrame f;
    f.timestep = j.at("t");
    f.steps_since_reset = j.at("since_reset");
    for (const auto& p : j.at("positions"))
      f.positions.push_back(GridPos{p[0], p[1]});
    f.ball_holder = j.at("ball");
    f.score = {j.at("score")[0], j.at("score")[1]};
    for (const auto& a : j.at("actions")) f.actions.push_back(a);
    for (const auto& agent_events : j.at("events"))
      f.events.push_back(agent_events.get<std::vector<std::string>>());
    f.rewards = j.at("rewards").get<std::vector<double>>();
    if (!j.at("goal").is_null())
      f.goal = j.at("goal") == "left" ? Team::Left : Team::Right;
    f.turnover = j.at("turnover");
    tf.frames.push_back(std::move(f));
  }
  if (!have_header) throw ConfigError("trace: missing header record in " + path);
  return tf;
}

GameState frame_state(const TraceFile& trace, const TraceFrame& frame) {
  GameState s = make_state(trace.height, trace.width, trace.players_per_team,
                           frame.positions, frame.ball_holder,
                           trace.goal_row_lo, trace.goal_row_hi, trace.step_cap);
  s.score = frame.score;
  s.timestep = frame.timestep;
  s.steps_since_reset = frame.steps_since_reset;
  return s;
}

namespace {

constexpr char kCheckpointMagic[4] = {'G', 'S', 'C', 'K'};
constexpr uint32_t kCheckpointVersion = 1;

void write_game_state(std::ostream& os, const GameState& s) {
  io::write_u32(os, static_cast<uint32_t>(s.height));
  io::write_u32(os, static_cast<uint32_t>(s.width));
  io::write_u32(os, static_cast<uint32_t>(s.players_per_team));
  io::write_u32(os, static_cast<uint32_t>(s.goal_row_lo));
  io::write_u32(os, static_cast<uint32_t>(s.goal_row_hi));
  io::write_u32(os, static_cast<uint32_t>(s.step_cap));
  for (const GridPos& p : s.positions) {
    io::write_u32(os, static_cast<uint32_t>(p.row));
    io::write_u32(os, static_cast<uint32_t>(p.col));
  }
  io::write_u32(os, static_cast<uint32_t>(s.ball_holder));
  io::write_u32(os, static_cast<uint32_t>(s.score[0]));
  io::write_u32(os, static_cast<uint32_t>(s.score[1]));
  io::write_i64(os, s.timestep);
  io::write_u32(os, static_cast<uint32_t>(s.steps_since_reset));
  io::write_u64(os, s.rng_state);
}

GameState read_game_state(std::istream& is) {
  GameState s;
  s.height = static_cast<int>(io::read_u32(is));
  s.width = static_cast<int>(io::read_u32(is));
  s.players_per_team = static_cast<int>(io::read_u32(is));
  s.goal_row_lo = static_cast<int>(io::read_u32(is));
  s.goal_row_hi = static_cast<int>(io::read_u32(is));
  s.step_cap = static_cast<int>(io::read_u32(is));
  s.positions.resize(2 * s.players_per_team);
  for (GridPos& p : s.positions) {
    p.row = static_cast<int>(io::read_u32(is));
    p.col = static_cast<int>(io::read_u32(is));
  }
  s.ball_holder = static_cast<int>(io::read_u32(is));
  s.score[0] = static_cast<int>(io::read_u32(is));
  s.score[1] = static_cast<int>(io::read_u32(is));
  s.timestep = io::read_i64(is);
  s.steps_since_reset = static_cast<int>(io::read_u32(is));
  s.rng_state = io::read_u64(is);
  return s;
}

std::unique_ptr<TeamPolicy> make_opponent(const TrainConfig& config) {
  return make_team_policy(config.opponent, Team::Right,
                          Rng::stream(config.seed, "opponent/right"));
}

bool episode_boundary(const StepOutcome& outcome) {
  return outcome.goal_scored.has_value() ||
         outcome.next_state.steps_since_reset == 0;
}

}  // namespace

TrainSession TrainSession::fresh(const TrainConfig& config) {
  config.validate();
  TrainSession s;
  s.config_ = config;
  EnvConfig env = config.env;
  env.seed = config.seed;
  s.state_ = new_game(env);
  s.trainer_ = make_trainer(config, Team::Left, config.seed);
  s.opponent_ = make_opponent(config);
  s.window_.capacity = 200;
  if (!config.trace_path.empty())
    s.trace_ = std::make_unique<TraceWriter>(config.trace_path, s.state_, false);
  return s;
}

void TrainSession::step_once() {
  const double eps = config_.epsilon.value(timestep_);
  const int n = state_.players_per_team;
  const std::vector<Action> left = trainer_->act(state_, eps);
  const std::vector<Action> right = opponent_->act(state_);
  std::vector<Action> actions;
  actions.reserve(2 * n);
  actions.insert(actions.end(), left.begin(), left.end());
  actions.insert(actions.end(), right.begin(), right.end());

  const StepOutcome outcome = step(state_, actions);
  const std::optional<double> loss = trainer_->observe(outcome);

  for (int i = 0; i < n; ++i) interval_reward_sum_ += outcome.rewards[i];
  interval_reward_count_ += n;
  if (loss) {
    interval_loss_sum_ += *loss;
    interval_loss_count_ += 1;
  }

  if (outcome.goal_scored) {
    window_.record(*outcome.goal_scored);
    if (*outcome.goal_scored == Team::Left)
      ++goals_for_;
    else
      ++goals_against_;
    trainer_->sync_target();
  }
  if (episode_boundary(outcome)) {
    trainer_->on_episode_reset();
    opponent_->on_episode_reset();
  }
  if (trace_) trace_->record(state_, actions, outcome);

  state_ = outcome.next_state;
  ++timestep_;
  if (timestep_ % config_.log_interval == 0) append_log_row();
}

void TrainSession::append_log_row() {
  RunLogRow row;
  row.timestep = timestep_;
  row.goals_for = goals_for_;
  row.goals_against = goals_against_;
  row.goal_ratio = window_.ratio_for(Team::Left);
  row.mean_reward = interval_reward_count_
                        ? interval_reward_sum_ / interval_reward_count_
                        : 0.0;
  row.epsilon = config_.epsilon.value(timestep_);
  row.loss_mean =
      interval_loss_count_ ? interval_loss_sum_ / interval_loss_count_ : 0.0;
  log_.rows.push_back(row);
  interval_reward_sum_ = 0.0;
  interval_reward_count_ = 0;
  interval_loss_sum_ = 0.0;
  interval_loss_count_ = 0;
}

int64_t TrainSession::run_steps(int64_t k) {
  int64_t done = 0;
  while (done < k && !finished()) {
    step_once();
    ++done;
  }
  return done;
}

std::optional<double> TrainSession::goal_ratio() const {
  return window_.ratio_for(Team::Left);
}

void TrainSession::save_checkpoint(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("checkpoint: cannot open " + path);
  os.write(kCheckpointMagic, 4);
  io::write_u32(os, kCheckpointVersion);
  io::write_string(os, config_.to_text());
  trainer_->save(os);
  io::write_u32(os, 1);  // has session state
  io::write_i64(os, timestep_);
  write_game_state(os, state_);
  io::write_i64(os, goals_for_);
  io::write_i64(os, goals_against_);
  io::write_u64(os, window_.outcomes.size());
  for (Team t : window_.outcomes) io::write_u32(os, team_index(t));
  io::write_f64(os, interval_reward_sum_);
  io::write_i64(os, interval_reward_count_);
  io::write_f64(os, interval_loss_sum_);
  io::write_i64(os, interval_loss_count_);
  save_team_policy(os, *opponent_);
  if (!os) throw CheckpointError("checkpoint: write failed for " + path);
}

TrainSession TrainSession::from_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw CheckpointError("checkpoint: bad magic in " + path);
  if (io::read_u32(is) != kCheckpointVersion)
    throw CheckpointError("checkpoint: unsupported version");
  TrainSession s;
  s.config_ = TrainConfig::from_text(io::read_string(is));
  s.trainer_ = make_trainer(s.config_, Team::Left, s.config_.seed);
  s.trainer_->load(is);
  if (io::read_u32(is) != 1)
    throw CheckpointError("checkpoint: not a resumable session: " + path);
  s.timestep_ = io::read_i64(is);
  s.state_ = read_game_state(is);
  s.goals_for_ = io::read_i64(is);
  s.goals_against_ = io::read_i64(is);
  s.window_.capacity = 200;
  const uint64_t wn = io::read_u64(is);
  for (uint64_t i = 0; i < wn; ++i)
    s.window_.outcomes.push_back(io::read_u32(is) == 0 ? Team::Left : Team::Right);
  s.interval_reward_sum_ = io::read_f64(is);
  s.interval_reward_count_ = io::read_i64(is);
  s.interval_loss_sum_ = io::read_f64(is);
  s.interval_loss_count_ = io::read_i64(is);
  s.opponent_ = load_team_policy(is, Team::Right);
  if (!s.config_.trace_path.empty())
    s.trace_ =
        std::make_unique<TraceWriter>(s.config_.trace_path, s.state_, true);
  return s;
}

namespace {

TrainResult finish_session(TrainSession& session, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string metrics_path = out_dir + "/metrics.csv";
  const std::string final_path = out_dir + "/final.ckpt";
  try {
    while (!session.finished()) {
      const int64_t chunk =
          session.config().checkpoint_interval > 0
              ? session.config().checkpoint_interval
              : session.config().total_timesteps;
      session.run_steps(chunk);
      if (!session.finished() && session.config().checkpoint_interval > 0) {
        session.save_checkpoint(out_dir + "/step_" +
                                std::to_string(session.timestep()) + ".ckpt");
      }
    }
  } catch (const TrainingError&) {
    session.save_checkpoint(out_dir + "/diagnostic.ckpt");
    export_metrics(session.log(), metrics_path);
    throw;
  }
  session.save_checkpoint(final_path);
  export_metrics(session.log(), metrics_path);
  return TrainResult{final_path, session.log()};
}

}  // namespace

TrainResult train(const TrainConfig& config, const std::string& out_dir) {
  TrainSession session = TrainSession::fresh(config);
  return finish_session(session, out_dir);
}

TrainResult resume_train(const std::string& checkpoint_path,
                         const std::string& out_dir) {
  TrainSession session = TrainSession::from_checkpoint(checkpoint_path);
  return finish_session(session, out_dir);
}

std::unique_ptr<TeamPolicy> make_team_policy(const std::string& spec, Team side,
                                             Rng stream) {
  if (spec == "handcoded") return make_handcoded_policy(side);
  if (spec == "random") return make_random_policy(side, stream);
  LoadedCheckpoint loaded = load_trainer_checkpoint(spec, side);
  return loaded.trainer->make_eval_policy(stream);
}

MatchReport play_match(TeamPolicy& a, TeamPolicy& b, const EnvConfig& env,
                       int num_goals) {
  if (num_goals < 1) throw ContractError("play_match: need num_goals >= 1");
  GameState state = new_game(env);
  const int n = state.players_per_team;
  MatchReport report;
  // Guards against two policies that never score.
  const int64_t max_steps =
      static_cast<int64_t>(num_goals) * 200 * state.step_cap;
  while (report.goals_a + report.goals_b < num_goals &&
         report.steps < max_steps) {
    const std::vector<Action> left = a.act(state);
    const std::vector<Action> right = b.act(state);
    std::vector<Action> actions;
    actions.reserve(2 * n);
    actions.insert(actions.end(), left.begin(), left.end());
    actions.insert(actions.end(), right.begin(), right.end());
    const StepOutcome outcome = step(state, actions);
    ++report.steps;
    for (int s = 0; s < 2 * n; ++s) {
      for (RewardEvent e : outcome.events[s]) {
        if (e == RewardEvent::AgentSteal)
          (s < n ? report.steals_a : report.steals_b) += 1;
        if (e == RewardEvent::AgentTurnover)
          (s < n ? report.turnovers_a : report.turnovers_b) += 1;
      }
    }
    if (outcome.goal_scored) {
      if (*outcome.goal_scored == Team::Left)
        ++report.goals_a;
      else
        ++report.goals_b;
    }
    if (episode_boundary(outcome)) {
      a.on_episode_reset();
      b.on_episode_reset();
    }
    state = outcome.next_state;
  }
  const int64_t total = report.goals_a + report.goals_b;
  report.goal_ratio_a =
      total ? static_cast<double>(report.goals_a) / total : 0.0;
  report.mean_episode_length =
      total ? static_cast<double>(report.steps) / total : 0.0;
  return report;
}

MatchReport evaluate(const std::string& a_spec, const std::string& b_spec,
                     int num_goals, uint64_t seed,
                     const std::optional<EnvConfig>& env_override) {
  std::optional<EnvConfig> env = env_override;
  auto env_from_ckpt = [&](const std::string& spec) {
    if (env || spec == "handcoded" || spec == "random") return;
    env = load_trainer_checkpoint(spec, Team::Left).config.env;
  };
  env_from_ckpt(a_spec);
  env_from_ckpt(b_spec);
  if (!env) env = EnvConfig{};
  env->seed = seed;
  auto a = make_team_policy(a_spec, Team::Left, Rng::stream(seed, "match/a"));
  auto b = make_team_policy(b_spec, Team::Right, Rng::stream(seed, "match/b"));
  return play_match(*a, *b, *env, num_goals);
}

LoadedCheckpoint load_trainer_checkpoint(const std::string& path, Team side) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw CheckpointError("checkpoint: bad magic in " + path);
  if (io::read_u32(is) != kCheckpointVersion)
    throw CheckpointError("checkpoint: unsupported version");
  LoadedCheckpoint loaded;
  loaded.config = TrainConfig::from_text(io::read_string(is));
  loaded.trainer = make_trainer(loaded.config, side, loaded.config.seed);
  loaded.trainer->load(is);
  return loaded;
}

void save_trainer_checkpoint(const std::string& path, const TrainConfig& config,
                             const Trainer& trainer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("checkpoint: cannot open " + path);
  os.write(kCheckpointMagic, 4);
  io::write_u32(os, kCheckpointVersion);
  io::write_string(os, config.to_text());
  trainer.save(os);
  io::write_u32(os, 0);  // no session state
  if (!os) throw CheckpointError("checkpoint: write failed for " + path);
}

AdversarialResult adversarial_train(const TrainConfig& shared,
                                    const std::string& checkpoint_a,
                                    const std::string& checkpoint_b,
                                    bool learn_a, bool learn_b,
                                    const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  LoadedCheckpoint a = load_trainer_checkpoint(checkpoint_a, Team::Left);
  LoadedCheckpoint b = load_trainer_checkpoint(checkpoint_b, Team::Right);
  a.trainer->set_learning(learn_a);
  b.trainer->set_learning(learn_b);

  EnvConfig env = shared.env;
  env.seed = shared.seed;
  GameState state = new_game(env);
  const int n = state.players_per_team;

  GoalWindow window;
  RunLog log_a, log_b;
  int64_t goals_a = 0, goals_b = 0;
  double reward_a = 0.0, reward_b = 0.0;
  double loss_sum_a = 0.0, loss_sum_b = 0.0;
  int64_t loss_count_a = 0, loss_count_b = 0;
  // Pretrained teams play at their exploration floors.
  const double eps_a = a.config.epsilon.end;
  const double eps_b = b.config.epsilon.end;

  for (int64_t t = 0; t < shared.total_timesteps; ++t) {
    const std::vector<Action> left = a.trainer->act(state, eps_a);
    const std::vector<Action> right = b.trainer->act(state, eps_b);
    std::vector<Action> actions;
    actions.reserve(2 * n);
    actions.insert(actions.end(), left.begin(), left.end());
    actions.insert(actions.end(), right.begin(), right.end());
    const StepOutcome outcome = step(state, actions);
    const std::optional<double> la = a.trainer->observe(outcome);
    const std::optional<double> lb = b.trainer->observe(outcome);
    if (la) { loss_sum_a += *la; ++loss_count_a; }
    if (lb) { loss_sum_b += *lb; ++loss_count_b; }
    for (int i = 0; i < n; ++i) {
      reward_a += outcome.rewards[i];
      reward_b += outcome.rewards[n + i];
    }
    if (outcome.goal_scored) {
      window.record(*outcome.goal_scored);
      if (*outcome.goal_scored == Team::Left) ++goals_a; else ++goals_b;
      a.trainer->sync_target();
      b.trainer->sync_target();
    }
    if (episode_boundary(outcome)) {
      a.trainer->on_episode_reset();
      b.trainer->on_episode_reset();
    }
    state = outcome.next_state;
    if ((t + 1) % shared.log_interval == 0) {
      const int64_t steps = shared.log_interval;
      RunLogRow ra{t + 1, goals_a, goals_b, window.ratio_for(Team::Left),
                   reward_a / (steps * n), eps_a,
                   loss_count_a ? loss_sum_a / loss_count_a : 0.0};
      RunLogRow rb{t + 1, goals_b, goals_a, window.ratio_for(Team::Right),
                   reward_b / (steps * n), eps_b,
                   loss_count_b ? loss_sum_b / loss_count_b : 0.0};
      log_a.rows.push_back(ra);
      log_b.rows.push_back(rb);
      reward_a = reward_b = loss_sum_a = loss_sum_b = 0.0;
      loss_count_a = loss_count_b = 0;
    }
  }

  AdversarialResult result;
  result.log_a = std::move(log_a);
  result.log_b = std::move(log_b);
  result.checkpoint_a = out_dir + "/a_final.ckpt";
  result.checkpoint_b = out_dir + "/b_final.ckpt";
  save_trainer_checkpoint(result.checkpoint_a, a.config, *a.trainer);
  save_trainer_checkpoint(result.checkpoint_b, b.config, *b.trainer);
  export_metrics(result.log_a, out_dir + "/metrics_a.csv");
  export_metrics(result.log_b, out_dir + "/metrics_b.csv");
  return result;
}

}  // namespace gridsoccer
