// Command-line front end: train / eval / adversarial / gradcheck / replay.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "gridsoccer/errors.hpp"
#include "gridsoccer/gradcheck.hpp"
#include "gridsoccer/harness.hpp"

namespace gs = gridsoccer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

int cmd_train(const std::string& config_path, const std::string& out_dir,
              const std::string& resume, bool print_defaults,
              std::optional<uint64_t> seed) {
  if (print_defaults) {
    std::cout << gs::TrainConfig{}.to_text();
    return kExitOk;
  }
  gs::TrainResult result;
  if (!resume.empty()) {
    result = gs::resume_train(resume, out_dir);
  } else {
    if (config_path.empty()) {
      std::cerr << "train: --config is required (or --resume / --print-defaults)\n";
      return kExitUsage;
    }
    gs::TrainConfig config = gs::TrainConfig::from_file(config_path);
    if (seed) config.seed = *seed;
    result = gs::train(config, out_dir);
  }
  const auto& rows = result.log.rows;
  if (!rows.empty() && rows.back().goal_ratio)
    std::printf("final goal_ratio %.4f after %lld steps\n",
                *rows.back().goal_ratio,
                static_cast<long long>(rows.back().timestep));
  std::printf("checkpoint: %s\n", result.checkpoint_path.c_str());
  return kExitOk;
}

int cmd_eval(const std::string& a, const std::string& b, int goals,
             uint64_t seed, const std::string& config_path) {
  std::optional<gs::EnvConfig> env;
  if (!config_path.empty()) env = gs::TrainConfig::from_file(config_path).env;
  const gs::MatchReport r = gs::evaluate(a, b, goals, seed, env);
  std::printf("goal_ratio %.4f (%lld-%lld over %lld steps)\n", r.goal_ratio_a,
              static_cast<long long>(r.goals_a),
              static_cast<long long>(r.goals_b),
              static_cast<long long>(r.steps));
  std::printf("mean_episode_length %.2f\n", r.mean_episode_length);
  std::printf("steals %lld-%lld turnovers %lld-%lld\n",
              static_cast<long long>(r.steals_a),
              static_cast<long long>(r.steals_b),
              static_cast<long long>(r.turnovers_a),
              static_cast<long long>(r.turnovers_b));
  return kExitOk;
}

int cmd_adversarial(const std::string& a, const std::string& b,
                    const std::string& config_path, const std::string& out_dir,
                    bool freeze_a, bool freeze_b, std::optional<uint64_t> seed) {
  gs::TrainConfig config = gs::TrainConfig::from_file(config_path);
  if (seed) config.seed = *seed;
  const gs::AdversarialResult r =
      gs::adversarial_train(config, a, b, !freeze_a, !freeze_b, out_dir);
  auto ratio = [](const gs::RunLog& log) {
    return log.rows.empty() || !log.rows.back().goal_ratio
               ? 0.0
               : *log.rows.back().goal_ratio;
  };
  std::printf("a goal_ratio %.4f  b goal_ratio %.4f\n", ratio(r.log_a),
              ratio(r.log_b));
  std::printf("checkpoints: %s %s\n", r.checkpoint_a.c_str(),
              r.checkpoint_b.c_str());
  return kExitOk;
}

int cmd_gradcheck(uint64_t seed) {
  const auto reports = gs::gradcheck_suite(seed);
  for (const auto& r : reports)
    std::printf("%-24s max_rel_err %.3e over %d params  [%s]\n",
                r.name.c_str(), r.max_rel_error, r.params_checked,
                r.max_rel_error < gs::kGradCheckTolerance ? "ok" : "FAIL");
  if (!gs::gradcheck_passed(reports)) {
    std::fprintf(stderr, "gradcheck: FAILED (tolerance %g)\n",
                 gs::kGradCheckTolerance);
    return kExitRuntime;
  }
  std::printf("gradcheck: all %zu checks below %g\n", reports.size(),
              gs::kGradCheckTolerance);
  return kExitOk;
}

int cmd_replay(const std::string& trace_path, int delay_ms, int64_t limit) {
  const gs::TraceFile trace = gs::read_trace(trace_path);
  int64_t shown = 0;
  for (const auto& frame : trace.frames) {
    if (limit > 0 && shown >= limit) break;
    const gs::GameState state = gs::frame_state(trace, frame);
    std::printf("t=%lld score %d-%d%s\n",
                static_cast<long long>(frame.timestep), frame.score[0],
                frame.score[1],
                frame.goal ? (*frame.goal == gs::Team::Left ? "  GOAL left"
                                                            : "  GOAL right")
                           : "");
    std::fputs(gs::render_ascii(state).c_str(), stdout);
    ++shown;
    if (delay_ms > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
  }
  std::printf("%lld frames\n", static_cast<long long>(shown));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grid-soccer multi-agent RL trainer"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "runs/out", resume, a_spec, b_spec,
              trace_path;
  bool print_defaults = false, freeze_a = false, freeze_b = false;
  int goals = 200, delay_ms = 0;
  int64_t limit = 0;
  uint64_t seed_value = 0;
  bool seed_given = false;

  auto* train = app.add_subcommand("train", "train a protocol from a config file");
  train->add_option("--config", config_path, "config file");
  train->add_option("--out", out_dir, "output directory");
  train->add_option("--resume", resume, "resume from a session checkpoint");
  train->add_flag("--print-defaults", print_defaults, "print default config");
  train->add_option("--seed", seed_value, "override config seed")
      ->each([&](const std::string&) { seed_given = true; });

  auto* eval = app.add_subcommand("eval", "play two frozen policies");
  eval->add_option("--a", a_spec, "left policy: ckpt|handcoded|random")
      ->required();
  eval->add_option("--b", b_spec, "right policy: ckpt|handcoded|random")
      ->required();
  eval->add_option("--goals", goals, "total goals to play");
  eval->add_option("--seed", seed_value, "match seed")
      ->each([&](const std::string&) { seed_given = true; });
  eval->add_option("--config", config_path, "env config override");

  auto* adv = app.add_subcommand("adversarial", "two checkpoints keep training");
  adv->add_option("--a", a_spec, "left checkpoint")->required();
  adv->add_option("--b", b_spec, "right checkpoint")->required();
  adv->add_option("--config", config_path, "shared run config")->required();
  adv->add_option("--out", out_dir, "output directory");
  adv->add_flag("--freeze-a", freeze_a, "disable learning for a");
  adv->add_flag("--freeze-b", freeze_b, "disable learning for b");
  adv->add_option("--seed", seed_value, "override config seed")
      ->each([&](const std::string&) { seed_given = true; });

  auto* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference gradient suite");
  gradcheck->add_option("--seed", seed_value, "suite seed")
      ->each([&](const std::string&) { seed_given = true; });

  auto* replay = app.add_subcommand("replay", "ASCII playback of a trace");
  replay->add_option("--trace", trace_path, "trace file")->required();
  replay->add_option("--delay", delay_ms, "per-frame delay in ms");
  replay->add_option("--limit", limit, "max frames to show");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  const std::optional<uint64_t> seed_override =
      seed_given ? std::optional<uint64_t>(seed_value) : std::nullopt;
  try {
    if (train->parsed())
      return cmd_train(config_path, out_dir, resume, print_defaults,
                       seed_override);
    if (eval->parsed())
      return cmd_eval(a_spec, b_spec, goals, seed_given ? seed_value : 1,
                      config_path);
    if (adv->parsed())
      return cmd_adversarial(a_spec, b_spec, config_path, out_dir, freeze_a,
                             freeze_b, seed_override);
    if (gradcheck->parsed()) return cmd_gradcheck(seed_given ? seed_value : 1);
    if (replay->parsed()) return cmd_replay(trace_path, delay_ms, limit);
  } catch (const gs::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
