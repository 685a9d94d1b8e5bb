#pragma once

#include <iosfwd>
#include <memory>
#include <optional>

#include "gridsoccer/coma.hpp"
#include "gridsoccer/config.hpp"
#include "gridsoccer/policies.hpp"

namespace gridsoccer {

// One team's learner. Trainers always reason in a self-as-Left frame: a
// Right-side trainer mirrors the state before encoding and mirrors chosen
// move codes back, so checkpoints transfer across sides.
class Trainer {
public:
  virtual ~Trainer() = default;

  Team side() const { return side_; }

  /// Select this team's actions (absolute env codes) for the current state.
  virtual std::vector<Action> act(const GameState& state, double epsilon) = 0;

  /// Learn from the step the last act() fed into; returns a loss when an
  /// update ran.
  virtual std::optional<double> observe(const StepOutcome& outcome) = 0;

  /// Hard-copy theta_minus := theta; fired on goal steps.
  virtual void sync_target() {}

  /// Play was reset (goal or step cap): clear per-episode state.
  virtual void on_episode_reset() {}

  /// Toggle learning at runtime (adversarial play with one side frozen).
  virtual void set_learning(bool) {}

  virtual std::unique_ptr<TeamPolicy> make_eval_policy(Rng stream) const = 0;

  virtual void save(std::ostream& os) const = 0;
  virtual void load(std::istream& is) = 0;

protected:
  explicit Trainer(Team side) : side_(side) {}
  Team side_;
};

/// Fresh trainer for the configured protocol (Handcoded and Random become
/// non-learning scripted trainers).
std::unique_ptr<Trainer> make_trainer(const TrainConfig& config, Team side,
                                      uint64_t root_seed);

}  // namespace gridsoccer
