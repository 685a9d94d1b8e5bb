#pragma once

#include <map>
#include <string>

#include "gridsoccer/dqn.hpp"
#include "gridsoccer/env.hpp"

namespace gridsoccer {

/// `key = value` text file with '#' comments; unknown keys are rejected so
/// typos surface instead of silently using defaults.
class KeyValueFile {
public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_text(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback);
  int64_t get_int(const std::string& key, int64_t fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);

  /// ConfigError listing any keys never read by a getter.
  void reject_unknown_keys() const;

private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> consumed_;
};

enum class Protocol { Concurrent, ParamShare, Coordinated, Coma, Handcoded, Random };
enum class NetPreset { Auto, Full, Small };
enum class EncoderKind { Auto, Basic, Comm };

std::string protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

struct TrainConfig {
  EnvConfig env;
  Protocol protocol = Protocol::ParamShare;
  std::string opponent = "handcoded";  // handcoded | random | <checkpoint path>
  uint64_t seed = 1;
  int64_t total_timesteps = 500000;
  int64_t log_interval = 1000;
  int64_t checkpoint_interval = 0;  // 0: only the final checkpoint
  double lr = 0.001;
  double gamma = 0.99;
  EpsilonSchedule epsilon;
  bool learning_enabled = true;
  NetPreset net = NetPreset::Auto;
  EncoderKind encoder = EncoderKind::Auto;
  int comm_symbols = 4;
  CreditMode credit_mode = CreditMode::Off;
  int64_t buffer_capacity = 50000;
  int64_t minibatch_size = 1000;
  int64_t coordinated_update_interval = 100;
  double lambda = 0.8;  // critic lambda-returns
  double alpha = 0.001; // policy learning rate
  std::string trace_path;  // when set, JSONL trace of the run

  static TrainConfig from_file(const std::string& path);
  static TrainConfig from_text(const std::string& text);
  std::string to_text() const;
  void validate() const;

  bool net_is_small() const;          // resolves Auto against the grid
  EncoderKind resolved_encoder() const;
};

}  // namespace gridsoccer
