#include "gridsoccer/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gridsoccer/errors.hpp"
#include "gridsoccer/netspecs.hpp"

namespace gridsoccer {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_text(ss.str());
}

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
  KeyValueFile kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key on line " +
                                       std::to_string(lineno));
    if (kv.values_.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    kv.values_[key] = value;
    kv.consumed_[key] = false;
  }
  return kv;
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueFile::get_string(const std::string& key,
                                     const std::string& fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  return it->second;
}

int64_t KeyValueFile::get_int(const std::string& key, int64_t fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  try {
    size_t pos = 0;
    const int64_t v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not an integer: " + it->second);
  }
}

double KeyValueFile::get_double(const std::string& key, double fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
  }
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' is not a boolean: " + v);
}

void KeyValueFile::reject_unknown_keys() const {
  std::string unknown;
  for (const auto& [key, used] : consumed_)
    if (!used) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty())
    throw ConfigError("config: unknown keys: " + unknown);
}

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Concurrent: return "concurrent";
    case Protocol::ParamShare: return "paramshare";
    case Protocol::Coordinated: return "coordinated";
    case Protocol::Coma: return "coma";
    case Protocol::Handcoded: return "handcoded";
    case Protocol::Random: return "random";
  }
  throw ContractError("protocol_name: bad protocol");
}

Protocol protocol_from_name(const std::string& name) {
  if (name == "concurrent") return Protocol::Concurrent;
  if (name == "paramshare") return Protocol::ParamShare;
  if (name == "coordinated") return Protocol::Coordinated;
  if (name == "coma") return Protocol::Coma;
  if (name == "handcoded") return Protocol::Handcoded;
  if (name == "random") return Protocol::Random;
  throw ConfigError("config: unknown protocol '" + name + "'");
}

TrainConfig TrainConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_text(ss.str());
}

TrainConfig TrainConfig::from_text(const std::string& text) {
  KeyValueFile kv = KeyValueFile::parse_text(text);
  TrainConfig c;
  c.env.height = static_cast<int>(kv.get_int("env.height", c.env.height));
  c.env.width = static_cast<int>(kv.get_int("env.width", c.env.width));
  c.env.players_per_team =
      static_cast<int>(kv.get_int("env.players", c.env.players_per_team));
  c.env.goal_row_lo = static_cast<int>(kv.get_int("env.goal_row_lo", -1));
  c.env.goal_row_hi = static_cast<int>(kv.get_int("env.goal_row_hi", -1));
  c.env.step_cap = static_cast<int>(kv.get_int("env.step_cap", c.env.step_cap));
  c.protocol = protocol_from_name(kv.get_string("protocol", "paramshare"));
  c.opponent = kv.get_string("opponent", c.opponent);
  c.seed = static_cast<uint64_t>(kv.get_int("seed", 1));
  c.total_timesteps = kv.get_int("total_timesteps", c.total_timesteps);
  c.log_interval = kv.get_int("log_interval", c.log_interval);
  c.checkpoint_interval = kv.get_int("checkpoint_interval", c.checkpoint_interval);
  c.lr = kv.get_double("lr", c.lr);
  c.gamma = kv.get_double("gamma", c.gamma);
  c.epsilon.start = kv.get_double("epsilon_start", c.epsilon.start);
  c.epsilon.end = kv.get_double("epsilon_end", c.epsilon.end);
  c.epsilon.decay_steps = kv.get_int("epsilon_decay_steps", c.epsilon.decay_steps);
  c.learning_enabled = kv.get_bool("learning_enabled", c.learning_enabled);
  const std::string net = kv.get_string("net", "auto");
  if (net == "auto") c.net = NetPreset::Auto;
  else if (net == "full") c.net = NetPreset::Full;
  else if (net == "small") c.net = NetPreset::Small;
  else throw ConfigError("config: net must be auto|full|small");
  const std::string enc = kv.get_string("encoder", "auto");
  if (enc == "auto") c.encoder = EncoderKind::Auto;
  else if (enc == "basic") c.encoder = EncoderKind::Basic;
  else if (enc == "comm") c.encoder = EncoderKind::Comm;
  else throw ConfigError("config: encoder must be auto|basic|comm");
  c.comm_symbols = static_cast<int>(kv.get_int("comm_symbols", c.comm_symbols));
  const std::string credit = kv.get_string("credit_mode", "off");
  if (credit == "off") c.credit_mode = CreditMode::Off;
  else if (credit == "ratio") c.credit_mode = CreditMode::Ratio;
  else throw ConfigError("config: credit_mode must be off|ratio");
  c.buffer_capacity = kv.get_int("buffer_capacity", c.buffer_capacity);
  c.minibatch_size = kv.get_int("minibatch_size", c.minibatch_size);
  c.coordinated_update_interval =
      kv.get_int("coordinated_update_interval", c.coordinated_update_interval);
  c.lambda = kv.get_double("lambda", c.lambda);
  c.alpha = kv.get_double("alpha", c.alpha);
  c.trace_path = kv.get_string("trace_path", "");
  kv.reject_unknown_keys();
  c.validate();
  return c;
}

std::string TrainConfig::to_text() const {
  std::ostringstream os;
  os << "env.height = " << env.height << "\n";
  os << "env.width = " << env.width << "\n";
  os << "env.players = " << env.players_per_team << "\n";
  os << "env.goal_row_lo = " << env.goal_row_lo << "\n";
  os << "env.goal_row_hi = " << env.goal_row_hi << "\n";
  os << "env.step_cap = " << env.step_cap << "\n";
  os << "protocol = " << protocol_name(protocol) << "\n";
  os << "opponent = " << opponent << "\n";
  os << "seed = " << seed << "\n";
  os << "total_timesteps = " << total_timesteps << "\n";
  os << "log_interval = " << log_interval << "\n";
  os << "checkpoint_interval = " << checkpoint_interval << "\n";
  os << "lr = " << format_double(lr) << "\n";
  os << "gamma = " << format_double(gamma) << "\n";
  os << "epsilon_start = " << format_double(epsilon.start) << "\n";
  os << "epsilon_end = " << format_double(epsilon.end) << "\n";
  os << "epsilon_decay_steps = " << epsilon.decay_steps << "\n";
  os << "learning_enabled = " << (learning_enabled ? "true" : "false") << "\n";
  os << "net = "
     << (net == NetPreset::Auto ? "auto" : net == NetPreset::Full ? "full" : "small")
     << "\n";
  os << "encoder = "
     << (encoder == EncoderKind::Auto ? "auto"
         : encoder == EncoderKind::Basic ? "basic" : "comm")
     << "\n";
  os << "comm_symbols = " << comm_symbols << "\n";
  os << "credit_mode = " << (credit_mode == CreditMode::Off ? "off" : "ratio")
     << "\n";
  os << "buffer_capacity = " << buffer_capacity << "\n";
  os << "minibatch_size = " << minibatch_size << "\n";
  os << "coordinated_update_interval = " << coordinated_update_interval << "\n";
  os << "lambda = " << format_double(lambda) << "\n";
  os << "alpha = " << format_double(alpha) << "\n";
  if (!trace_path.empty()) os << "trace_path = " << trace_path << "\n";
  return os.str();
}

void TrainConfig::validate() const {
  env.validate();
  if (total_timesteps < 1) throw ConfigError("config: total_timesteps must be positive");
  if (log_interval < 1) throw ConfigError("config: log_interval must be positive");
  if (checkpoint_interval < 0)
    throw ConfigError("config: checkpoint_interval must be >= 0");
  if (lr <= 0.0 || alpha <= 0.0) throw ConfigError("config: learning rates must be positive");
  if (gamma < 0.0 || gamma >= 1.0) throw ConfigError("config: gamma must be in [0,1)");
  if (epsilon.start < 0.0 || epsilon.start > 1.0 || epsilon.end < 0.0 ||
      epsilon.end > 1.0)
    throw ConfigError("config: epsilon must be in [0,1]");
  if (epsilon.decay_steps < 0)
    throw ConfigError("config: epsilon_decay_steps must be >= 0");
  if (comm_symbols < 1) throw ConfigError("config: comm_symbols must be >= 1");
  if (buffer_capacity < 1) throw ConfigError("config: buffer_capacity must be >= 1");
  if (minibatch_size < 1) throw ConfigError("config: minibatch_size must be >= 1");
  if (minibatch_size > buffer_capacity)
    throw ConfigError("config: minibatch_size cannot exceed buffer_capacity");
  if (coordinated_update_interval < 1)
    throw ConfigError("config: coordinated_update_interval must be >= 1");
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("config: lambda must be in [0,1]");
}

bool TrainConfig::net_is_small() const {
  switch (net) {
    case NetPreset::Full: return false;
    case NetPreset::Small: return true;
    case NetPreset::Auto:
      break;
  }
  if (protocol == Protocol::Coma) return !full_coma_fits(env.height, env.width);
  return !full_dqn_fits(env.height, env.width);
}

EncoderKind TrainConfig::resolved_encoder() const {
  if (encoder != EncoderKind::Auto) return encoder;
  return protocol == Protocol::Coordinated ? EncoderKind::Comm : EncoderKind::Basic;
}

}  // namespace gridsoccer
