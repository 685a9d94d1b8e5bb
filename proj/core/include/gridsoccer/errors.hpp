#pragma once

#include <stdexcept>
#include <string>

namespace gridsoccer {

/// Invalid configuration (bad grid dimensions, malformed config file, ...).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An API precondition was violated by the caller (shape mismatch, missing
/// action, empty trace, ...).
class ContractError : public std::logic_error {
public:
  explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

/// Checkpoint file is unreadable or does not match the expected network spec.
class CheckpointError : public std::runtime_error {
public:
  explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Training produced a non-finite loss or gradient.
class TrainingError : public std::runtime_error {
public:
  explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gridsoccer
