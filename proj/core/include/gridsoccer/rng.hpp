#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gridsoccer {

// Counter-free xoshiro256** generator with splitmix64 seeding.  The standard
// <random> engines are portable but the distributions are not, and the
// metrics files must be byte-identical across platforms, so both the engine
// and the draw algorithms live here with fully pinned-down behavior.
class Rng {
public:
  Rng() : Rng(0) {}
  explicit Rng(uint64_t seed);

  // Derives an independent stream from a root seed and a stream name, so
  // adding a consumer never perturbs the draws seen by existing ones.
  static Rng stream(uint64_t root_seed, std::string_view name);

  uint64_t next_u64();

  /// Uniform in [0, bound). Debiased via rejection; bound must be > 0.
  uint64_t uniform_int(uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  std::array<uint64_t, 4> state() const { return state_; }
  void set_state(const std::array<uint64_t, 4>& s) { state_ = s; }

  bool operator==(const Rng&) const = default;

private:
  std::array<uint64_t, 4> state_;
};

uint64_t splitmix64(uint64_t& x);

/// FNV-1a over a byte string; used for stream derivation and spec fingerprints.
uint64_t fnv1a64(std::string_view bytes);

}  // namespace gridsoccer
