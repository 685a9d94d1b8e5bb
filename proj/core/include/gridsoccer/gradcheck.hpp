#pragma once

#include <string>
#include <vector>

#include "gridsoccer/nn.hpp"

namespace gridsoccer {

struct GradCheckReport {
  std::string name;
  double max_rel_error = 0.0;
  int params_checked = 0;
};

inline constexpr double kGradCheckTolerance = 1e-4;
inline constexpr double kGradCheckStep = 1e-5;

// Central finite differences of a fixed random linear functional of the
// output against the analytic backward pass. Checks every parameter when
// max_params_per_tensor <= 0, otherwise a deterministic random sample per
// tensor. Relative error uses max(|fd|, |analytic|, 1e-2) as denominator so
// near-zero gradients are compared absolutely at 1e-6 resolution.
GradCheckReport check_network_gradients(const NetworkSpec& spec, uint64_t seed,
                                        int max_params_per_tensor,
                                        const std::string& name);

// The full suite behind the `gradcheck` CLI subcommand: every layer kind in
// >= 20 random small configurations (all parameters), then the three
// full-size network specs (sampled parameters).
std::vector<GradCheckReport> gradcheck_suite(uint64_t seed);

bool gradcheck_passed(const std::vector<GradCheckReport>& reports);

}  // namespace gridsoccer
