#include "gridsoccer/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "gridsoccer/netspecs.hpp"

namespace gridsoccer {

namespace {

double rel_error(double fd, double analytic) {
  return std::abs(fd - analytic) /
         std::max({std::abs(fd), std::abs(analytic), 1e-2});
}

struct Probe {
  NetworkParams params;
  Tensor input;
  Tensor side;
  Tensor weights_out;  // fixed linear functional over the output
  bool has_side = false;

  double loss() const {
    const Tensor out =
        forward(params, input, has_side ? &side : nullptr, nullptr);
    double l = 0.0;
    for (size_t k = 0; k < out.size(); ++k) l += weights_out[k] * out[k];
    return l;
  }
};

Probe make_probe(const NetworkSpec& spec, Rng& rng) {
  Probe p;
  p.params = init_params(spec, rng);
  p.input = Tensor(spec.input_shape);
  for (size_t k = 0; k < p.input.size(); ++k) p.input[k] = rng.uniform(-1.0, 1.0);
  const int side_dim = spec.side_dim();
  if (side_dim > 0) {
    p.has_side = true;
    p.side = Tensor({side_dim});
    for (size_t k = 0; k < p.side.size(); ++k) p.side[k] = rng.uniform(-1.0, 1.0);
  }
  p.weights_out = Tensor(spec.output_shape());
  for (size_t k = 0; k < p.weights_out.size(); ++k)
    p.weights_out[k] = rng.uniform(-1.0, 1.0);
  return p;
}

double fd_one_param(Probe& probe, Tensor& t, size_t idx) {
  const double saved = t[idx];
  t[idx] = saved + kGradCheckStep;
  const double up = probe.loss();
  t[idx] = saved - kGradCheckStep;
  const double down = probe.loss();
  t[idx] = saved;
  return (up - down) / (2.0 * kGradCheckStep);
}

}  // namespace

GradCheckReport check_network_gradients(const NetworkSpec& spec, uint64_t seed,
                                        int max_params_per_tensor,
                                        const std::string& name) {
  Rng rng(seed);
  Probe probe = make_probe(spec, rng);

  ForwardCache cache;
  forward(probe.params, probe.input, probe.has_side ? &probe.side : nullptr,
          &cache);
  Gradients grads = zero_gradients(probe.params);
  backward(probe.params, cache, probe.weights_out, &grads);

  GradCheckReport report;
  report.name = name.empty() ? spec.describe() : name;

  auto check_tensor = [&](Tensor& t, const Tensor& g) {
    if (!t.size()) return;
    const size_t total = t.size();
    if (max_params_per_tensor <= 0 ||
        total <= static_cast<size_t>(max_params_per_tensor)) {
      for (size_t k = 0; k < total; ++k) {
        const double fd = fd_one_param(probe, t, k);
        report.max_rel_error = std::max(report.max_rel_error, rel_error(fd, g[k]));
        ++report.params_checked;
      }
    } else {
      for (int s = 0; s < max_params_per_tensor; ++s) {
        const size_t k = rng.uniform_int(total);
        const double fd = fd_one_param(probe, t, k);
        report.max_rel_error = std::max(report.max_rel_error, rel_error(fd, g[k]));
        ++report.params_checked;
      }
    }
  };

  for (size_t i = 0; i < probe.params.weights.size(); ++i) {
    check_tensor(probe.params.weights[i], grads.weights[i]);
    check_tensor(probe.params.biases[i], grads.biases[i]);
  }
  return report;
}

std::vector<GradCheckReport> gradcheck_suite(uint64_t seed) {
  std::vector<GradCheckReport> reports;
  auto run = [&](const NetworkSpec& spec, const std::string& name, int sample) {
    reports.push_back(
        check_network_gradients(spec, seed ^ fnv1a64(name), sample, name));
  };

  // Single layer kinds and short chains, all parameters checked.
  for (int v = 0; v < 4; ++v) {
    const std::string tag = "#" + std::to_string(v);
    NetworkSpec dense{{5 + v}, {LayerSpec::dense(3 + v)}};
    run(dense, "dense" + tag, 0);
    NetworkSpec dense_relu{{6}, {LayerSpec::dense(4 + v), LayerSpec::relu()}};
    run(dense_relu, "dense-relu" + tag, 0);
    NetworkSpec dense_softmax{{4 + v},
                              {LayerSpec::dense(5), LayerSpec::softmax()}};
    run(dense_softmax, "dense-softmax" + tag, 0);
    NetworkSpec conv{{1 + v, 5, 6}, {LayerSpec::conv(2 + v, 3, 3, 1)}};
    run(conv, "conv3x3" + tag, 0);
    NetworkSpec conv_stride{{2, 6 + v, 7},
                            {LayerSpec::conv(3, 2, 2, 2), LayerSpec::relu()}};
    run(conv_stride, "conv2x2s2-relu" + tag, 0);
  }
  NetworkSpec conv1x1{{3, 4, 4}, {LayerSpec::conv(2, 1, 1, 1)}};
  run(conv1x1, "conv1x1", 0);
  NetworkSpec conv_rect{{2, 6, 8}, {LayerSpec::conv(4, 2, 3, 1)}};
  run(conv_rect, "conv2x3", 0);
  NetworkSpec flat_side{{2, 4, 5},
                        {LayerSpec::conv(3, 3, 3, 1), LayerSpec::relu(),
                         LayerSpec::flatten(), LayerSpec::concat_side(7),
                         LayerSpec::dense(6), LayerSpec::relu(),
                         LayerSpec::dense(4)}};
  run(flat_side, "conv-flat-side-mlp", 0);
  NetworkSpec deep_softmax{{3, 6, 6},
                           {LayerSpec::conv(4, 3, 3, 1), LayerSpec::relu(),
                            LayerSpec::flatten(), LayerSpec::dense(10),
                            LayerSpec::relu(), LayerSpec::dense(5),
                            LayerSpec::softmax()}};
  run(deep_softmax, "conv-mlp-softmax", 0);

  // The three full-size network specs, sampled parameters.
  run(dqn_net_spec(4, 10, 18, 11, false), "dqn-10x18", 48);
  run(policy_net_spec(3, 10, 18, false), "policy-10x18", 48);
  run(critic_net_spec(3, 10, 18, false), "critic-10x18", 48);
  return reports;
}

bool gradcheck_passed(const std::vector<GradCheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) {
    return r.max_rel_error < kGradCheckTolerance;
  });
}

}  // namespace gridsoccer
