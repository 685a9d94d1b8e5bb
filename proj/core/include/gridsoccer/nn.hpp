#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridsoccer/rng.hpp"
#include "gridsoccer/tensor.hpp"

namespace gridsoccer {

// One layer of a feed-forward network spec. Convolutions are valid (no
// padding) with a square stride; ConcatSide appends a side vector (one-hot
// agent id, one-hot joint action) after Flatten.
struct LayerSpec {
  enum class Kind { Conv, Dense, ReLU, Softmax, Flatten, ConcatSide };
  Kind kind = Kind::ReLU;
  int out_channels = 0;  // Conv
  int kernel_h = 0;      // Conv
  int kernel_w = 0;      // Conv
  int stride = 1;        // Conv
  int out_dim = 0;       // Dense
  int extra_dim = 0;     // ConcatSide

  static LayerSpec conv(int out_channels, int kernel_h, int kernel_w, int stride);
  static LayerSpec dense(int out_dim);
  static LayerSpec relu();
  static LayerSpec softmax();
  static LayerSpec flatten();
  static LayerSpec concat_side(int extra_dim);

  bool operator==(const LayerSpec&) const = default;
};

/// Input shape plus layer chain; the shape algebra is checked on creation.
struct NetworkSpec {
  std::vector<int> input_shape;  // {C, H, W} or {D}
  std::vector<LayerSpec> layers;

  /// Per-layer output shapes; throws ConfigError if the chain does not compose.
  std::vector<std::vector<int>> shape_chain() const;
  std::vector<int> output_shape() const;
  int side_dim() const;  // 0 when no ConcatSide layer
  /// Stable hash of the spec; stored in checkpoints.
  uint64_t fingerprint() const;
  std::string describe() const;

  bool operator==(const NetworkSpec&) const = default;
};

/// Weights and biases for every parametric layer (empty tensors elsewhere).
struct NetworkParams {
  NetworkSpec spec;
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;

  size_t param_count() const;
  bool operator==(const NetworkParams&) const = default;
};

/// He-uniform weights, zero biases.
NetworkParams init_params(const NetworkSpec& spec, Rng& rng);
NetworkParams zero_params(const NetworkSpec& spec);

/// Activations recorded by forward, sufficient for backward.
struct ForwardCache {
  std::vector<Tensor> activations;  // activations[0] = input, [i+1] = layer i out
  Tensor side;
};

Tensor forward(const NetworkParams& params, const Tensor& input,
               const Tensor* side = nullptr, ForwardCache* cache = nullptr);

/// Parameter gradients, same shapes as NetworkParams.
struct Gradients {
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;
};

Gradients zero_gradients(const NetworkParams& params);
void accumulate(Gradients& into, const Gradients& from);
void scale(Gradients& grads, double factor);

/// Exact analytic backward pass; accumulates into `grads` (when given) and
/// returns the input gradient.
Tensor backward(const NetworkParams& params, const ForwardCache& cache,
                const Tensor& output_gradient, Gradients* grads);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool operator==(const AdamConfig&) const = default;
};

struct AdamState {
  AdamConfig config;
  int64_t step = 0;
  std::vector<Tensor> m_weights, v_weights, m_biases, v_biases;
  bool operator==(const AdamState&) const = default;
};

AdamState init_adam(const NetworkParams& params, const AdamConfig& config);

/// Standard Adam update with bias correction. Throws TrainingError on a
/// non-finite gradient.
void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state);

}  // namespace gridsoccer
