#include "gridsoccer/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gridsoccer/errors.hpp"

namespace gridsoccer {

LayerSpec LayerSpec::conv(int out_channels, int kernel_h, int kernel_w, int stride) {
  LayerSpec l;
  l.kind = Kind::Conv;
  l.out_channels = out_channels;
  l.kernel_h = kernel_h;
  l.kernel_w = kernel_w;
  l.stride = stride;
  return l;
}

LayerSpec LayerSpec::dense(int out_dim) {
  LayerSpec l;
  l.kind = Kind::Dense;
  l.out_dim = out_dim;
  return l;
}

LayerSpec LayerSpec::relu() { return LayerSpec{}; }

LayerSpec LayerSpec::softmax() {
  LayerSpec l;
  l.kind = Kind::Softmax;
  return l;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec l;
  l.kind = Kind::Flatten;
  return l;
}

LayerSpec LayerSpec::concat_side(int extra_dim) {
  LayerSpec l;
  l.kind = Kind::ConcatSide;
  l.extra_dim = extra_dim;
  return l;
}

std::vector<std::vector<int>> NetworkSpec::shape_chain() const {
  std::vector<std::vector<int>> chain;
  std::vector<int> shape = input_shape;
  chain.push_back(shape);
  for (const LayerSpec& l : layers) {
    switch (l.kind) {
      case LayerSpec::Kind::Conv: {
        if (shape.size() != 3)
          throw ConfigError("conv layer needs a {C,H,W} input: " + describe());
        const int h = (shape[1] - l.kernel_h) / l.stride + 1;
        const int w = (shape[2] - l.kernel_w) / l.stride + 1;
        if (l.kernel_h > shape[1] || l.kernel_w > shape[2] || h < 1 || w < 1)
          throw ConfigError("conv kernel larger than its input: " + describe());
        shape = {l.out_channels, h, w};
        break;
      }
      case LayerSpec::Kind::Dense: {
        if (shape.size() != 1)
          throw ConfigError("dense layer needs a flat input: " + describe());
        shape = {l.out_dim};
        break;
      }
      case LayerSpec::Kind::ReLU:
      case LayerSpec::Kind::Softmax:
        break;
      case LayerSpec::Kind::Flatten:
        shape = {static_cast<int>(shape_size(shape))};
        break;
      case LayerSpec::Kind::ConcatSide: {
        if (shape.size() != 1)
          throw ConfigError("concat_side must follow flatten: " + describe());
        shape = {shape[0] + l.extra_dim};
        break;
      }
    }
    chain.push_back(shape);
  }
  return chain;
}

std::vector<int> NetworkSpec::output_shape() const { return shape_chain().back(); }

int NetworkSpec::side_dim() const {
  for (const LayerSpec& l : layers)
    if (l.kind == LayerSpec::Kind::ConcatSide) return l.extra_dim;
  return 0;
}

std::string NetworkSpec::describe() const {
  std::string s = "in(";
  for (size_t i = 0; i < input_shape.size(); ++i)
    s += (i ? "x" : "") + std::to_string(input_shape[i]);
  s += ")";
  char buf[64];
  for (const LayerSpec& l : layers) {
    switch (l.kind) {
      case LayerSpec::Kind::Conv:
        std::snprintf(buf, sizeof buf, "-conv%d@%dx%d/s%d", l.out_channels,
                      l.kernel_h, l.kernel_w, l.stride);
        s += buf;
        break;
      case LayerSpec::Kind::Dense:
        s += "-dense" + std::to_string(l.out_dim);
        break;
      case LayerSpec::Kind::ReLU: s += "-relu"; break;
      case LayerSpec::Kind::Softmax: s += "-softmax"; break;
      case LayerSpec::Kind::Flatten: s += "-flat"; break;
      case LayerSpec::Kind::ConcatSide:
        s += "-side" + std::to_string(l.extra_dim);
        break;
    }
  }
  return s;
}

uint64_t NetworkSpec::fingerprint() const { return fnv1a64(describe()); }

namespace {

struct ParamShapes {
  std::vector<int> weight;
  std::vector<int> bias;
};

// Weight/bias shapes for layer i given its input shape, or empty vectors for
// parameter-free layers.
ParamShapes param_shapes(const LayerSpec& l, const std::vector<int>& in_shape) {
  switch (l.kind) {
    case LayerSpec::Kind::Conv:
      return {{l.out_channels, in_shape[0], l.kernel_h, l.kernel_w},
              {l.out_channels}};
    case LayerSpec::Kind::Dense:
      return {{l.out_dim, in_shape[0]}, {l.out_dim}};
    default:
      return {{}, {}};
  }
}

int fan_in(const LayerSpec& l, const std::vector<int>& in_shape) {
  if (l.kind == LayerSpec::Kind::Conv)
    return in_shape[0] * l.kernel_h * l.kernel_w;
  return in_shape[0];
}

}  // namespace

NetworkParams init_params(const NetworkSpec& spec, Rng& rng) {
  NetworkParams p;
  p.spec = spec;
  const auto chain = spec.shape_chain();
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const auto shapes = param_shapes(spec.layers[i], chain[i]);
    if (shapes.weight.empty()) {
      p.weights.emplace_back();
      p.biases.emplace_back();
      continue;
    }
    Tensor w(shapes.weight);
    const double limit = std::sqrt(6.0 / fan_in(spec.layers[i], chain[i]));
    for (size_t k = 0; k < w.size(); ++k) w[k] = rng.uniform(-limit, limit);
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(shapes.bias);
  }
  return p;
}

NetworkParams zero_params(const NetworkSpec& spec) {
  Rng rng(0);
  NetworkParams p = init_params(spec, rng);
  for (auto& w : p.weights)
    if (w.size()) w.fill(0.0);
  return p;
}

size_t NetworkParams::param_count() const {
  size_t n = 0;
  for (const Tensor& w : weights) n += w.size();
  for (const Tensor& b : biases) n += b.size();
  return n;
}

namespace {

void conv_forward(const Tensor& in, const Tensor& w, const Tensor& b, int stride,
                  Tensor& out) {
  const int ic = in.shape()[0], ih = in.shape()[1], iw = in.shape()[2];
  const int oc = out.shape()[0], oh = out.shape()[1], ow = out.shape()[2];
  const int kh = w.shape()[2], kw = w.shape()[3];
  for (int o = 0; o < oc; ++o) {
    double* out_plane = out.data() + static_cast<size_t>(o) * oh * ow;
    for (int i = 0; i < oh * ow; ++i) out_plane[i] = b[o];
    for (int c = 0; c < ic; ++c) {
      const double* in_plane = in.data() + static_cast<size_t>(c) * ih * iw;
      const double* w_plane =
          w.data() + ((static_cast<size_t>(o) * ic + c) * kh) * kw;
      for (int r = 0; r < kh; ++r) {
        for (int s = 0; s < kw; ++s) {
          const double wv = w_plane[r * kw + s];
          for (int y = 0; y < oh; ++y) {
            const double* __restrict in_row = in_plane + (y * stride + r) * iw + s;
            double* __restrict out_row = out_plane + y * ow;
            if (stride == 1) {
              for (int x = 0; x < ow; ++x) out_row[x] += wv * in_row[x];
            } else {
              for (int x = 0; x < ow; ++x) out_row[x] += wv * in_row[x * stride];
            }
          }
        }
      }
    }
  }
}

void conv_backward(const Tensor& in, const Tensor& w, int stride,
                   const Tensor& grad_out, Tensor& grad_in, Tensor* grad_w,
                   Tensor* grad_b) {
  const int ic = in.shape()[0], ih = in.shape()[1], iw = in.shape()[2];
  const int oc = grad_out.shape()[0], oh = grad_out.shape()[1],
            ow = grad_out.shape()[2];
  const int kh = w.shape()[2], kw = w.shape()[3];
  for (int o = 0; o < oc; ++o) {
    const double* g_plane = grad_out.data() + static_cast<size_t>(o) * oh * ow;
    if (grad_b) {
      double acc = 0.0;
      for (int i = 0; i < oh * ow; ++i) acc += g_plane[i];
      (*grad_b)[o] += acc;
    }
    for (int c = 0; c < ic; ++c) {
      const double* in_plane = in.data() + static_cast<size_t>(c) * ih * iw;
      double* gin_plane = grad_in.data() + static_cast<size_t>(c) * ih * iw;
      const size_t w_base = ((static_cast<size_t>(o) * ic + c) * kh) * kw;
      for (int r = 0; r < kh; ++r) {
        for (int s = 0; s < kw; ++s) {
          const double wv = w[w_base + r * kw + s];
          double gw = 0.0;
          for (int y = 0; y < oh; ++y) {
            const double* __restrict in_row = in_plane + (y * stride + r) * iw + s;
            double* __restrict gin_row = gin_plane + (y * stride + r) * iw + s;
            const double* __restrict g_row = g_plane + y * ow;
            if (stride == 1) {
              for (int x = 0; x < ow; ++x) {
                gw += g_row[x] * in_row[x];
                gin_row[x] += g_row[x] * wv;
              }
            } else {
              for (int x = 0; x < ow; ++x) {
                gw += g_row[x] * in_row[x * stride];
                gin_row[x * stride] += g_row[x] * wv;
              }
            }
          }
          if (grad_w) (*grad_w)[w_base + r * kw + s] += gw;
        }
      }
    }
  }
}

}  // namespace

Tensor forward(const NetworkParams& params, const Tensor& input,
               const Tensor* side, ForwardCache* cache) {
  const NetworkSpec& spec = params.spec;
  const auto chain = spec.shape_chain();
  if (input.shape() != spec.input_shape)
    throw ContractError("forward: input shape does not match spec " +
                        spec.describe());
  const int side_dim = spec.side_dim();
  if (side_dim > 0) {
    if (!side) throw ContractError("forward: spec requires a side input");
    if (static_cast<int>(side->size()) != side_dim)
      throw ContractError("forward: side input has wrong size");
  } else if (side) {
    throw ContractError("forward: spec takes no side input");
  }

  if (cache) {
    cache->activations.clear();
    cache->activations.reserve(spec.layers.size() + 1);
    cache->activations.push_back(input);
    if (side) cache->side = *side;
  }

  Tensor x = input;
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    Tensor y;
    switch (l.kind) {
      case LayerSpec::Kind::Conv: {
        y = Tensor(chain[i + 1]);
        conv_forward(x, params.weights[i], params.biases[i], l.stride, y);
        break;
      }
      case LayerSpec::Kind::Dense: {
        y = Tensor(chain[i + 1]);
        const Tensor& w = params.weights[i];
        const int out_dim = l.out_dim;
        const int in_dim = static_cast<int>(x.size());
        for (int o = 0; o < out_dim; ++o) {
          const double* w_row = w.data() + static_cast<size_t>(o) * in_dim;
          double acc = params.biases[i][o];
          for (int k = 0; k < in_dim; ++k) acc += w_row[k] * x[k];
          y[o] = acc;
        }
        break;
      }
      case LayerSpec::Kind::ReLU: {
        y = x;
        for (size_t k = 0; k < y.size(); ++k)
          if (y[k] < 0.0) y[k] = 0.0;
        break;
      }
      case LayerSpec::Kind::Softmax: {
        y = x;
        double mx = y[0];
        for (size_t k = 1; k < y.size(); ++k) mx = std::max(mx, y[k]);
        double sum = 0.0;
        for (size_t k = 0; k < y.size(); ++k) {
          y[k] = std::exp(y[k] - mx);
          sum += y[k];
        }
        for (size_t k = 0; k < y.size(); ++k) y[k] /= sum;
        break;
      }
      case LayerSpec::Kind::Flatten: {
        y = Tensor(chain[i + 1], x.values());
        break;
      }
      case LayerSpec::Kind::ConcatSide: {
        y = Tensor(chain[i + 1]);
        std::copy(x.values().begin(), x.values().end(), y.values().begin());
        std::copy(side->values().begin(), side->values().end(),
                  y.values().begin() + x.size());
        break;
      }
    }
    x = std::move(y);
    if (cache) cache->activations.push_back(x);
  }
  return x;
}

Gradients zero_gradients(const NetworkParams& params) {
  Gradients g;
  for (const Tensor& w : params.weights)
    g.weights.push_back(w.size() ? Tensor::zeros_like(w) : Tensor());
  for (const Tensor& b : params.biases)
    g.biases.push_back(b.size() ? Tensor::zeros_like(b) : Tensor());
  return g;
}

void accumulate(Gradients& into, const Gradients& from) {
  for (size_t i = 0; i < into.weights.size(); ++i) {
    for (size_t k = 0; k < into.weights[i].size(); ++k)
      into.weights[i][k] += from.weights[i][k];
    for (size_t k = 0; k < into.biases[i].size(); ++k)
      into.biases[i][k] += from.biases[i][k];
  }
}

void scale(Gradients& grads, double factor) {
  for (auto& w : grads.weights)
    for (size_t k = 0; k < w.size(); ++k) w[k] *= factor;
  for (auto& b : grads.biases)
    for (size_t k = 0; k < b.size(); ++k) b[k] *= factor;
}

Tensor backward(const NetworkParams& params, const ForwardCache& cache,
                const Tensor& output_gradient, Gradients* grads) {
  const NetworkSpec& spec = params.spec;
  if (cache.activations.size() != spec.layers.size() + 1)
    throw ContractError("backward: cache does not match spec");
  Tensor g = output_gradient;
  for (int i = static_cast<int>(spec.layers.size()) - 1; i >= 0; --i) {
    const LayerSpec& l = spec.layers[i];
    const Tensor& x = cache.activations[i];
    const Tensor& y = cache.activations[i + 1];
    Tensor gx;
    switch (l.kind) {
      case LayerSpec::Kind::Conv: {
        gx = Tensor::zeros_like(x);
        conv_backward(x, params.weights[i], l.stride, g, gx,
                      grads ? &grads->weights[i] : nullptr,
                      grads ? &grads->biases[i] : nullptr);
        break;
      }
      case LayerSpec::Kind::Dense: {
        gx = Tensor::zeros_like(x);
        const Tensor& w = params.weights[i];
        const int out_dim = l.out_dim;
        const int in_dim = static_cast<int>(x.size());
        for (int o = 0; o < out_dim; ++o) {
          const double go = g[o];
          const double* w_row = w.data() + static_cast<size_t>(o) * in_dim;
          if (grads) {
            double* gw_row =
                grads->weights[i].data() + static_cast<size_t>(o) * in_dim;
            for (int k = 0; k < in_dim; ++k) gw_row[k] += go * x[k];
            grads->biases[i][o] += go;
          }
          for (int k = 0; k < in_dim; ++k) gx[k] += go * w_row[k];
        }
        break;
      }
      case LayerSpec::Kind::ReLU: {
        gx = g;
        for (size_t k = 0; k < gx.size(); ++k)
          if (x[k] <= 0.0) gx[k] = 0.0;
        break;
      }
      case LayerSpec::Kind::Softmax: {
        gx = Tensor::zeros_like(x);
        double dot = 0.0;
        for (size_t k = 0; k < y.size(); ++k) dot += g[k] * y[k];
        for (size_t k = 0; k < y.size(); ++k) gx[k] = y[k] * (g[k] - dot);
        break;
      }
      case LayerSpec::Kind::Flatten: {
        gx = Tensor(x.shape(), g.values());
        break;
      }
      case LayerSpec::Kind::ConcatSide: {
        gx = Tensor::zeros_like(x);
        std::copy(g.values().begin(), g.values().begin() + x.size(),
                  gx.values().begin());
        // Side inputs are one-hot constants; their gradient is dropped.
        break;
      }
    }
    g = std::move(gx);
  }
  return g;
}

AdamState init_adam(const NetworkParams& params, const AdamConfig& config) {
  AdamState s;
  s.config = config;
  for (const Tensor& w : params.weights) {
    s.m_weights.push_back(w.size() ? Tensor::zeros_like(w) : Tensor());
    s.v_weights.push_back(w.size() ? Tensor::zeros_like(w) : Tensor());
  }
  for (const Tensor& b : params.biases) {
    s.m_biases.push_back(b.size() ? Tensor::zeros_like(b) : Tensor());
    s.v_biases.push_back(b.size() ? Tensor::zeros_like(b) : Tensor());
  }
  return s;
}

namespace {

// The finiteness check runs as a separate pass so the update loop stays
// branch-free and vectorizable; online per-transition training calls this
// for every parameter on every environment step.
void adam_update_tensor(Tensor& p, const Tensor& g, Tensor& m, Tensor& v,
                        const AdamConfig& c, double bc1, double bc2) {
  if (!g.all_finite()) throw TrainingError("adam_step: non-finite gradient");
  const size_t count = p.size();
  double* pd = p.data();
  double* md = m.data();
  double* vd = v.data();
  const double* gd = g.data();
  const double inv_bc1 = 1.0 / bc1;
  const double inv_bc2 = 1.0 / bc2;
  for (size_t k = 0; k < count; ++k) {
    const double gk = gd[k];
    md[k] = c.beta1 * md[k] + (1.0 - c.beta1) * gk;
    vd[k] = c.beta2 * vd[k] + (1.0 - c.beta2) * gk * gk;
    pd[k] -= c.lr * (md[k] * inv_bc1) /
             (std::sqrt(vd[k] * inv_bc2) + c.eps);
  }
}

}  // namespace

void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.config.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.config.beta2, state.step);
  for (size_t i = 0; i < params.weights.size(); ++i) {
    if (!params.weights[i].size()) continue;
    adam_update_tensor(params.weights[i], grads.weights[i], state.m_weights[i],
                       state.v_weights[i], state.config, bc1, bc2);
    adam_update_tensor(params.biases[i], grads.biases[i], state.m_biases[i],
                       state.v_biases[i], state.config, bc1, bc2);
  }
}

}  // namespace gridsoccer
