#include "gridsoccer/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "gridsoccer/errors.hpp"

namespace gridsoccer {

namespace io {

namespace {

template <typename T>
void write_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  for (size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!is) throw CheckpointError("checkpoint: truncated file");
  T v = 0;
  for (size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<T>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void write_u32(std::ostream& os, uint32_t v) { write_le<uint32_t>(os, v); }
void write_u64(std::ostream& os, uint64_t v) { write_le<uint64_t>(os, v); }
void write_i64(std::ostream& os, int64_t v) {
  write_le<uint64_t>(os, static_cast<uint64_t>(v));
}

void write_f64(std::ostream& os, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  write_le<uint64_t>(os, bits);
}

void write_string(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t read_u32(std::istream& is) { return read_le<uint32_t>(is); }
uint64_t read_u64(std::istream& is) { return read_le<uint64_t>(is); }
int64_t read_i64(std::istream& is) {
  return static_cast<int64_t>(read_le<uint64_t>(is));
}

double read_f64(std::istream& is) {
  const uint64_t bits = read_le<uint64_t>(is);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

std::string read_string(std::istream& is) {
  const uint32_t len = read_u32(is);
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw CheckpointError("checkpoint: truncated string");
  return s;
}

void write_tensor(std::ostream& os, const Tensor& t) {
  write_u32(os, static_cast<uint32_t>(t.shape().size()));
  for (int d : t.shape()) write_u32(os, static_cast<uint32_t>(d));
  for (size_t i = 0; i < t.size(); ++i) write_f64(os, t[i]);
}

Tensor read_tensor(std::istream& is) {
  const uint32_t ndim = read_u32(is);
  if (ndim > 8) throw CheckpointError("checkpoint: implausible tensor rank");
  if (ndim == 0) return Tensor();
  std::vector<int> shape(ndim);
  for (auto& d : shape) d = static_cast<int>(read_u32(is));
  Tensor t(shape);
  for (size_t i = 0; i < t.size(); ++i) t[i] = read_f64(is);
  return t;
}

}  // namespace io

namespace {

constexpr char kParamsMagic[4] = {'G', 'S', 'N', 'N'};
constexpr uint32_t kParamsVersion = 1;

void write_spec(std::ostream& os, const NetworkSpec& spec) {
  io::write_u32(os, static_cast<uint32_t>(spec.input_shape.size()));
  for (int d : spec.input_shape) io::write_u32(os, static_cast<uint32_t>(d));
  io::write_u32(os, static_cast<uint32_t>(spec.layers.size()));
  for (const LayerSpec& l : spec.layers) {
    io::write_u32(os, static_cast<uint32_t>(l.kind));
    io::write_u32(os, static_cast<uint32_t>(l.out_channels));
    io::write_u32(os, static_cast<uint32_t>(l.kernel_h));
    io::write_u32(os, static_cast<uint32_t>(l.kernel_w));
    io::write_u32(os, static_cast<uint32_t>(l.stride));
    io::write_u32(os, static_cast<uint32_t>(l.out_dim));
    io::write_u32(os, static_cast<uint32_t>(l.extra_dim));
  }
}

NetworkSpec read_spec(std::istream& is) {
  NetworkSpec spec;
  const uint32_t nd = io::read_u32(is);
  spec.input_shape.resize(nd);
  for (auto& d : spec.input_shape) d = static_cast<int>(io::read_u32(is));
  const uint32_t nl = io::read_u32(is);
  spec.layers.resize(nl);
  for (auto& l : spec.layers) {
    l.kind = static_cast<LayerSpec::Kind>(io::read_u32(is));
    l.out_channels = static_cast<int>(io::read_u32(is));
    l.kernel_h = static_cast<int>(io::read_u32(is));
    l.kernel_w = static_cast<int>(io::read_u32(is));
    l.stride = static_cast<int>(io::read_u32(is));
    l.out_dim = static_cast<int>(io::read_u32(is));
    l.extra_dim = static_cast<int>(io::read_u32(is));
  }
  return spec;
}

}  // namespace

void write_params(std::ostream& os, const NetworkParams& params) {
  os.write(kParamsMagic, 4);
  io::write_u32(os, kParamsVersion);
  io::write_u64(os, params.spec.fingerprint());
  write_spec(os, params.spec);
  for (size_t i = 0; i < params.weights.size(); ++i) {
    if (!params.weights[i].size()) continue;
    io::write_tensor(os, params.weights[i]);
    io::write_tensor(os, params.biases[i]);
  }
}

NetworkParams read_params(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kParamsMagic, 4) != 0)
    throw CheckpointError("params: bad magic");
  const uint32_t version = io::read_u32(is);
  if (version != kParamsVersion)
    throw CheckpointError("params: unsupported version");
  const uint64_t fp = io::read_u64(is);
  NetworkParams p;
  p.spec = read_spec(is);
  if (p.spec.fingerprint() != fp)
    throw CheckpointError("params: fingerprint does not match stored spec");
  p.spec.shape_chain();  // validates composition
  for (const LayerSpec& l : p.spec.layers) {
    if (l.kind == LayerSpec::Kind::Conv || l.kind == LayerSpec::Kind::Dense) {
      p.weights.push_back(io::read_tensor(is));
      p.biases.push_back(io::read_tensor(is));
    } else {
      p.weights.emplace_back();
      p.biases.emplace_back();
    }
  }
  return p;
}

void save_params(const NetworkParams& params, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("params: cannot open " + path + " for writing");
  write_params(os, params);
  if (!os) throw CheckpointError("params: write failed for " + path);
}

NetworkParams load_params(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("params: cannot open " + path);
  return read_params(is);
}

NetworkParams load_params_expecting(const std::string& path,
                                    const NetworkSpec& expected) {
  NetworkParams p = load_params(path);
  if (p.spec.fingerprint() != expected.fingerprint())
    throw CheckpointError("params: checkpoint spec " + p.spec.describe() +
                          " does not match expected " + expected.describe());
  return p;
}

void write_adam(std::ostream& os, const AdamState& state) {
  io::write_f64(os, state.config.lr);
  io::write_f64(os, state.config.beta1);
  io::write_f64(os, state.config.beta2);
  io::write_f64(os, state.config.eps);
  io::write_i64(os, state.step);
  auto write_all = [&](const std::vector<Tensor>& ts) {
    io::write_u32(os, static_cast<uint32_t>(ts.size()));
    for (const Tensor& t : ts) io::write_tensor(os, t);
  };
  write_all(state.m_weights);
  write_all(state.v_weights);
  write_all(state.m_biases);
  write_all(state.v_biases);
}

AdamState read_adam(std::istream& is) {
  AdamState s;
  s.config.lr = io::read_f64(is);
  s.config.beta1 = io::read_f64(is);
  s.config.beta2 = io::read_f64(is);
  s.config.eps = io::read_f64(is);
  s.step = io::read_i64(is);
  auto read_all = [&](std::vector<Tensor>& ts) {
    ts.resize(io::read_u32(is));
    for (Tensor& t : ts) t = io::read_tensor(is);
  };
  read_all(s.m_weights);
  read_all(s.v_weights);
  read_all(s.m_biases);
  read_all(s.v_biases);
  return s;
}

}  // namespace gridsoccer
