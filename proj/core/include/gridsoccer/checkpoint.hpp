#pragma once

#include <iosfwd>
#include <string>

#include "gridsoccer/nn.hpp"

namespace gridsoccer {

// Binary little-endian primitives shared by the params format and the
// harness checkpoint files.
namespace io {
void write_u32(std::ostream& os, uint32_t v);
void write_u64(std::ostream& os, uint64_t v);
void write_i64(std::ostream& os, int64_t v);
void write_f64(std::ostream& os, double v);
void write_string(std::ostream& os, const std::string& s);
uint32_t read_u32(std::istream& is);
uint64_t read_u64(std::istream& is);
int64_t read_i64(std::istream& is);
double read_f64(std::istream& is);
std::string read_string(std::istream& is);

void write_tensor(std::ostream& os, const Tensor& t);
Tensor read_tensor(std::istream& is);
}  // namespace io

// Params stream format: magic "GSNN", u32 version, u64 spec fingerprint, the
// serialized spec chain, then each parametric layer's weight and bias tensor
// as (ndim, dims, f64 values). Round trips are bit exact.
void write_params(std::ostream& os, const NetworkParams& params);
NetworkParams read_params(std::istream& is);

void save_params(const NetworkParams& params, const std::string& path);
NetworkParams load_params(const std::string& path);

/// Load and verify the spec fingerprint; CheckpointError on mismatch, with no
/// partial state handed out.
NetworkParams load_params_expecting(const std::string& path,
                                    const NetworkSpec& expected);

void write_adam(std::ostream& os, const AdamState& state);
AdamState read_adam(std::istream& is);

}  // namespace gridsoccer
