#pragma once

#include <cstddef>
#include <vector>

namespace gridsoccer {

/// Dense row-major tensor of doubles. All training runs in 64-bit so that
/// finite-difference oracles and cross-platform determinism hold exactly.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<double> values);

  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

  const std::vector<int>& shape() const { return shape_; }
  size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  // 3-D (channel, row, col) access for image tensors.
  double& at3(int c, int r, int col) {
    return data_[(static_cast<size_t>(c) * shape_[1] + r) * shape_[2] + col];
  }
  double at3(int c, int r, int col) const {
    return data_[(static_cast<size_t>(c) * shape_[1] + r) * shape_[2] + col];
  }

  void fill(double v);
  double sum() const;
  bool all_finite() const;

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool operator==(const Tensor&) const = default;

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

size_t shape_size(const std::vector<int>& shape);

}  // namespace gridsoccer
