#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gcabulf {

/// Dense row-major matrix of 64-bit reals.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void fill(double v);
  bool all_finite() const;
  bool same_shape(const Tensor2& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

  bool operator==(const Tensor2&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y += W x for W of shape (y.size() x x.size()).
void matvec_add(const Tensor2& w, std::span<const double> x, std::span<double> y);
/// x_grad += W^T dy.
void matvec_transposed_add(const Tensor2& w, std::span<const double> dy, std::span<double> x_grad);
/// W += dy x^T.
void outer_add(Tensor2& w, std::span<const double> dy, std::span<const double> x);

/// A trainable block together with its gradient accumulator.
struct ParamRef {
  std::string name;
  Tensor2* value = nullptr;
  Tensor2* grad = nullptr;
};

/// Throws TrainingError naming `what` if any entry is NaN or infinite.
void require_finite(std::span<const double> values, const std::string& what);

}  // namespace gcabulf
