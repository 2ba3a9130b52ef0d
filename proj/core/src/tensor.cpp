#include "gcabulf/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "gcabulf/errors.hpp"

namespace gcabulf {

void Tensor2::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor2::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void matvec_add(const Tensor2& w, std::span<const double> x, std::span<double> y) {
  const std::size_t cols = w.cols();
  const double* row = w.data().data();
  for (std::size_t r = 0; r < w.rows(); ++r, row += cols) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

void matvec_transposed_add(const Tensor2& w, std::span<const double> dy, std::span<double> x_grad) {
  const std::size_t cols = w.cols();
  const double* row = w.data().data();
  for (std::size_t r = 0; r < w.rows(); ++r, row += cols) {
    const double g = dy[r];
    if (g == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) x_grad[c] += row[c] * g;
  }
}

void outer_add(Tensor2& w, std::span<const double> dy, std::span<const double> x) {
  const std::size_t cols = w.cols();
  double* row = w.data().data();
  for (std::size_t r = 0; r < w.rows(); ++r, row += cols) {
    const double g = dy[r];
    if (g == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) row[c] += g * x[c];
  }
}

void require_finite(std::span<const double> values, const std::string& what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw TrainingError("non-finite value in " + what);
  }
}

}  // namespace gcabulf
