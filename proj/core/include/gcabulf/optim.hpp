#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gcabulf/tensor.hpp"

namespace gcabulf {

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // dLoss/dpred
};

/// Mean squared error over the batch; grad = 2 (pred - target) / n.
LossResult mse_loss(std::span<const double> pred, std::span<const double> target);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment accumulators, one pair per parameter block.
struct AdamState {
  AdamConfig config;
  std::vector<Tensor2> first_moment;
  std::vector<Tensor2> second_moment;
  std::int64_t step = 0;
};

AdamState make_adam_state(std::span<const ParamRef> params, const AdamConfig& config);

/// Bias-corrected Adam update of every block from its accumulated gradient.
void adam_step(AdamState& state, std::span<const ParamRef> params);

void zero_grads(std::span<const ParamRef> params);

/// Deep copy of parameter values (for best-epoch snapshots).
std::vector<Tensor2> snapshot(std::span<const ParamRef> params);
void restore(std::span<const ParamRef> params, const std::vector<Tensor2>& values);

}  // namespace gcabulf
