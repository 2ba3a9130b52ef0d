#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gcabulf/layers.hpp"

namespace gcabulf {

struct GradCheckBlock {
  std::string name;
  std::size_t elements = 0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  double tolerance = 0.0;

  bool passed() const;
  /// Names of blocks whose error exceeds the tolerance.
  std::vector<std::string> failures() const;
  double worst() const;
};

/// A scalar loss over some parameter blocks, plus a routine that fills their gradients.
struct GradCheckProblem {
  std::vector<ParamRef> params;
  std::function<double()> loss;
  std::function<void()> compute_gradients;
};

/// Compares analytic gradients with central differences, per element:
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
GradCheckReport grad_check(const GradCheckProblem& problem, double tolerance, double step = 1e-5);

struct LstmFcCheckSetup {
  LstmFcShape shape{3, 4, 2, {6, 5}, GateActivation::Sigmoid, LstmReadout::OutputGate};
  std::size_t steps = 5;
  std::size_t batch = 3;
  /// Draws are rejected while any ReLU pre-activation lies closer than this to its kink.
  double kink_margin = 1e-3;
  int max_redraws = 200;
};

/// Draws a random LstmFcNet and batch from `seed` and checks every block under MSE.
GradCheckReport check_lstm_fc_gradients(const LstmFcCheckSetup& setup, std::uint64_t seed, double tolerance);

}  // namespace gcabulf
