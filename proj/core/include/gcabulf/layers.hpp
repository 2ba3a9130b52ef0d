#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gcabulf/tensor.hpp"

namespace gcabulf {

enum class GateActivation { Sigmoid, Relu };

/// Which final LSTM state feeds the fully connected head.
enum class LstmReadout {
  OutputGate,  // O_tau
  Hidden,      // H_tau
};

std::string to_string(GateActivation a);
GateActivation gate_activation_from_string(const std::string& s);
std::string to_string(LstmReadout r);
LstmReadout lstm_readout_from_string(const std::string& s);

using Rng = std::mt19937_64;

/// LSTM over [H_{t-1}, x_t]; gate order is forget, input, candidate, output.
///
/// Forget/input/output gates use the configured activation, the candidate uses tanh.
class Lstm {
 public:
  static constexpr std::size_t kForget = 0, kInput = 1, kCandidate = 2, kOutput = 3;

  struct Trace {
    std::size_t steps = 0;
    std::vector<double> z;     // steps x (hidden + input): [H_{t-1}, x_t]
    std::vector<double> pre;   // steps x 4*hidden: gate pre-activations
    std::vector<double> gate;  // steps x 4*hidden: F, I, C~, O
    std::vector<double> cell;  // (steps + 1) x hidden, row 0 = C_0 = 0
    std::vector<double> hidden;  // (steps + 1) x hidden, row 0 = H_0 = 0

    std::span<const double> final_output_gate(std::size_t hidden_dim) const;
    std::span<const double> final_hidden(std::size_t hidden_dim) const;
  };

  Lstm() = default;
  Lstm(std::size_t input_dim, std::size_t hidden_dim, GateActivation activation);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  GateActivation activation() const { return activation_; }

  /// Weights uniform in +-1/sqrt(fan_in), biases zero except the forget gate (+1).
  void init(Rng& rng);

  /// `inputs` is steps x input_dim, row-major. Throws TrainingError on a non-finite state.
  Trace forward(std::span<const double> inputs, std::size_t steps) const;

  /// Accumulates parameter gradients given dLoss/dO_tau and dLoss/dH_tau (either may be empty).
  void backward(const Trace& trace, std::span<const double> d_output_gate, std::span<const double> d_hidden);

  void zero_grad();
  void append_parameters(std::vector<ParamRef>& out, const std::string& prefix);

  std::array<Tensor2, 4> weights;  // hidden x (hidden + input)
  std::array<Tensor2, 4> biases;   // hidden x 1
  std::array<Tensor2, 4> weight_grads;
  std::array<Tensor2, 4> bias_grads;

 private:
  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
  GateActivation activation_ = GateActivation::Sigmoid;
};

/// Affine layers with ReLU between them and a linear final layer.
class FcStack {
 public:
  struct Trace {
    std::vector<std::vector<double>> inputs;  // input to each layer
    std::vector<std::vector<double>> pre;     // pre-activation of each layer
    std::vector<double> output;
  };

  FcStack() = default;
  /// sizes = [in, hidden_1, ..., out]; at least two entries.
  explicit FcStack(std::vector<std::size_t> sizes);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }

  void init(Rng& rng);
  Trace forward(std::span<const double> x) const;
  /// Accumulates parameter gradients; writes dLoss/dx into `d_input` when non-empty.
  void backward(const Trace& trace, std::span<const double> d_output, std::span<double> d_input);

  void zero_grad();
  void append_parameters(std::vector<ParamRef>& out, const std::string& prefix);

  std::vector<Tensor2> weights;  // out x in
  std::vector<Tensor2> biases;   // out x 1
  std::vector<Tensor2> weight_grads;
  std::vector<Tensor2> bias_grads;

 private:
  std::vector<std::size_t> sizes_;
};

struct LstmFcShape {
  std::size_t input_dim = 1;
  std::size_t hidden_dim = 64;
  std::size_t context_dim = 0;
  std::vector<std::size_t> fc_hidden{64, 32};
  GateActivation gates = GateActivation::Sigmoid;
  LstmReadout readout = LstmReadout::OutputGate;
};

/// LSTM over a tau-step window, readout concatenated with context features, FC head to a scalar.
class LstmFcNet {
 public:
  struct Trace {
    Lstm::Trace lstm;
    FcStack::Trace fc;
    double output = 0.0;
  };

  LstmFcNet() = default;
  explicit LstmFcNet(const LstmFcShape& shape);

  const LstmFcShape& shape() const { return shape_; }
  void init(Rng& rng);

  double forward(std::span<const double> window, std::size_t steps, std::span<const double> context,
                 Trace* trace = nullptr) const;
  void backward(const Trace& trace, double d_output);

  /// Smallest |pre-activation| over every ReLU unit touched by the trace (infinity if none).
  double min_abs_relu_preactivation(const Trace& trace) const;

  void zero_grad();
  std::vector<ParamRef> parameters(const std::string& prefix = "");

  Lstm lstm;
  FcStack fc;

 private:
  LstmFcShape shape_;
};

}  // namespace gcabulf
