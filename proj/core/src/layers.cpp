#include "gcabulf/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcabulf/errors.hpp"

namespace gcabulf {

namespace {

constexpr const char* kGateNames[4] = {"f", "i", "c", "o"};

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void init_uniform(Tensor2& t, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : t.data()) v = dist(rng);
}

}  // namespace

std::string to_string(GateActivation a) { return a == GateActivation::Relu ? "relu" : "sigmoid"; }

GateActivation gate_activation_from_string(const std::string& s) {
  if (s == "sigmoid") return GateActivation::Sigmoid;
  if (s == "relu") return GateActivation::Relu;
  throw UsageError("unknown gate activation '" + s + "' (expected sigmoid or relu)");
}

std::string to_string(LstmReadout r) { return r == LstmReadout::Hidden ? "hidden" : "output_gate"; }

LstmReadout lstm_readout_from_string(const std::string& s) {
  if (s == "output_gate") return LstmReadout::OutputGate;
  if (s == "hidden") return LstmReadout::Hidden;
  throw UsageError("unknown LSTM readout '" + s + "' (expected output_gate or hidden)");
}

// ---------------------------------------------------------------------------------------------
// Lstm

std::span<const double> Lstm::Trace::final_output_gate(std::size_t hidden_dim) const {
  return {gate.data() + (steps - 1) * 4 * hidden_dim + kOutput * hidden_dim, hidden_dim};
}

std::span<const double> Lstm::Trace::final_hidden(std::size_t hidden_dim) const {
  return {hidden.data() + steps * hidden_dim, hidden_dim};
}

Lstm::Lstm(std::size_t input_dim, std::size_t hidden_dim, GateActivation activation)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), activation_(activation) {
  if (input_dim == 0 || hidden_dim == 0) throw UsageError("Lstm: dimensions must be positive");
  for (std::size_t k = 0; k < 4; ++k) {
    weights[k] = Tensor2(hidden_dim, hidden_dim + input_dim);
    biases[k] = Tensor2(hidden_dim, 1);
    weight_grads[k] = Tensor2(hidden_dim, hidden_dim + input_dim);
    bias_grads[k] = Tensor2(hidden_dim, 1);
  }
}

void Lstm::init(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim_ + input_dim_));
  for (std::size_t k = 0; k < 4; ++k) {
    init_uniform(weights[k], bound, rng);
    biases[k].fill(k == kForget ? 1.0 : 0.0);
  }
}

Lstm::Trace Lstm::forward(std::span<const double> inputs, std::size_t steps) const {
  const std::size_t H = hidden_dim_, D = input_dim_, Z = H + D;
  if (steps == 0) throw UsageError("Lstm::forward: at least one step required");
  if (inputs.size() != steps * D) throw UsageError("Lstm::forward: input size does not match steps x input_dim");

  Trace tr;
  tr.steps = steps;
  tr.z.assign(steps * Z, 0.0);
  tr.pre.assign(steps * 4 * H, 0.0);
  tr.gate.assign(steps * 4 * H, 0.0);
  tr.cell.assign((steps + 1) * H, 0.0);
  tr.hidden.assign((steps + 1) * H, 0.0);

  for (std::size_t t = 0; t < steps; ++t) {
    std::span<double> z(tr.z.data() + t * Z, Z);
    std::copy_n(tr.hidden.data() + t * H, H, z.data());
    std::copy_n(inputs.data() + t * D, D, z.data() + H);

    double* pre = tr.pre.data() + t * 4 * H;
    double* gate = tr.gate.data() + t * 4 * H;
    for (std::size_t k = 0; k < 4; ++k) {
      std::span<double> a(pre + k * H, H);
      std::copy_n(biases[k].data().data(), H, a.data());
      matvec_add(weights[k], z, a);
      for (std::size_t u = 0; u < H; ++u) {
        const double x = a[u];
        double y;
        if (k == kCandidate) {
          y = std::tanh(x);
        } else if (activation_ == GateActivation::Sigmoid) {
          y = sigmoid(x);
        } else {
          y = x > 0.0 ? x : 0.0;
        }
        gate[k * H + u] = y;
      }
    }
    const double* c_prev = tr.cell.data() + t * H;
    double* c = tr.cell.data() + (t + 1) * H;
    double* h = tr.hidden.data() + (t + 1) * H;
    for (std::size_t u = 0; u < H; ++u) {
      c[u] = gate[kForget * H + u] * c_prev[u] + gate[kInput * H + u] * gate[kCandidate * H + u];
      h[u] = gate[kOutput * H + u] * std::tanh(c[u]);
      if (!std::isfinite(c[u]) || !std::isfinite(h[u])) {
        throw TrainingError("LSTM produced a non-finite state at step " + std::to_string(t + 1));
      }
    }
  }
  return tr;
}

void Lstm::backward(const Trace& tr, std::span<const double> d_output_gate, std::span<const double> d_hidden) {
  const std::size_t H = hidden_dim_, Z = H + input_dim_;
  if (tr.steps == 0) throw UsageError("Lstm::backward: missing forward trace");

  std::vector<double> dh(H, 0.0), dc(H, 0.0), dz(Z, 0.0), da(4 * H, 0.0);
  if (!d_hidden.empty()) std::copy(d_hidden.begin(), d_hidden.end(), dh.begin());

  for (std::size_t t = tr.steps; t-- > 0;) {
    const double* pre = tr.pre.data() + t * 4 * H;
    const double* gate = tr.gate.data() + t * 4 * H;
    const double* c_prev = tr.cell.data() + t * H;
    const double* c = tr.cell.data() + (t + 1) * H;
    const bool last = t + 1 == tr.steps;

    for (std::size_t u = 0; u < H; ++u) {
      const double f = gate[kForget * H + u], i = gate[kInput * H + u];
      const double g = gate[kCandidate * H + u], o = gate[kOutput * H + u];
      const double tc = std::tanh(c[u]);
      double d_o = dh[u] * tc;
      if (last && !d_output_gate.empty()) d_o += d_output_gate[u];
      const double d_c = dc[u] + dh[u] * o * (1.0 - tc * tc);

      auto gate_grad = [&](std::size_t k, double y) {
        if (activation_ == GateActivation::Sigmoid) return y * (1.0 - y);
        return pre[k * H + u] > 0.0 ? 1.0 : 0.0;
      };
      da[kForget * H + u] = d_c * c_prev[u] * gate_grad(kForget, f);
      da[kInput * H + u] = d_c * g * gate_grad(kInput, i);
      da[kCandidate * H + u] = d_c * i * (1.0 - g * g);
      da[kOutput * H + u] = d_o * gate_grad(kOutput, o);
      dc[u] = d_c * f;
    }

    std::span<const double> z(tr.z.data() + t * Z, Z);
    std::fill(dz.begin(), dz.end(), 0.0);
    for (std::size_t k = 0; k < 4; ++k) {
      std::span<const double> dak(da.data() + k * H, H);
      outer_add(weight_grads[k], dak, z);
      for (std::size_t u = 0; u < H; ++u) bias_grads[k][u] += dak[u];
      matvec_transposed_add(weights[k], dak, dz);
    }
    std::copy_n(dz.begin(), H, dh.begin());
  }
}

void Lstm::zero_grad() {
  for (std::size_t k = 0; k < 4; ++k) {
    weight_grads[k].fill(0.0);
    bias_grads[k].fill(0.0);
  }
}

void Lstm::append_parameters(std::vector<ParamRef>& out, const std::string& prefix) {
  for (std::size_t k = 0; k < 4; ++k) {
    out.push_back({prefix + "W_" + kGateNames[k], &weights[k], &weight_grads[k]});
  }
  for (std::size_t k = 0; k < 4; ++k) {
    out.push_back({prefix + "b_" + kGateNames[k], &biases[k], &bias_grads[k]});
  }
}

// ---------------------------------------------------------------------------------------------
// FcStack

FcStack::FcStack(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw UsageError("FcStack: need at least input and output sizes");
  for (auto s : sizes_) {
    if (s == 0) throw UsageError("FcStack: layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weights.emplace_back(sizes_[l + 1], sizes_[l]);
    biases.emplace_back(sizes_[l + 1], 1);
    weight_grads.emplace_back(sizes_[l + 1], sizes_[l]);
    bias_grads.emplace_back(sizes_[l + 1], 1);
  }
}

void FcStack::init(Rng& rng) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    init_uniform(weights[l], 1.0 / std::sqrt(static_cast<double>(sizes_[l])), rng);
    biases[l].fill(0.0);
  }
}

FcStack::Trace FcStack::forward(std::span<const double> x) const {
  if (x.size() != sizes_.front()) throw UsageError("FcStack::forward: input width mismatch");
  Trace tr;
  std::vector<double> act(x.begin(), x.end());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    std::vector<double> pre(biases[l].data().begin(), biases[l].data().end());
    matvec_add(weights[l], act, pre);
    tr.inputs.push_back(std::move(act));
    act = pre;
    if (l + 1 < weights.size()) {
      for (auto& v : act) v = v > 0.0 ? v : 0.0;
    }
    tr.pre.push_back(std::move(pre));
  }
  require_finite(act, "fully connected output");
  tr.output = std::move(act);
  return tr;
}

void FcStack::backward(const Trace& tr, std::span<const double> d_output, std::span<double> d_input) {
  if (tr.inputs.size() != weights.size()) throw UsageError("FcStack::backward: missing forward trace");
  if (d_output.size() != sizes_.back()) throw UsageError("FcStack::backward: gradient width mismatch");
  std::vector<double> delta(d_output.begin(), d_output.end());
  for (std::size_t l = weights.size(); l-- > 0;) {
    if (l + 1 < weights.size()) {
      for (std::size_t u = 0; u < delta.size(); ++u) {
        if (!(tr.pre[l][u] > 0.0)) delta[u] = 0.0;
      }
    }
    outer_add(weight_grads[l], delta, tr.inputs[l]);
    for (std::size_t u = 0; u < delta.size(); ++u) bias_grads[l][u] += delta[u];
    if (l == 0 && d_input.empty()) break;
    std::vector<double> below(sizes_[l], 0.0);
    matvec_transposed_add(weights[l], delta, below);
    delta = std::move(below);
  }
  if (!d_input.empty()) {
    if (d_input.size() != sizes_.front()) throw UsageError("FcStack::backward: input gradient width mismatch");
    std::copy(delta.begin(), delta.end(), d_input.begin());
  }
}

void FcStack::zero_grad() {
  for (auto& g : weight_grads) g.fill(0.0);
  for (auto& g : bias_grads) g.fill(0.0);
}

void FcStack::append_parameters(std::vector<ParamRef>& out, const std::string& prefix) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.push_back({prefix + "W" + std::to_string(l + 1), &weights[l], &weight_grads[l]});
    out.push_back({prefix + "b" + std::to_string(l + 1), &biases[l], &bias_grads[l]});
  }
}

// ---------------------------------------------------------------------------------------------
// LstmFcNet

namespace {

std::vector<std::size_t> head_sizes(const LstmFcShape& s) {
  std::vector<std::size_t> sizes{s.hidden_dim + s.context_dim};
  sizes.insert(sizes.end(), s.fc_hidden.begin(), s.fc_hidden.end());
  sizes.push_back(1);
  return sizes;
}

}  // namespace

LstmFcNet::LstmFcNet(const LstmFcShape& shape)
    : lstm(shape.input_dim, shape.hidden_dim, shape.gates), fc(head_sizes(shape)), shape_(shape) {}

void LstmFcNet::init(Rng& rng) {
  lstm.init(rng);
  fc.init(rng);
}

double LstmFcNet::forward(std::span<const double> window, std::size_t steps, std::span<const double> context,
                          Trace* trace) const {
  if (context.size() != shape_.context_dim) throw UsageError("LstmFcNet: context width mismatch");
  Lstm::Trace lt = lstm.forward(window, steps);
  const auto readout = shape_.readout == LstmReadout::OutputGate ? lt.final_output_gate(shape_.hidden_dim)
                                                                 : lt.final_hidden(shape_.hidden_dim);
  std::vector<double> head_in(readout.begin(), readout.end());
  head_in.insert(head_in.end(), context.begin(), context.end());
  FcStack::Trace ft = fc.forward(head_in);
  const double y = ft.output[0];
  if (trace) {
    trace->lstm = std::move(lt);
    trace->fc = std::move(ft);
    trace->output = y;
  }
  return y;
}

void LstmFcNet::backward(const Trace& trace, double d_output) {
  const std::size_t H = shape_.hidden_dim;
  std::vector<double> d_head(H + shape_.context_dim, 0.0);
  const double d_out[1] = {d_output};
  fc.backward(trace.fc, d_out, d_head);
  std::span<const double> d_readout(d_head.data(), H);
  if (shape_.readout == LstmReadout::OutputGate) {
    lstm.backward(trace.lstm, d_readout, {});
  } else {
    lstm.backward(trace.lstm, {}, d_readout);
  }
}

double LstmFcNet::min_abs_relu_preactivation(const Trace& trace) const {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t H = shape_.hidden_dim;
  if (shape_.gates == GateActivation::Relu) {
    for (std::size_t t = 0; t < trace.lstm.steps; ++t) {
      for (std::size_t k : {Lstm::kForget, Lstm::kInput, Lstm::kOutput}) {
        for (std::size_t u = 0; u < H; ++u) best = std::min(best, std::abs(trace.lstm.pre[t * 4 * H + k * H + u]));
      }
    }
  }
  for (std::size_t l = 0; l + 1 < trace.fc.pre.size(); ++l) {
    for (double v : trace.fc.pre[l]) best = std::min(best, std::abs(v));
  }
  return best;
}

void LstmFcNet::zero_grad() {
  lstm.zero_grad();
  fc.zero_grad();
}

std::vector<ParamRef> LstmFcNet::parameters(const std::string& prefix) {
  std::vector<ParamRef> out;
  lstm.append_parameters(out, prefix + "lstm.");
  fc.append_parameters(out, prefix + "fc.");
  return out;
}

}  // namespace gcabulf
