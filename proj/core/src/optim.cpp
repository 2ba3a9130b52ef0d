#include "gcabulf/optim.hpp"

#include <cmath>

#include "gcabulf/errors.hpp"

namespace gcabulf {

LossResult mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw UsageError("mse_loss: prediction and target sizes differ");
  if (pred.empty()) throw UsageError("mse_loss: empty batch");
  LossResult out;
  out.grad.resize(pred.size());
  const double n = static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double diff = pred[i] - target[i];
    out.loss += diff * diff;
    out.grad[i] = 2.0 * diff / n;
  }
  out.loss /= n;
  if (!std::isfinite(out.loss)) throw TrainingError("mse_loss: non-finite loss");
  return out;
}

AdamState make_adam_state(std::span<const ParamRef> params, const AdamConfig& config) {
  if (!(config.lr >= 0.0) || !(config.beta1 >= 0.0 && config.beta1 < 1.0) ||
      !(config.beta2 >= 0.0 && config.beta2 < 1.0) || !(config.eps > 0.0)) {
    throw UsageError("Adam: invalid hyperparameters");
  }
  AdamState s;
  s.config = config;
  for (const auto& p : params) {
    s.first_moment.emplace_back(p.value->rows(), p.value->cols());
    s.second_moment.emplace_back(p.value->rows(), p.value->cols());
  }
  return s;
}

void adam_step(AdamState& state, std::span<const ParamRef> params) {
  if (params.size() != state.first_moment.size()) throw UsageError("adam_step: parameter count changed");
  ++state.step;
  const auto& c = state.config;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t b = 0; b < params.size(); ++b) {
    Tensor2& value = *params[b].value;
    const Tensor2& grad = *params[b].grad;
    Tensor2& m = state.first_moment[b];
    Tensor2& v = state.second_moment[b];
    if (!value.same_shape(m) || !grad.same_shape(m)) throw UsageError("adam_step: shape mismatch in " + params[b].name);
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      value[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
  }
}

void zero_grads(std::span<const ParamRef> params) {
  for (const auto& p : params) p.grad->fill(0.0);
}

std::vector<Tensor2> snapshot(std::span<const ParamRef> params) {
  std::vector<Tensor2> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(*p.value);
  return out;
}

void restore(std::span<const ParamRef> params, const std::vector<Tensor2>& values) {
  if (values.size() != params.size()) throw UsageError("restore: snapshot size mismatch");
  for (std::size_t b = 0; b < params.size(); ++b) *params[b].value = values[b];
}

}  // namespace gcabulf
