#include "gcabulf/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcabulf/errors.hpp"
#include "gcabulf/optim.hpp"

namespace gcabulf {

bool GradCheckReport::passed() const { return failures().empty(); }

std::vector<std::string> GradCheckReport::failures() const {
  std::vector<std::string> out;
  for (const auto& b : blocks) {
    if (!(b.max_rel_error <= tolerance)) out.push_back(b.name);
  }
  return out;
}

double GradCheckReport::worst() const {
  double w = 0.0;
  for (const auto& b : blocks) w = std::max(w, b.max_rel_error);
  return w;
}

GradCheckReport grad_check(const GradCheckProblem& problem, double tolerance, double step) {
  GradCheckReport report;
  report.tolerance = tolerance;
  if (problem.params.empty()) return report;

  zero_grads(problem.params);
  problem.compute_gradients();

  for (const auto& p : problem.params) {
    GradCheckBlock block{p.name, p.value->size(), 0.0};
    for (std::size_t i = 0; i < p.value->size(); ++i) {
      double& w = (*p.value)[i];
      const double saved = w;
      w = saved + step;
      const double up = problem.loss();
      w = saved - step;
      const double down = problem.loss();
      w = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = (*p.grad)[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      block.max_rel_error = std::max(block.max_rel_error, std::abs(analytic - numeric) / denom);
    }
    report.blocks.push_back(block);
  }
  return report;
}

GradCheckReport check_lstm_fc_gradients(const LstmFcCheckSetup& setup, std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& shape = setup.shape;
  const std::size_t window = setup.steps * shape.input_dim;

  LstmFcNet net(shape);
  std::vector<double> inputs, contexts, targets;
  for (int attempt = 0;; ++attempt) {
    if (attempt > setup.max_redraws) throw TrainingError("grad check: could not draw a kink-free configuration");
    net.init(rng);
    // Perturb biases away from their deterministic init so every block carries signal.
    for (auto& b : net.lstm.biases) {
      for (auto& v : b.data()) v += 0.3 * normal(rng);
    }
    for (auto& b : net.fc.biases) {
      for (auto& v : b.data()) v += 0.3 * normal(rng);
    }
    inputs.resize(setup.batch * window);
    contexts.resize(setup.batch * shape.context_dim);
    targets.resize(setup.batch);
    for (auto& v : inputs) v = normal(rng);
    for (auto& v : contexts) v = normal(rng);
    for (auto& v : targets) v = normal(rng);

    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < setup.batch; ++s) {
      LstmFcNet::Trace tr;
      net.forward({inputs.data() + s * window, window}, setup.steps,
                  {contexts.data() + s * shape.context_dim, shape.context_dim}, &tr);
      margin = std::min(margin, net.min_abs_relu_preactivation(tr));
    }
    if (margin >= setup.kink_margin) break;
  }

  auto sample_input = [&](std::size_t s) { return std::span<const double>(inputs.data() + s * window, window); };
  auto sample_context = [&](std::size_t s) {
    return std::span<const double>(contexts.data() + s * shape.context_dim, shape.context_dim);
  };

  GradCheckProblem problem;
  problem.params = net.parameters();
  problem.loss = [&] {
    std::vector<double> pred(setup.batch);
    for (std::size_t s = 0; s < setup.batch; ++s) pred[s] = net.forward(sample_input(s), setup.steps, sample_context(s));
    return mse_loss(pred, targets).loss;
  };
  problem.compute_gradients = [&] {
    std::vector<LstmFcNet::Trace> traces(setup.batch);
    std::vector<double> pred(setup.batch);
    for (std::size_t s = 0; s < setup.batch; ++s) {
      pred[s] = net.forward(sample_input(s), setup.steps, sample_context(s), &traces[s]);
    }
    const auto loss = mse_loss(pred, targets);
    for (std::size_t s = 0; s < setup.batch; ++s) net.backward(traces[s], loss.grad[s]);
  };
  return grad_check(problem, tolerance);
}

}  // namespace gcabulf
