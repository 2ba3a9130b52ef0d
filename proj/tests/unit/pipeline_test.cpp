#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "fixtures.hpp"
#include "gcabulf/errors.hpp"
#include "gcabulf/pipeline.hpp"

using namespace gcabulf;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kDays = 10;

// Two linked pairs, two independent appliances.
std::vector<std::vector<double>> six_loads(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.3), often(0.6);
  const std::size_t m = 24 * kDays;
  std::vector<std::vector<double>> loads(6, std::vector<double>(m, 0.0));
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t h = t % 24;
    const bool morning = h >= 7 && h < 9 && often(rng);
    const bool evening = h >= 18 && h < 22;
    loads[0][t] = morning ? 2.0 : 0.0;
    loads[1][t] = morning ? 0.8 : 0.0;
    loads[2][t] = evening ? 0.3 : 0.0;
    loads[3][t] = evening ? 0.2 : 0.0;
    loads[4][t] = coin(rng) ? 0.1 : 0.0;
    loads[5][t] = h == 12 || coin(rng) ? 0.5 : 0.0;
  }
  return loads;
}

// Deterministic daily shapes, each with a small seeded amplitude wobble.
std::vector<std::vector<double>> daily_loads(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> wobble(0.9, 1.1);
  const std::size_t m = 24 * kDays;
  std::vector<std::vector<double>> loads(4, std::vector<double>(m, 0.0));
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t h = t % 24;
    loads[0][t] = h >= 7 && h < 9 ? 2.0 * wobble(rng) : 0.0;
    loads[1][t] = h >= 18 && h < 22 ? 0.6 * wobble(rng) : 0.0;
    loads[2][t] = h % 3 == 0 ? 0.15 * wobble(rng) : 0.0;
    loads[3][t] = h >= 12 && h < 14 ? 1.0 * wobble(rng) : 0.0;
  }
  return loads;
}

TrainConfig unfiltered() {
  auto c = fixtures::small_config();
  c.use_filtering = false;
  c.epsilon = 0.3;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  return fs::temp_directory_path() / ("gcabulf_unit_" + name + "_" + std::to_string(::getpid()));
}

}  // namespace

TEST_CASE("build_model groups linked pairs") {
  const auto panel = fixtures::make_panel(six_loads(1));
  const auto built = build_model(panel, unfiltered());
  CHECK(built.model.critical.size() == 6);
  CHECK(built.model.group_count() == 4);
  CHECK(built.model.grouping.groups[0] == std::vector<int>{1, 2});
  CHECK(built.model.grouping.groups[1] == std::vector<int>{3, 4});
  CHECK(built.data.groups.size() == 4);
  CHECK(built.data.agg.size() == built.data.groups[0].size());
  CHECK(built.data.agg.positions == built.data.groups[3].positions);
  CHECK(built.data.agg.positions.front() == unfiltered().history());
}

TEST_CASE("build_model preconditions") {
  const auto panel = fixtures::make_panel(six_loads(1));
  auto c = unfiltered();
  c.tau = 24 * kDays;
  c.buffer_len = c.tau;
  CHECK_THROWS_AS(build_model(panel, c), DataError);
  c = unfiltered();
  c.buffer_len = 8;
  CHECK_THROWS_AS(build_model(panel, c), UsageError);
}

TEST_CASE("initialization and training are deterministic") {
  const auto panel = fixtures::make_panel(six_loads(2));
  const auto a = build_model(panel, unfiltered());
  const auto b = build_model(panel, unfiltered());
  CHECK(a.model.agg_net.lstm.weights == b.model.agg_net.lstm.weights);
  CHECK(a.model.group_nets[1].fc.weights == b.model.group_nets[1].fc.weights);

  const auto ta = train_forecaster(panel, unfiltered());
  const auto tb = train_forecaster(panel, unfiltered());
  CHECK(ta.model.co_predictor.weights == tb.model.co_predictor.weights);
  CHECK(ta.model.agg_net.lstm.weights == tb.model.agg_net.lstm.weights);
}

TEST_CASE("zero epochs leave parameters unchanged") {
  const auto panel = fixtures::make_panel(six_loads(3));
  auto c = unfiltered();
  c.epochs_stage1 = 0;
  auto built = build_model(panel, c);
  const auto before = built.model.agg_net.lstm.weights;
  pretrain_components(built.model, built.data);
  CHECK(built.model.agg_net.lstm.weights == before);
}

TEST_CASE("early stopping records at most the configured epochs") {
  const auto panel = fixtures::make_panel(six_loads(4));
  auto c = unfiltered();
  c.epochs_stage1 = 30;
  c.patience = 2;
  auto built = build_model(panel, c);
  pretrain_components(built.model, built.data);
  std::size_t agg_epochs = 0;
  double best = INFINITY;
  for (const auto& e : built.model.history.epochs) {
    if (e.component != "agg") continue;
    ++agg_epochs;
    best = std::min(best, e.val_loss);
  }
  CHECK(agg_epochs >= 1);
  CHECK(agg_epochs <= 30);
}

TEST_CASE("stage one at least halves every subnet's training loss") {
  std::map<std::string, std::vector<double>> ratios;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto panel = fixtures::make_panel(daily_loads(seed));
    auto c = unfiltered();
    c.epochs_stage1 = 50;
    c.patience = 50;
    c.lr_stage1 = 3e-3;
    c.seed = seed;
    auto built = build_model(panel, c);
    pretrain_components(built.model, built.data);
    std::map<std::string, std::pair<double, double>> first_last;
    for (const auto& e : built.model.history.epochs) {
      auto [it, fresh] = first_last.try_emplace(e.component, e.train_loss, e.train_loss);
      if (!fresh) it->second.second = e.train_loss;
    }
    for (const auto& [name, fl] : first_last) ratios[name].push_back(fl.second / fl.first);
  }
  for (auto& [name, r] : ratios) {
    std::sort(r.begin(), r.end());
    CAPTURE(name);
    CHECK(r[r.size() / 2] <= 0.5);
  }
}

TEST_CASE("collaborative refiner without groups") {
  const auto panel = fixtures::make_panel(six_loads(6));
  auto built = build_model(panel, unfiltered());
  auto& m = built.model;
  m.group_nets.clear();
  m.group_scaling.clear();
  m.grouping.groups.clear();
  m.co_predictor = FcStack({1, 4, 1});
  const auto data = prepare_data(m, panel);
  CHECK(data.groups.empty());
  pretrain_components(m, data);
  finetune_collaborative(m, data);
  const auto f = predict_next(m, panel, panel.size() - 1);
  CHECK(f.total_kw >= 0.0);
  CHECK(f.group_kw.empty());
}

TEST_CASE("predict_next is causal") {
  auto loads = six_loads(7);
  const auto panel = fixtures::make_panel(loads);
  const auto trained = train_forecaster(panel, unfiltered());
  const std::size_t t = panel.size() - 30;
  const auto base = predict_next(trained.model, panel, t);
  for (auto& l : loads) {
    for (std::size_t k = t; k < l.size(); ++k) l[k] = 3.0 - l[k];
  }
  const auto mutated = predict_next(trained.model, fixtures::make_panel(loads), t);
  CHECK(mutated.total_kw == base.total_kw);
  CHECK(mutated.preliminary_kw == base.preliminary_kw);
  CHECK(mutated.group_kw == base.group_kw);
  CHECK_THROWS_AS(predict_next(trained.model, panel, 5), DataError);

  std::vector<std::vector<double>> zeros(6, std::vector<double>(panel.size(), 0.0));
  const auto zero = predict_next(trained.model, fixtures::make_panel(zeros, 0.0), t);
  CHECK(zero.total_kw >= 0.0);
  CHECK(zero.preliminary_kw >= 0.0);
}

TEST_CASE("evaluation on the test split") {
  const auto panel = fixtures::make_panel(six_loads(8));
  const auto trained = train_forecaster(panel, unfiltered());
  const auto r = evaluate_model(trained.model, trained.data, panel);
  CHECK(r.positions.size() == trained.data.split.test_size());
  CHECK(r.positions.front() > trained.data.agg.positions[trained.data.split.val_end - 1]);
  CHECK(r.full.n_evaluated + r.full.n_skipped_zero_target == r.positions.size());
  for (double v : r.forecast_kw) CHECK(v >= 0.0);
}

TEST_CASE("checkpoint round trip") {
  const auto panel = fixtures::make_panel(six_loads(9));
  auto c = unfiltered();
  c.gates = GateActivation::Relu;
  const auto trained = train_forecaster(panel, c);
  const auto dir = scratch("ckpt");
  fs::create_directories(dir);
  const auto first = (dir / "a.ckpt").string();
  const auto second = (dir / "b.ckpt").string();

  save_checkpoint(trained.model, first);
  const auto loaded = load_checkpoint(first);
  save_checkpoint(loaded, second);
  CHECK(slurp(first) == slurp(second));
  CHECK(loaded.config.gates == GateActivation::Relu);
  CHECK(loaded.grouping.groups == trained.model.grouping.groups);
  CHECK(loaded.history.epochs.size() == trained.model.history.epochs.size());

  for (std::size_t t : {panel.size() - 1, panel.size() - 20}) {
    const auto a = predict_next(trained.model, panel, t);
    const auto b = predict_next(loaded, panel, t);
    CHECK(a.total_kw == b.total_kw);
    CHECK(a.group_kw == b.group_kw);
  }

  const auto bytes = slurp(first);
  const auto cut = (dir / "cut.ckpt").string();
  for (std::size_t keep : {std::size_t{10}, bytes.size() / 2, bytes.size() - 3}) {
    std::ofstream(cut, std::ios::binary) << bytes.substr(0, keep);
    CHECK_THROWS_AS(load_checkpoint(cut), DataError);
  }
  auto wrong = bytes;
  wrong.replace(wrong.find("version=1"), 9, "version=9");
  std::ofstream(cut, std::ios::binary) << wrong;
  CHECK_THROWS_AS(load_checkpoint(cut), DataError);
  CHECK_THROWS_AS(load_checkpoint((dir / "missing.ckpt").string()), DataError);
  fs::remove_all(dir);
}

TEST_CASE("deterministic daily pattern is forecast closely") {
  std::vector<std::vector<double>> loads(2, std::vector<double>(24 * 14));
  for (std::size_t t = 0; t < loads[0].size(); ++t) {
    const std::size_t h = t % 24;
    loads[0][t] = h >= 7 && h < 9 ? 2.0 : 0.0;
    loads[1][t] = h >= 17 && h < 22 ? 0.6 + 0.1 * static_cast<double>(h - 17) : 0.0;
  }
  const auto panel = fixtures::make_panel(loads, 0.3);
  auto c = unfiltered();
  c.hidden_dim = 8;
  c.fc_hidden = {16};
  c.epochs_stage1 = 60;
  c.epochs_stage2 = 30;
  c.patience = 15;
  c.lr_stage1 = 1e-2;
  c.lr_stage2 = 3e-3;
  const auto trained = train_forecaster(panel, c);
  const auto r = evaluate_model(trained.model, trained.data, panel);
  CHECK(r.full.mape < 0.10);
}
