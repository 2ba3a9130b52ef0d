#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "gcabulf/errors.hpp"
#include "gcabulf/eval.hpp"
#include "oracles.hpp"

using namespace gcabulf;

TEST_CASE("mae and mape") {
  const std::vector<double> p{1, 2}, a{2, 4};
  CHECK(mae(p, a) == 1.5);
  CHECK(mae(a, a) == 0.0);
  const auto m = mape(p, a);
  CHECK(m.value == 0.5);
  CHECK(m.n_evaluated == 2);
  CHECK(mape(a, a).value == 0.0);

  const std::vector<double> z{0.0, 4.0}, q{1.0, 2.0};
  const auto skipped = mape(q, z);
  CHECK(skipped.n_skipped == 1);
  CHECK(skipped.value == 0.5);
  const auto report = evaluate_forecasts(q, z);
  CHECK(report.n_skipped_zero_target == 1);
  CHECK(report.mae == 1.5);
  CHECK_THROWS_AS(mae(p, std::vector<double>{1.0}), UsageError);
}

TEST_CASE("metrics match brute force") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(20), a(20);
    for (auto& v : p) v = u(rng);
    for (auto& v : a) v = trial % 3 == 0 && u(rng) < 1.0 ? 0.0 : u(rng);
    std::size_t skipped = 0;
    CHECK(std::abs(mae(p, a) - oracle::mae(p, a)) < 1e-12);
    CHECK(std::abs(mape(p, a).value - oracle::mape(p, a, &skipped)) < 1e-12);
    CHECK(mape(p, a).n_skipped == skipped);
  }
}

TEST_CASE("chronological_split") {
  const auto s = chronological_split(100, SplitFractions{});
  CHECK(s.train_size() == 70);
  CHECK(s.val_size() == 15);
  CHECK(s.test_size() == 15);
  const auto all = chronological_split(50, SplitFractions{1.0, 0.0, 0.0});
  CHECK(all.train_size() == 50);
  CHECK(all.test_size() == 0);
  CHECK_THROWS_AS(chronological_split(10, SplitFractions{0.8, 0.3, 0.1}), UsageError);
}

TEST_CASE("persistence_forecast") {
  const auto p = fixtures::make_panel({{0.0, 1.0, 2.0, 3.0}}, 0.5);
  const std::vector<std::size_t> pos{1, 3};
  CHECK(persistence_forecast(p, pos) == std::vector<double>{0.5, 2.5});
}

TEST_CASE("ablation sweep") {
  std::vector<std::vector<double>> loads(2, std::vector<double>(24 * 8));
  for (std::size_t t = 0; t < loads[0].size(); ++t) {
    loads[0][t] = (t % 24 >= 7 && t % 24 < 9) ? 1.5 : 0.0;
    loads[1][t] = (t % 24 >= 18 && t % 24 < 22) ? 0.8 : 0.0;
  }
  const auto panel = fixtures::make_panel(loads);
  auto base = fixtures::small_config();
  base.epochs_stage1 = 1;
  base.epochs_stage2 = 1;
  base.seed = 100;
  base.workers = 2;
  SweepSpec sweep;
  sweep.taus = {4, 6};
  sweep.epsilons = {0.3, 0.9};
  const auto rows = run_ablation(panel, base, sweep);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].seed == 100 + i);
    CHECK(rows[i].report.has_value());
  }
  std::ostringstream csv;
  write_ablation_csv(rows, csv);
  std::string header;
  std::istringstream in(csv.str());
  std::getline(in, header);
  CHECK(header == "tau,epsilon,filter,seed,mae_kw,mape_pct,n_eval,n_skipped,status");

  const auto again = run_ablation(panel, base, sweep);
  std::ostringstream csv2;
  write_ablation_csv(again, csv2);
  CHECK(csv.str() == csv2.str());

  sweep.taus = {4, 5000};
  sweep.epsilons = {0.5};
  const auto partial = run_ablation(panel, base, sweep);
  REQUIRE(partial.size() == 2);
  CHECK(partial[0].report.has_value());
  CHECK_FALSE(partial[1].report.has_value());
  CHECK_FALSE(partial[1].error.empty());
}
