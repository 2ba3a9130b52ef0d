#pragma once

#include <random>
#include <string>
#include <vector>

#include "gcabulf/ingest.hpp"
#include "gcabulf/pipeline.hpp"

namespace fixtures {

inline constexpr std::int64_t kMonday = 1357516800;  // 2013-01-07T00:00:00Z

/// Panel whose total is base + sum of the appliance loads.
inline gcabulf::AppliancePanel make_panel(const std::vector<std::vector<double>>& loads, double base = 0.1) {
  const std::size_t m = loads.empty() ? 0 : loads[0].size();
  gcabulf::TimeIndex index{kMonday, gcabulf::kSecondsPerHour, m};
  std::vector<double> total(m, base);
  std::vector<gcabulf::ApplianceMeta> meta;
  std::vector<gcabulf::LoadSeries> series;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    for (std::size_t t = 0; t < m; ++t) total[t] += loads[i][t];
    meta.push_back({static_cast<int>(i) + 1, "a" + std::to_string(i + 1)});
    series.emplace_back(index, loads[i]);
  }
  return gcabulf::AppliancePanel(meta, series, gcabulf::LoadSeries(index, total));
}

/// Small network and training budget for fast pipeline tests.
inline gcabulf::TrainConfig small_config() {
  gcabulf::TrainConfig c;
  c.tau = 6;
  c.hidden_dim = 6;
  c.fc_hidden = {8};
  c.co_hidden = {4};
  c.buffer_len = 48;
  c.epochs_stage1 = 3;
  c.epochs_stage2 = 2;
  c.batch_size = 32;
  c.epsilon = 0.5;
  return c;
}

}  // namespace fixtures
