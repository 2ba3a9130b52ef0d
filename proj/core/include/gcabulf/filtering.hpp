#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gcabulf/ingest.hpp"

namespace gcabulf {

struct VolatilityScores {
  std::vector<double> raw_variance;  // kW^2, population variance over valid samples
  std::vector<double> vola;          // min-max normalized across appliances
};

struct PeriodicityScores {
  std::vector<double> raw_wgss;
  std::vector<double> period;  // 1 - minmax(raw_wgss)
  std::size_t days_used = 0;
};

struct ContributionRow {
  int id = 0;
  std::string name;
  double raw_variance = 0.0;
  double vola = 0.0;
  double raw_wgss = 0.0;
  double period = 0.0;
  double ctrb = 0.0;
};

/// Per-appliance scores sorted by ctrb descending (ties: larger raw variance, then smaller id).
struct ContributionTable {
  std::vector<ContributionRow> rows;
  double alpha = 0.5;
  std::size_t day_len = 24;
};

struct FilterResult {
  std::vector<int> critical_ids;          // in ranking order
  std::vector<double> residual_std_trace; // [0] = std(total), then after each subtraction
  double sigma = 0.0;                     // kW
  std::size_t clamp_count = 0;            // residual samples clamped up to 0
  LoadSeries residual;
};

VolatilityScores volatility_scores(const AppliancePanel& panel);

/// WGSS of each appliance's min-max normalized daily profiles of `day_len` samples.
///
/// A trailing partial day is ignored. Only days fully valid for every appliance are used,
/// so all appliances are compared on the same calendar. Requires at least two such days.
PeriodicityScores periodicity_scores(const AppliancePanel& panel, std::size_t day_len);

/// ctrb = vola + alpha * period, with 0 < alpha < 1.
ContributionTable contribution_rank(const AppliancePanel& panel, double alpha, std::size_t day_len);

/// Subtracts appliances from the total in table order until the residual standard deviation
/// drops below `sigma` (kW) or the table is exhausted.
FilterResult filter_critical(const AppliancePanel& panel, const ContributionTable& table, double sigma);

/// `filter_critical` with sigma = sigma_rel * std(total).
FilterResult filter_critical_relative(const AppliancePanel& panel, const ContributionTable& table, double sigma_rel);

}  // namespace gcabulf
