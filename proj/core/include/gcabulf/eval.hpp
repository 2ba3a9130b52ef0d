#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcabulf/config.hpp"
#include "gcabulf/ingest.hpp"

namespace gcabulf {

/// Targets with |actual| below this are left out of MAPE.
inline constexpr double kMapeZeroTargetKw = 1e-6;

struct MetricReport {
  double mae = 0.0;   // kW, over every point
  double mape = 0.0;  // fraction, over points with a nonzero target
  std::size_t n_evaluated = 0;
  std::size_t n_skipped_zero_target = 0;
};

double mae(std::span<const double> pred, std::span<const double> actual);

struct MapeResult {
  double value = 0.0;
  std::size_t n_evaluated = 0;
  std::size_t n_skipped = 0;
};
MapeResult mape(std::span<const double> pred, std::span<const double> actual);

MetricReport evaluate_forecasts(std::span<const double> pred, std::span<const double> actual);

/// Contiguous [begin, end) ranges; train precedes validation precedes test.
struct SplitRanges {
  std::size_t train_end = 0;
  std::size_t val_end = 0;
  std::size_t test_end = 0;

  std::size_t train_size() const { return train_end; }
  std::size_t val_size() const { return val_end - train_end; }
  std::size_t test_size() const { return test_end - val_end; }
};

/// Sizes are round(n * train) and round(n * val); the test split takes the remainder.
SplitRanges chronological_split(std::size_t n, const SplitFractions& fractions);

/// Forecasts equal to the previous hour's observed total.
std::vector<double> persistence_forecast(const AppliancePanel& panel, std::span<const std::size_t> positions);

struct SweepSpec {
  std::vector<double> epsilons;
  std::vector<std::size_t> taus;
  std::vector<bool> filters{true};
};

struct AblationRow {
  std::size_t tau = 0;
  double epsilon = 0.0;
  bool filter = true;
  std::uint64_t seed = 0;
  std::optional<MetricReport> report;
  std::string error;  // set when the cell failed
};

/// Trains and tests one model per (tau, epsilon, filter) cell; cell i uses seed base_seed + i.
/// A failing cell is recorded and the sweep continues.
std::vector<AblationRow> run_ablation(const AppliancePanel& panel, const TrainConfig& base, const SweepSpec& sweep);

/// Columns: tau,epsilon,filter,seed,mae_kw,mape_pct,n_eval,n_skipped,status
void write_ablation_csv(const std::vector<AblationRow>& rows, std::ostream& out);

}  // namespace gcabulf
