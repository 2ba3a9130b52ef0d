#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gcabulf/config.hpp"
#include "gcabulf/eval.hpp"
#include "gcabulf/filtering.hpp"
#include "gcabulf/grouping.hpp"
#include "gcabulf/ingest.hpp"
#include "gcabulf/layers.hpp"
#include "gcabulf/series.hpp"

namespace gcabulf {

/// Per-channel affine standardization fitted on the training split.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> scale;  // never zero

  /// Statistics of each channel over a set of row-major (rows x channels) values.
  static Scaler fit(std::span<const double> values, std::size_t channels);
  void apply(std::span<double> rows) const;
};

/// Standardization of one sub-network: inputs per channel, scalar target.
struct SubnetScaling {
  Scaler input;
  double target_mean = 0.0;
  double target_scale = 1.0;
};

struct EpochRecord {
  std::string component;  // "agg", "group0", ..., "joint"
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
};

/// g GroupNets + AggNet + CoPredictor and everything needed to rebuild their inputs.
struct ForecastModel {
  TrainConfig config;
  std::vector<ApplianceMeta> critical;  // in ranking order
  GroupingResult grouping;
  std::vector<LstmFcNet> group_nets;    // group_nets[i] reads grouping.groups[i] (ascending ids)
  LstmFcNet agg_net;
  FcStack co_predictor;                 // input [agg, group_1..group_g] in standardized units
  std::vector<SubnetScaling> group_scaling;
  SubnetScaling agg_scaling;
  TrainingHistory history;

  std::size_t group_count() const { return group_nets.size(); }
  std::size_t agg_channels() const { return config.agg_features == AggFeatures::Dwt ? kDwtBands : 1; }
};

/// Aligned training data. All datasets share sample positions and ordering.
struct PreparedData {
  WindowedDataset agg;                  // raw (unstandardized) features; target = total load
  std::vector<WindowedDataset> groups;  // target = group load sum
  SplitRanges split;
};

/// Everything build_model derives from the panel.
struct BuildResult {
  ForecastModel model;
  PreparedData data;
  ContributionTable table;
  FilterResult filter;
  DistanceMatrix distances;
};

/// Filtering -> grouping -> datasets, chronological splits, scalers, and seeded initialization.
BuildResult build_model(const AppliancePanel& panel, const TrainConfig& config);

/// Builds the aligned datasets for an already structured model (critical set and grouping fixed).
PreparedData prepare_data(const ForecastModel& model, const AppliancePanel& panel);

/// Stage 1: AggNet and every GroupNet trained independently with Adam on standardized MSE,
/// early stopping on validation loss with best-epoch restore.
void pretrain_components(ForecastModel& model, const PreparedData& data);

/// Stage 2: fresh CoPredictor trained jointly with the sub-networks (which move at
/// finetune_lr_scale x lr_stage2 unless frozen) against total-load MSE.
void finetune_collaborative(ForecastModel& model, const PreparedData& data);

/// build + pretrain + finetune.
BuildResult train_forecaster(const AppliancePanel& panel, const TrainConfig& config);

struct Forecast {
  double total_kw = 0.0;            // refined, clamped to >= 0
  double preliminary_kw = 0.0;      // AggNet alone, clamped to >= 0
  std::vector<double> group_kw;     // per-group forecasts
};

/// Forecast for position t using only panel samples [t - history, t).
Forecast predict_next(const ForecastModel& model, const AppliancePanel& panel, std::size_t t);

/// Forecasts for dataset samples [first, first + count).
std::vector<Forecast> predict_samples(const ForecastModel& model, const PreparedData& data, std::size_t first,
                                      std::size_t count);

struct EvaluationResult {
  MetricReport full;
  MetricReport preliminary;  // AggNet-only
  MetricReport persistence;
  std::vector<std::size_t> positions;
  std::vector<double> forecast_kw;
  std::vector<double> preliminary_kw;
  std::vector<double> actual_kw;
};

/// Metrics on the test split.
EvaluationResult evaluate_model(const ForecastModel& model, const PreparedData& data, const AppliancePanel& panel);

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const ForecastModel& model, const std::string& path);
ForecastModel load_checkpoint(const std::string& path);

}  // namespace gcabulf
