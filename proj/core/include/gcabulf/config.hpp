#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gcabulf/dwt.hpp"
#include "gcabulf/layers.hpp"

namespace gcabulf {

enum class AggFeatures {
  Dwt,  // 5 wavelet bands from a causal trailing buffer
  Raw,  // the total load itself
};

std::string to_string(AggFeatures f);
AggFeatures agg_features_from_string(const std::string& s);

struct SplitFractions {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

/// Every knob of the filtering -> grouping -> two-stage training flow.
struct TrainConfig {
  // Windowing and analysis
  std::size_t tau = 12;
  double alpha = 0.5;
  double sigma_rel = 0.15;
  double epsilon = 0.92;
  std::size_t delta = 6;
  std::size_t day_len = 24;
  bool use_filtering = true;

  // Networks
  std::size_t hidden_dim = 64;
  std::vector<std::size_t> fc_hidden{64, 32};
  std::vector<std::size_t> co_hidden{16};
  GateActivation gates = GateActivation::Sigmoid;
  LstmReadout readout = LstmReadout::OutputGate;
  AggFeatures agg_features = AggFeatures::Dwt;
  WaveletFamily wavelet = WaveletFamily::Haar;
  std::size_t buffer_len = 128;

  // Training
  double lr_stage1 = 1e-3;
  double lr_stage2 = 1e-3;
  double finetune_lr_scale = 0.1;
  bool freeze_subnets = false;
  std::size_t epochs_stage1 = 100;
  std::size_t epochs_stage2 = 50;
  std::size_t batch_size = 64;
  std::size_t patience = 10;
  std::uint64_t seed = 42;
  SplitFractions split;

  // Runtime
  std::int64_t tz_offset_s = 0;
  std::size_t workers = 1;

  /// Warm-up before the first forecastable position, max(buffer_len, tau). Both aggregate
  /// feature modes share it so their sample sets coincide.
  std::size_t history() const;
};

/// Throws UsageError describing the first invalid field.
void validate(const TrainConfig& config);

/// Canonical key=value rendering, in a fixed order. Reals use shortest round-trip form.
std::vector<std::pair<std::string, std::string>> to_key_values(const TrainConfig& config);

/// Sets one field from its textual form; unknown keys and malformed values throw UsageError.
void set_config_value(TrainConfig& config, const std::string& key, const std::string& value);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_real(double v);

}  // namespace gcabulf
