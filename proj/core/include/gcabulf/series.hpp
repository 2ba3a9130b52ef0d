#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace gcabulf {

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

/// Uniform sampling grid: timestamp(i) = start + i * step (epoch seconds, UTC).
struct TimeIndex {
  std::int64_t start = 0;
  std::int64_t step = kSecondsPerHour;
  std::size_t len = 0;

  std::int64_t timestamp(std::size_t i) const { return start + static_cast<std::int64_t>(i) * step; }
  std::int64_t end() const { return timestamp(len); }

  /// Position of an exact grid timestamp, if it lies on the grid.
  std::optional<std::size_t> position(std::int64_t ts) const;

  bool operator==(const TimeIndex&) const = default;
};

/// Uniformly sampled load in kW with a per-sample validity mask.
///
/// Invalid samples always store 0.0 so that every stored value is finite.
class LoadSeries {
 public:
  LoadSeries() = default;
  /// Throws DataError if lengths disagree or a valid value is negative or non-finite.
  LoadSeries(TimeIndex index, std::vector<double> values, std::vector<std::uint8_t> mask);
  /// All samples valid.
  LoadSeries(TimeIndex index, std::vector<double> values);

  const TimeIndex& index() const { return index_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const std::uint8_t> mask() const { return mask_; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool valid(std::size_t i) const { return mask_[i] != 0; }
  std::size_t valid_count() const;

  /// Samples [first, first + count) on the matching sub-grid.
  LoadSeries slice(std::size_t first, std::size_t count) const;

 private:
  TimeIndex index_;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

struct RawSample {
  std::int64_t timestamp;  // epoch seconds
  double watts;
};

struct ResampleOptions {
  /// Nominal raw sampling period in seconds; inferred from the median spacing when unset.
  std::optional<double> sample_period_s;
  /// Minimum fraction of the hour that must be covered by raw samples.
  double min_coverage = 0.5;
};

/// Hourly means of raw (timestamp, watts) readings, converted to kW.
///
/// The output grid spans the first to the last wall-clock hour that contains a
/// sample. Hours whose raw coverage falls below `min_coverage` are masked.
LoadSeries resample_hourly(std::span<const RawSample> raw, const ResampleOptions& options = {});

/// Maps `series` onto `target` grid (same step, grid-aligned); positions with no source sample are invalid.
LoadSeries reindex(const LoadSeries& series, const TimeIndex& target);

/// (v - min) / (max - min). A constant input maps to all zeros.
std::vector<double> minmax_normalize(std::span<const double> values);

/// Same as above, but min/max are taken over valid entries only and invalid entries map to 0.
std::vector<double> minmax_normalize(std::span<const double> values, std::span<const std::uint8_t> mask);

/// Population mean and standard deviation over the valid samples.
struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};
Moments valid_moments(const LoadSeries& series);

inline constexpr std::size_t kContextDim = 31;

/// One-hot weekday (Monday = slot 0) followed by one-hot hour of day.
std::vector<double> context_features(std::int64_t timestamp, std::int64_t tz_offset_s = 0);

using ContextFn = std::function<std::vector<double>(std::int64_t)>;

/// Supervised samples, stored sample-major and strictly chronological.
struct WindowedDataset {
  std::size_t tau = 0;
  std::size_t channels = 0;
  std::size_t context_dim = 0;
  std::vector<double> inputs;          // num_samples x tau x channels
  std::vector<double> context;         // num_samples x context_dim
  std::vector<double> targets;         // kW
  std::vector<std::size_t> positions;  // target index t on the source grid
  std::vector<std::int64_t> timestamps;

  std::size_t size() const { return targets.size(); }
  std::span<const double> input(std::size_t s) const {
    return {inputs.data() + s * tau * channels, tau * channels};
  }
  std::span<const double> context_of(std::size_t s) const {
    return {context.data() + s * context_dim, context_dim};
  }
  /// Samples [first, first + count) as a new dataset.
  WindowedDataset subset(std::size_t first, std::size_t count) const;
};

/// One sample per t in [tau, m) whose input window [t - tau, t) and target t are all valid.
///
/// The input row for step j holds channels[c][t - tau + j]; the target is target[t].
WindowedDataset make_windows(std::span<const LoadSeries> channels, const LoadSeries& target,
                             const ContextFn& context_fn, std::size_t tau);

}  // namespace gcabulf
