#include "gcabulf/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "gcabulf/errors.hpp"

namespace gcabulf {

std::optional<std::size_t> TimeIndex::position(std::int64_t ts) const {
  if (ts < start) return std::nullopt;
  const std::int64_t offset = ts - start;
  if (offset % step != 0) return std::nullopt;
  const auto pos = static_cast<std::size_t>(offset / step);
  if (pos >= len) return std::nullopt;
  return pos;
}

LoadSeries::LoadSeries(TimeIndex index, std::vector<double> values, std::vector<std::uint8_t> mask)
    : index_(index), values_(std::move(values)), mask_(std::move(mask)) {
  if (index_.step <= 0) throw DataError("time index step must be positive");
  if (values_.size() != index_.len || mask_.size() != index_.len) {
    throw DataError("series length mismatch: index " + std::to_string(index_.len) + ", values " +
                    std::to_string(values_.size()) + ", mask " + std::to_string(mask_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!mask_[i]) {
      values_[i] = 0.0;
      continue;
    }
    mask_[i] = 1;
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw DataError("invalid load value at index " + std::to_string(i));
    }
  }
}

LoadSeries::LoadSeries(TimeIndex index, std::vector<double> values)
    : LoadSeries(index, std::move(values), std::vector<std::uint8_t>(index.len, 1)) {}

std::size_t LoadSeries::valid_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

LoadSeries LoadSeries::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw DataError("slice out of range");
  TimeIndex idx{index_.timestamp(first), index_.step, count};
  return LoadSeries(idx, std::vector<double>(values_.begin() + first, values_.begin() + first + count),
                    std::vector<std::uint8_t>(mask_.begin() + first, mask_.begin() + first + count));
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double median_spacing(std::span<const RawSample> raw) {
  std::vector<std::int64_t> gaps;
  gaps.reserve(raw.size());
  for (std::size_t i = 1; i < raw.size(); ++i) {
    const auto gap = raw[i].timestamp - raw[i - 1].timestamp;
    if (gap > 0) gaps.push_back(gap);
  }
  if (gaps.empty()) return static_cast<double>(kSecondsPerHour);
  auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
  std::nth_element(gaps.begin(), mid, gaps.end());
  return static_cast<double>(std::min<std::int64_t>(*mid, kSecondsPerHour));
}

}  // namespace

LoadSeries resample_hourly(std::span<const RawSample> raw, const ResampleOptions& options) {
  if (raw.empty()) throw DataError("resample_hourly: empty input");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i].watts)) {
      throw DataError("resample_hourly: non-finite value at index " + std::to_string(i));
    }
    if (i > 0 && raw[i].timestamp < raw[i - 1].timestamp) {
      throw DataError("resample_hourly: timestamps decrease at index " + std::to_string(i));
    }
  }
  const double period = options.sample_period_s.value_or(median_spacing(raw));
  if (!(period > 0.0)) throw UsageError("resample_hourly: sample period must be positive");

  const std::int64_t first_hour = floor_div(raw.front().timestamp, kSecondsPerHour);
  const std::int64_t last_hour = floor_div(raw.back().timestamp, kSecondsPerHour);
  const auto len = static_cast<std::size_t>(last_hour - first_hour + 1);

  std::vector<double> sums(len, 0.0);
  std::vector<std::size_t> counts(len, 0);
  for (const auto& s : raw) {
    const auto h = static_cast<std::size_t>(floor_div(s.timestamp, kSecondsPerHour) - first_hour);
    sums[h] += s.watts;
    ++counts[h];
  }

  std::vector<double> values(len, 0.0);
  std::vector<std::uint8_t> mask(len, 0);
  for (std::size_t h = 0; h < len; ++h) {
    if (counts[h] == 0) continue;
    const double coverage = static_cast<double>(counts[h]) * period / static_cast<double>(kSecondsPerHour);
    const double kw = sums[h] / static_cast<double>(counts[h]) / 1000.0;
    // Negative means only arise from meter offsets; they are not trusted as loads.
    if (coverage + 1e-12 >= options.min_coverage && kw >= 0.0) {
      values[h] = kw;
      mask[h] = 1;
    }
  }
  return LoadSeries(TimeIndex{first_hour * kSecondsPerHour, kSecondsPerHour, len}, std::move(values),
                    std::move(mask));
}

LoadSeries reindex(const LoadSeries& series, const TimeIndex& target) {
  if (series.index().step != target.step) throw DataError("reindex: step mismatch");
  std::vector<double> values(target.len, 0.0);
  std::vector<std::uint8_t> mask(target.len, 0);
  const auto& src = series.index();
  for (std::size_t i = 0; i < target.len; ++i) {
    if (auto pos = src.position(target.timestamp(i)); pos && series.valid(*pos)) {
      values[i] = series[*pos];
      mask[i] = 1;
    }
  }
  return LoadSeries(target, std::move(values), std::move(mask));
}

std::vector<double> minmax_normalize(std::span<const double> values) {
  const std::vector<std::uint8_t> mask(values.size(), 1);
  return minmax_normalize(values, mask);
}

std::vector<double> minmax_normalize(std::span<const double> values, std::span<const std::uint8_t> mask) {
  if (mask.size() != values.size()) throw UsageError("minmax_normalize: mask length mismatch");
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask[i]) continue;
    if (!any) {
      lo = hi = values[i];
      any = true;
    } else {
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
    }
  }
  if (!any) throw DataError("minmax_normalize: no valid values");
  std::vector<double> out(values.size(), 0.0);
  if (hi == lo) return out;
  const double range = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i]) out[i] = (values[i] - lo) / range;
  }
  return out;
}

Moments valid_moments(const LoadSeries& series) {
  Moments m;
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.valid(i)) {
      sum += series[i];
      ++m.count;
    }
  }
  if (m.count == 0) return m;
  m.mean = sum / static_cast<double>(m.count);
  double ss = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.valid(i)) ss += (series[i] - m.mean) * (series[i] - m.mean);
  }
  m.stddev = std::sqrt(ss / static_cast<double>(m.count));
  return m;
}

std::vector<double> context_features(std::int64_t timestamp, std::int64_t tz_offset_s) {
  const std::int64_t local = timestamp + tz_offset_s;
  const std::int64_t days = floor_div(local, kSecondsPerDay);
  const std::int64_t seconds_of_day = local - days * kSecondsPerDay;
  // 1970-01-01 was a Thursday (slot 3 with Monday = 0).
  const auto weekday = static_cast<std::size_t>(((days + 3) % 7 + 7) % 7);
  const auto hour = static_cast<std::size_t>(seconds_of_day / kSecondsPerHour);
  std::vector<double> out(kContextDim, 0.0);
  out[weekday] = 1.0;
  out[7 + hour] = 1.0;
  return out;
}

WindowedDataset WindowedDataset::subset(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw UsageError("dataset subset out of range");
  WindowedDataset out;
  out.tau = tau;
  out.channels = channels;
  out.context_dim = context_dim;
  const std::size_t row = tau * channels;
  out.inputs.assign(inputs.begin() + static_cast<std::ptrdiff_t>(first * row),
                    inputs.begin() + static_cast<std::ptrdiff_t>((first + count) * row));
  out.context.assign(context.begin() + static_cast<std::ptrdiff_t>(first * context_dim),
                     context.begin() + static_cast<std::ptrdiff_t>((first + count) * context_dim));
  out.targets.assign(targets.begin() + static_cast<std::ptrdiff_t>(first),
                     targets.begin() + static_cast<std::ptrdiff_t>(first + count));
  out.positions.assign(positions.begin() + static_cast<std::ptrdiff_t>(first),
                       positions.begin() + static_cast<std::ptrdiff_t>(first + count));
  out.timestamps.assign(timestamps.begin() + static_cast<std::ptrdiff_t>(first),
                        timestamps.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

WindowedDataset make_windows(std::span<const LoadSeries> channels, const LoadSeries& target,
                             const ContextFn& context_fn, std::size_t tau) {
  if (tau == 0) throw UsageError("make_windows: tau must be positive");
  const TimeIndex& idx = target.index();
  const std::size_t m = idx.len;
  if (tau >= m) {
    throw DataError("make_windows: tau (" + std::to_string(tau) + ") must be smaller than series length (" +
                    std::to_string(m) + ")");
  }
  for (const auto& ch : channels) {
    if (!(ch.index() == idx)) throw DataError("make_windows: channel index does not match target index");
  }

  WindowedDataset ds;
  ds.tau = tau;
  ds.channels = channels.size();

  // Length of the run of valid samples (across all channels) ending at i.
  std::vector<std::size_t> run(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    bool ok = true;
    for (const auto& ch : channels) ok = ok && ch.valid(i);
    run[i] = ok ? (i > 0 ? run[i - 1] + 1 : 1) : 0;
  }

  for (std::size_t t = tau; t < m; ++t) {
    if (!target.valid(t) || run[t - 1] < tau) continue;
    for (std::size_t j = 0; j < tau; ++j) {
      for (const auto& ch : channels) ds.inputs.push_back(ch[t - tau + j]);
    }
    const std::int64_t ts = idx.timestamp(t);
    if (context_fn) {
      auto ctx = context_fn(ts);
      if (ds.positions.empty()) {
        ds.context_dim = ctx.size();
      } else if (ctx.size() != ds.context_dim) {
        throw UsageError("make_windows: context function returned inconsistent widths");
      }
      ds.context.insert(ds.context.end(), ctx.begin(), ctx.end());
    }
    ds.targets.push_back(target[t]);
    ds.positions.push_back(t);
    ds.timestamps.push_back(ts);
  }
  return ds;
}

}  // namespace gcabulf
