#include "gcabulf/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <string>

#include "gcabulf/errors.hpp"

namespace gcabulf {

UsageVector usage_vector(const LoadSeries& series) {
  double peak = 0.0;
  bool any = false;
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (!series.valid(t)) continue;
    peak = any ? std::max(peak, series[t]) : series[t];
    any = true;
  }
  if (!any || !(peak > 0.0)) throw DataError("usage_vector: series has no positive valid load");
  UsageVector u;
  u.threshold_kw = peak / 20.0;
  u.bits.resize(series.size(), 0.0);
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (series.valid(t) && series[t] > u.threshold_kw) u.bits[t] = 1.0;
  }
  return u;
}

namespace {

// Pearson correlation of x[xs..xs+n) against y[ys..ys+n) via centred sums.
double overlap_pearson(const double* x, const double* y, std::size_t n) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

LagCorrelation lag_correlation_scan(std::span<const double> x, std::span<const double> y, std::size_t max_lag) {
  if (x.size() != y.size()) {
    throw UsageError("lag_correlation: length mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  const std::size_t m = x.size();
  if (2 * max_lag >= m) throw UsageError("lag_correlation: max lag must be below half the series length");

  LagCorrelation best;
  bool have = false;
  const auto d = static_cast<long>(max_lag);
  for (long lag = -d; lag <= d; ++lag) {
    const std::size_t shift = static_cast<std::size_t>(std::labs(lag));
    const std::size_t n = m - shift;
    // x_t pairs with y_{t+lag}: for lag >= 0, t in [0, m - lag); otherwise t in [-lag, m).
    const double* xs = lag >= 0 ? x.data() : x.data() + shift;
    const double* ys = lag >= 0 ? y.data() + shift : y.data();
    const double c = overlap_pearson(xs, ys, n);
    const auto better = [&] {
      if (!have) return true;
      const double a = std::abs(c), b = std::abs(best.value);
      if (a != b) return a > b;
      const long al = std::labs(lag), bl = std::labs(best.lag);
      if (al != bl) return al < bl;
      return lag > best.lag;
    }();
    if (better) {
      best = {c, static_cast<int>(lag)};
      have = true;
    }
  }
  return best;
}

double lag_correlation(const UsageVector& x, const UsageVector& y, std::size_t max_lag) {
  return lag_correlation_scan(x.bits, y.bits, max_lag).value;
}

DistanceMatrix::DistanceMatrix(std::vector<int> ids, std::vector<double> data, std::size_t max_lag)
    : ids_(std::move(ids)), data_(std::move(data)), max_lag_(max_lag) {
  const std::size_t n = ids_.size();
  if (data_.size() != n * n) throw UsageError("distance matrix: data size does not match id count");
  for (std::size_t i = 0; i < n; ++i) {
    if (data_[i * n + i] != 0.0) throw UsageError("distance matrix: diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = data_[i * n + j];
      if (!(v >= 0.0 && v <= 1.0) || v != data_[j * n + i]) {
        throw UsageError("distance matrix: entries must be symmetric and within [0, 1]");
      }
    }
  }
}

DistanceMatrix correlation_distance_matrix(const std::vector<UsageVector>& vectors, const std::vector<int>& ids,
                                           std::size_t max_lag) {
  if (vectors.empty()) throw UsageError("correlation_distance_matrix: no usage vectors");
  if (ids.size() != vectors.size()) throw UsageError("correlation_distance_matrix: id count mismatch");
  const std::size_t n = vectors.size();
  std::vector<double> data(n * n, 0.0);
  std::vector<int> lags(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto c = lag_correlation_scan(vectors[i].bits, vectors[j].bits, max_lag);
      const double dist = 1.0 - std::abs(c.value);
      data[i * n + j] = data[j * n + i] = dist;
      lags[i * n + j] = c.lag;
      lags[j * n + i] = -c.lag;
    }
  }
  DistanceMatrix out(ids, std::move(data), max_lag);
  out.set_lags(std::move(lags));
  return out;
}

GroupingResult cluster_appliances(const DistanceMatrix& dist, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw UsageError("cluster_appliances: epsilon must lie in (0, 1]");
  const std::size_t n = dist.size();
  constexpr int kUnvisited = -1;
  std::vector<int> label(n, kUnvisited);
  int cluster = 0;

  // Standard DBSCAN expansion; with MinPts = 1 every visited point seeds or extends a cluster.
  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != kUnvisited) continue;
    label[p] = cluster;
    std::deque<std::size_t> frontier{p};
    while (!frontier.empty()) {
      const std::size_t q = frontier.front();
      frontier.pop_front();
      for (std::size_t r = 0; r < n; ++r) {
        if (label[r] == kUnvisited && dist(q, r) <= epsilon) {
          label[r] = cluster;
          frontier.push_back(r);
        }
      }
    }
    ++cluster;
  }

  GroupingResult out;
  out.epsilon = epsilon;
  out.groups.resize(static_cast<std::size_t>(cluster));
  for (std::size_t p = 0; p < n; ++p) out.groups[static_cast<std::size_t>(label[p])].push_back(dist.ids()[p]);
  for (auto& g : out.groups) std::sort(g.begin(), g.end());
  std::sort(out.groups.begin(), out.groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace gcabulf
