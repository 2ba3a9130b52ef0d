#pragma once

#include <cstddef>
#include <vector>

#include "gcabulf/series.hpp"

namespace gcabulf {

/// On/off indicator: bit t is set iff the sample is valid and load > max(valid loads) / 20.
struct UsageVector {
  std::vector<double> bits;  // 0.0 / 1.0, kept as doubles for the correlation kernels
  double threshold_kw = 0.0;

  std::size_t size() const { return bits.size(); }
};

UsageVector usage_vector(const LoadSeries& series);

struct LagCorrelation {
  double value = 0.0;  // Pearson correlation at the selected lag, in [-1, 1]
  int lag = 0;         // y is read at t + lag
};

/// Pearson correlation of x_t against y_{t+lag} over the overlapping region, scanned over
/// lag in [-max_lag, max_lag]. The lag with the largest |correlation| wins; ties go to the
/// smaller |lag|, then to the positive lag. A lag whose overlap has zero variance in either
/// series scores 0.
LagCorrelation lag_correlation_scan(std::span<const double> x, std::span<const double> y, std::size_t max_lag);

double lag_correlation(const UsageVector& x, const UsageVector& y, std::size_t max_lag);

/// Symmetric matrix of corr(i, j) = 1 - |C_delta(U_i, U_j)| with an exact zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<int> ids, std::vector<double> data, std::size_t max_lag);

  std::size_t size() const { return ids_.size(); }
  const std::vector<int>& ids() const { return ids_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * ids_.size() + j]; }
  std::size_t max_lag() const { return max_lag_; }
  /// Best lag per pair (row-major, same layout as the distances).
  const std::vector<int>& lags() const { return lags_; }
  void set_lags(std::vector<int> lags) { lags_ = std::move(lags); }

 private:
  std::vector<int> ids_;
  std::vector<double> data_;
  std::vector<int> lags_;
  std::size_t max_lag_ = 0;
};

DistanceMatrix correlation_distance_matrix(const std::vector<UsageVector>& vectors, const std::vector<int>& ids,
                                           std::size_t max_lag);

struct GroupingResult {
  /// Each group lists appliance ids ascending; groups are ordered by their smallest id.
  std::vector<std::vector<int>> groups;
  double epsilon = 0.0;

  std::size_t group_count() const { return groups.size(); }
};

/// DBSCAN with MinPts = 1 over a precomputed distance matrix: every point is a core point,
/// so clusters are the connected components of the graph with edges where distance <= epsilon.
GroupingResult cluster_appliances(const DistanceMatrix& dist, double epsilon);

}  // namespace gcabulf
