#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gcabulf/errors.hpp"
#include "gcabulf/grouping.hpp"
#include "oracles.hpp"

using namespace gcabulf;

namespace {

LoadSeries series(std::vector<double> v) {
  const TimeIndex idx{0, kSecondsPerHour, v.size()};
  return LoadSeries(idx, std::move(v));
}

DistanceMatrix matrix3(double ab, double bc, double ac) {
  return DistanceMatrix({1, 2, 3}, {0, ab, ac, ab, 0, bc, ac, bc, 0}, 0);
}

}  // namespace

TEST_CASE("usage_vector") {
  const auto u = usage_vector(series({0, 0.5, 10, 9}));
  CHECK(u.threshold_kw == 0.5);
  CHECK(u.bits == std::vector<double>{0, 0, 1, 1});
  CHECK(usage_vector(series({4, 4, 4})).bits == std::vector<double>{1, 1, 1});
  CHECK_THROWS_AS(usage_vector(series({0, 0, 0})), DataError);
  const LoadSeries masked(TimeIndex{0, kSecondsPerHour, 3}, {2, 0, 2}, {1, 0, 1});
  CHECK(usage_vector(masked).bits == std::vector<double>{1, 0, 1});
}

TEST_CASE("lag correlation") {
  const std::vector<double> x{0, 0, 1, 1, 0, 0, 0, 0};
  const std::vector<double> y{0, 0, 0, 1, 1, 0, 0, 0};
  const auto self = lag_correlation_scan(x, x, 0);
  CHECK(self.value == doctest::Approx(1.0));
  const auto shifted = lag_correlation_scan(x, y, 2);
  CHECK(shifted.value == doctest::Approx(1.0));
  CHECK(shifted.lag == 1);
  const auto back = lag_correlation_scan(y, x, 2);
  CHECK(back.lag == -1);
  const std::vector<double> flat(8, 1.0);
  CHECK(lag_correlation_scan(x, flat, 3).value == 0.0);
}

TEST_CASE("lag correlation matches brute force") {
  std::mt19937_64 rng(17);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(60), y(60);
    for (auto& v : x) v = coin(rng) ? 1.0 : 0.0;
    for (auto& v : y) v = coin(rng) ? 1.0 : 0.0;
    const auto ref = oracle::lag_scan(x, y, 4);
    const auto got = lag_correlation_scan(x, y, 4);
    CHECK(got.value == doctest::Approx(ref.value).epsilon(1e-10));
    if (ref.runner_up_gap > 1e-9) CHECK(got.lag == ref.lag);
  }
}

TEST_CASE("correlation distance matrix") {
  const UsageVector a{{0, 1, 1, 0, 0, 1, 0, 1}, 0}, b = a;
  UsageVector c{{1, 0, 0, 1, 1, 0, 1, 0}, 0};
  const auto d = correlation_distance_matrix({a, b, c}, {4, 7, 9}, 2);
  CHECK(d.size() == 3);
  CHECK(d(0, 1) == doctest::Approx(0.0));
  CHECK(d(0, 2) == doctest::Approx(0.0));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(d(i, i) == 0.0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(d(i, j) == d(j, i));
  }

  std::mt19937_64 rng(23);
  std::bernoulli_distribution coin(0.5);
  UsageVector r1, r2;
  for (int t = 0; t < 2000; ++t) {
    r1.bits.push_back(coin(rng) ? 1.0 : 0.0);
    r2.bits.push_back(coin(rng) ? 1.0 : 0.0);
  }
  CHECK(correlation_distance_matrix({r1, r2}, {1, 2}, 6)(0, 1) > 0.85);
}

TEST_CASE("cluster_appliances") {
  const auto d = matrix3(0.1, 0.2, 0.9);
  CHECK(cluster_appliances(d, 0.3).groups == std::vector<std::vector<int>>{{1, 2, 3}});
  CHECK(cluster_appliances(d, 0.15).groups == std::vector<std::vector<int>>{{1, 2}, {3}});
  const auto singles = cluster_appliances(d, 0.05);
  CHECK(singles.group_count() == 3);
  CHECK(cluster_appliances(d, 0.1).groups == std::vector<std::vector<int>>{{1, 2}, {3}});
}

TEST_CASE("clusters agree with connected components") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 8;
    std::vector<double> data(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) data[i * n + j] = data[j * n + i] = u(rng);
    }
    std::vector<int> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<int>(i) + 10;
    const double eps = u(rng);
    const auto got = cluster_appliances(DistanceMatrix(ids, data, 0), eps);
    const auto ref = oracle::components(data, n, eps);
    REQUIRE(got.groups.size() == ref.size());
    for (std::size_t g = 0; g < ref.size(); ++g) {
      for (std::size_t k = 0; k < ref[g].size(); ++k) CHECK(got.groups[g][k] == ids[ref[g][k]]);
    }
  }
}
