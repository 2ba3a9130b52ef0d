#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "gcabulf/errors.hpp"
#include "gcabulf/series.hpp"

using namespace gcabulf;

namespace {

std::vector<RawSample> six_second_hour(std::int64_t start, const std::vector<double>& watts) {
  std::vector<RawSample> raw;
  for (std::size_t i = 0; i < watts.size(); ++i) raw.push_back({start + static_cast<std::int64_t>(i) * 6, watts[i]});
  return raw;
}

}  // namespace

TEST_CASE("resample_hourly averages a constant hour") {
  const auto raw = six_second_hour(fixtures::kMonday, std::vector<double>(600, 100.0));
  const auto s = resample_hourly(raw);
  REQUIRE(s.size() == 1);
  CHECK(s.valid(0));
  CHECK(s[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.index().start == fixtures::kMonday);
}

TEST_CASE("resample_hourly takes the mean of mixed readings") {
  std::vector<double> w(300, 0.0);
  w.insert(w.end(), 300, 2000.0);
  const auto s = resample_hourly(six_second_hour(fixtures::kMonday, w));
  REQUIRE(s.size() == 1);
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("resample_hourly masks poorly covered hours") {
  auto raw = six_second_hour(fixtures::kMonday, std::vector<double>(600, 50.0));
  const auto sparse = six_second_hour(fixtures::kMonday + 3600, std::vector<double>(10, 50.0));
  raw.insert(raw.end(), sparse.begin(), sparse.end());
  const auto s = resample_hourly(raw);
  REQUIRE(s.size() == 2);
  CHECK(s.valid(0));
  CHECK_FALSE(s.valid(1));
  CHECK(s[1] == 0.0);
}

TEST_CASE("minmax_normalize") {
  const std::vector<double> a{2, 4, 6}, b{5, 5, 5}, c{-1, 0, 3};
  CHECK(minmax_normalize(a) == std::vector<double>{0, 0.5, 1});
  CHECK(minmax_normalize(b) == std::vector<double>{0, 0, 0});
  CHECK(minmax_normalize(c) == std::vector<double>{0, 0.25, 1});
  const std::vector<std::uint8_t> mask{1, 0, 1};
  const std::vector<double> d{0, 100, 4};
  CHECK(minmax_normalize(d, mask) == std::vector<double>{0, 0, 1});
}

TEST_CASE("LoadSeries rejects negative valid values") {
  TimeIndex idx{0, kSecondsPerHour, 2};
  CHECK_THROWS_AS(LoadSeries(idx, {1.0, -1.0}), DataError);
  CHECK_THROWS_AS(LoadSeries(idx, {1.0}), DataError);
  const LoadSeries masked(idx, {1.0, -1.0}, {1, 0});
  CHECK(masked[1] == 0.0);
  CHECK(masked.valid_count() == 1);
}

TEST_CASE("valid_moments ignores masked samples") {
  const LoadSeries s(TimeIndex{0, kSecondsPerHour, 4}, {1.0, 2.0, 3.0, 50.0}, {1, 1, 1, 0});
  const auto m = valid_moments(s);
  CHECK(m.count == 3);
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.stddev == doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("context_features one-hot layout") {
  const auto mon = context_features(fixtures::kMonday);
  REQUIRE(mon.size() == kContextDim);
  CHECK(mon[0] == 1.0);
  CHECK(mon[7] == 1.0);
  const auto sun = context_features(fixtures::kMonday + 6 * kSecondsPerDay + 23 * kSecondsPerHour);
  CHECK(sun[6] == 1.0);
  CHECK(sun[7 + 23] == 1.0);
  for (std::int64_t ts = 0; ts < 9 * kSecondsPerDay; ts += 7 * 977) {
    double sum = 0.0;
    for (double v : context_features(ts, 3600)) sum += v;
    CHECK(sum == 2.0);
  }
  const auto shifted = context_features(fixtures::kMonday - kSecondsPerHour, kSecondsPerHour);
  CHECK(shifted[0] == 1.0);
  CHECK(shifted[7] == 1.0);
}

TEST_CASE("make_windows") {
  const TimeIndex idx{fixtures::kMonday, kSecondsPerHour, 10};
  std::vector<double> v(10);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  const auto no_context = [](std::int64_t) { return std::vector<double>{}; };

  SUBCASE("all valid") {
    const LoadSeries s(idx, v);
    const auto ds = make_windows(std::vector<LoadSeries>{s}, s, no_context, 3);
    CHECK(ds.size() == 7);
    CHECK(ds.positions.front() == 3);
    CHECK(ds.input(0)[2] == 2.0);
  }
  SUBCASE("one invalid sample") {
    std::vector<std::uint8_t> mask(10, 1);
    mask[5] = 0;
    const LoadSeries s(idx, v, mask);
    const auto ds = make_windows(std::vector<LoadSeries>{s}, s, no_context, 3);
    CHECK(ds.positions == std::vector<std::size_t>{3, 4, 9});
    CHECK(ds.targets == std::vector<double>{3, 4, 9});
  }
  SUBCASE("unit window") {
    const LoadSeries s(TimeIndex{0, kSecondsPerHour, 3}, {1, 2, 3});
    const auto ds = make_windows(std::vector<LoadSeries>{s}, s,
                                 [](std::int64_t ts) { return context_features(ts); }, 1);
    CHECK(ds.inputs == std::vector<double>{1, 2});
    CHECK(ds.targets == std::vector<double>{2, 3});
    CHECK(ds.context.size() == 2 * kContextDim);
  }
}

TEST_CASE("reindex masks positions without a source sample") {
  const LoadSeries s(TimeIndex{fixtures::kMonday, kSecondsPerHour, 2}, {1.0, 2.0});
  const auto r = reindex(s, TimeIndex{fixtures::kMonday - kSecondsPerHour, kSecondsPerHour, 4});
  CHECK_FALSE(r.valid(0));
  CHECK(r[1] == 1.0);
  CHECK(r[2] == 2.0);
  CHECK_FALSE(r.valid(3));
}
