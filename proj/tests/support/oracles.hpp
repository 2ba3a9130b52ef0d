#pragma once

// Straightforward reference computations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <numeric>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

inline double variance(const std::vector<double>& v) {
  const double mu = mean(v);
  long double s = 0;
  for (double x : v) s += (x - mu) * (x - mu);
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

inline std::vector<double> minmax(const std::vector<double>& v) {
  const double lo = *std::min_element(v.begin(), v.end());
  const double hi = *std::max_element(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) out.push_back(hi > lo ? (x - lo) / (hi - lo) : 0.0);
  return out;
}

inline std::vector<double> vola(const std::vector<std::vector<double>>& loads) {
  std::vector<double> vars;
  for (const auto& l : loads) vars.push_back(variance(l));
  return minmax(vars);
}

inline double wgss(const std::vector<double>& load, std::size_t day_len) {
  const std::size_t days = load.size() / day_len;
  std::vector<double> used(load.begin(), load.begin() + static_cast<long>(days * day_len));
  const auto norm = minmax(used);
  double total = 0.0;
  for (std::size_t h = 0; h < day_len; ++h) {
    std::vector<double> column;
    for (std::size_t d = 0; d < days; ++d) column.push_back(norm[d * day_len + h]);
    const double mu = mean(column);
    for (double x : column) total += (x - mu) * (x - mu);
  }
  return total;
}

inline std::vector<double> period(const std::vector<std::vector<double>>& loads, std::size_t day_len) {
  std::vector<double> w;
  for (const auto& l : loads) w.push_back(wgss(l, day_len));
  auto n = minmax(w);
  for (auto& x : n) x = 1.0 - x;
  return n;
}

inline std::vector<double> ctrb(const std::vector<std::vector<double>>& loads, std::size_t day_len, double alpha) {
  const auto v = vola(loads);
  const auto p = period(loads, day_len);
  std::vector<double> out;
  for (std::size_t i = 0; i < loads.size(); ++i) out.push_back(v[i] + alpha * p[i]);
  return out;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct Lagged {
  double value = 0.0;
  int lag = 0;
  double runner_up_gap = 0.0;  // |best| - |second best| over distinct lags
};

/// Scans every lag, collecting the explicit overlapping pairs (x_t, y_{t+lag}).
inline Lagged lag_scan(const std::vector<double>& x, const std::vector<double>& y, int max_lag) {
  const int m = static_cast<int>(x.size());
  std::vector<std::pair<double, int>> scored;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    std::vector<double> a, b;
    for (int t = 0; t < m; ++t) {
      if (t + lag < 0 || t + lag >= m) continue;
      a.push_back(x[t]);
      b.push_back(y[t + lag]);
    }
    scored.emplace_back(pearson(a, b), lag);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& p, const auto& q) {
    if (std::abs(p.first) != std::abs(q.first)) return std::abs(p.first) > std::abs(q.first);
    if (std::abs(p.second) != std::abs(q.second)) return std::abs(p.second) < std::abs(q.second);
    return p.second > q.second;
  });
  Lagged out{scored[0].first, scored[0].second, 0.0};
  out.runner_up_gap = scored.size() > 1 ? std::abs(scored[0].first) - std::abs(scored[1].first) : 1.0;
  return out;
}

inline std::vector<double> usage_bits(const std::vector<double>& load) {
  const double threshold = *std::max_element(load.begin(), load.end()) / 20.0;
  std::vector<double> out;
  for (double x : load) out.push_back(x > threshold ? 1.0 : 0.0);
  return out;
}

inline double mae(const std::vector<double>& p, const std::vector<double>& a) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - a[i]);
  return p.empty() ? 0.0 : s / static_cast<double>(p.size());
}

inline double mape(const std::vector<double>& p, const std::vector<double>& a, std::size_t* skipped = nullptr) {
  double s = 0;
  std::size_t n = 0, skip = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::abs(a[i]) < 1e-6) {
      ++skip;
      continue;
    }
    s += std::abs((p[i] - a[i]) / a[i]);
    ++n;
  }
  if (skipped) *skipped = skip;
  return n ? s / static_cast<double>(n) : 0.0;
}

/// Connected components of {(i, j) : d(i, j) <= eps}, each sorted, ordered by smallest member.
inline std::vector<std::vector<std::size_t>> components(const std::vector<double>& d, std::size_t n, double eps) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d[i * n + j] <= eps) parent[find(i)] = find(j);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : by_root) out.push_back(members);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
