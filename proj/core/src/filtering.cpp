#include "gcabulf/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcabulf/errors.hpp"

namespace gcabulf {

VolatilityScores volatility_scores(const AppliancePanel& panel) {
  if (panel.appliance_count() == 0) throw DataError("volatility_scores: panel has no appliances");
  VolatilityScores out;
  for (std::size_t i = 0; i < panel.appliance_count(); ++i) {
    const auto& s = panel.appliance(i);
    const Moments mom = valid_moments(s);
    if (mom.count < 2) {
      throw DataError("appliance '" + panel.meta()[i].name + "' has fewer than 2 valid samples");
    }
    out.raw_variance.push_back(mom.stddev * mom.stddev);
  }
  out.vola = minmax_normalize(out.raw_variance);
  return out;
}

PeriodicityScores periodicity_scores(const AppliancePanel& panel, std::size_t day_len) {
  if (day_len == 0) throw UsageError("periodicity_scores: day length must be positive");
  if (panel.appliance_count() == 0) throw DataError("periodicity_scores: panel has no appliances");
  const std::size_t full_days = panel.size() / day_len;

  std::vector<std::size_t> days;
  for (std::size_t d = 0; d < full_days; ++d) {
    bool ok = true;
    for (const auto& a : panel.appliances()) {
      for (std::size_t j = 0; j < day_len && ok; ++j) ok = a.valid(d * day_len + j);
    }
    if (ok) days.push_back(d);
  }
  if (days.size() < 2) {
    throw DataError("periodicity_scores: need at least 2 full valid days, have " + std::to_string(days.size()));
  }

  PeriodicityScores out;
  out.days_used = days.size();
  for (const auto& a : panel.appliances()) {
    std::vector<double> analyzed;
    analyzed.reserve(days.size() * day_len);
    for (auto d : days) {
      for (std::size_t j = 0; j < day_len; ++j) analyzed.push_back(a[d * day_len + j]);
    }
    const auto norm = minmax_normalize(analyzed);
    std::vector<double> mean_day(day_len, 0.0);
    for (std::size_t d = 0; d < days.size(); ++d) {
      for (std::size_t j = 0; j < day_len; ++j) mean_day[j] += norm[d * day_len + j];
    }
    for (auto& v : mean_day) v /= static_cast<double>(days.size());
    double wgss = 0.0;
    for (std::size_t d = 0; d < days.size(); ++d) {
      for (std::size_t j = 0; j < day_len; ++j) {
        const double diff = norm[d * day_len + j] - mean_day[j];
        wgss += diff * diff;
      }
    }
    out.raw_wgss.push_back(wgss);
  }
  const auto norm_wgss = minmax_normalize(out.raw_wgss);
  for (double w : norm_wgss) out.period.push_back(1.0 - w);
  return out;
}

ContributionTable contribution_rank(const AppliancePanel& panel, double alpha, std::size_t day_len) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("contribution_rank: alpha must lie in (0, 1)");
  const auto vol = volatility_scores(panel);
  const auto per = periodicity_scores(panel, day_len);

  ContributionTable table;
  table.alpha = alpha;
  table.day_len = day_len;
  for (std::size_t i = 0; i < panel.appliance_count(); ++i) {
    ContributionRow row;
    row.id = panel.meta()[i].id;
    row.name = panel.meta()[i].name;
    row.raw_variance = vol.raw_variance[i];
    row.vola = vol.vola[i];
    row.raw_wgss = per.raw_wgss[i];
    row.period = per.period[i];
    row.ctrb = row.vola + alpha * row.period;
    table.rows.push_back(std::move(row));
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const ContributionRow& a, const ContributionRow& b) {
    if (a.ctrb != b.ctrb) return a.ctrb > b.ctrb;
    if (a.raw_variance != b.raw_variance) return a.raw_variance > b.raw_variance;
    return a.id < b.id;
  });
  return table;
}

FilterResult filter_critical(const AppliancePanel& panel, const ContributionTable& table, double sigma) {
  if (!(sigma >= 0.0)) throw UsageError("filter_critical: sigma must be non-negative");
  FilterResult out;
  out.sigma = sigma;

  const std::size_t m = panel.size();
  std::vector<double> residual(panel.total().values().begin(), panel.total().values().end());
  std::vector<std::uint8_t> mask(panel.total().mask().begin(), panel.total().mask().end());
  auto current_std = [&] { return valid_moments(LoadSeries(panel.index(), residual, mask)).stddev; };

  out.residual_std_trace.push_back(current_std());
  for (const auto& row : table.rows) {
    if (out.residual_std_trace.back() < sigma) break;
    const auto& load = panel.appliance(panel.position_of(row.id));
    for (std::size_t t = 0; t < m; ++t) {
      if (!mask[t]) continue;
      if (!load.valid(t)) {
        mask[t] = 0;
        residual[t] = 0.0;
        continue;
      }
      residual[t] -= load[t];
      if (residual[t] < 0.0) {
        residual[t] = 0.0;
        ++out.clamp_count;
      }
    }
    out.critical_ids.push_back(row.id);
    out.residual_std_trace.push_back(current_std());
  }
  out.residual = LoadSeries(panel.index(), std::move(residual), std::move(mask));
  return out;
}

FilterResult filter_critical_relative(const AppliancePanel& panel, const ContributionTable& table, double sigma_rel) {
  if (!(sigma_rel >= 0.0)) throw UsageError("filter_critical: relative sigma must be non-negative");
  const double base = valid_moments(panel.total()).stddev;
  const double sigma = std::isinf(sigma_rel) ? std::numeric_limits<double>::infinity() : sigma_rel * base;
  return filter_critical(panel, table, sigma);
}

}  // namespace gcabulf
