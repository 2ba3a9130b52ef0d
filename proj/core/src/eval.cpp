#include "gcabulf/eval.hpp"

#include <cmath>
#include <future>
#include <ostream>

#include "gcabulf/errors.hpp"
#include "gcabulf/pipeline.hpp"

namespace gcabulf {

namespace {

void check_lengths(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size()) {
    throw UsageError("prediction and target lengths differ (" + std::to_string(pred.size()) + " vs " +
                     std::to_string(actual.size()) + ")");
  }
}

}  // namespace

double mae(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual);
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - actual[i]);
  return sum / static_cast<double>(pred.size());
}

MapeResult mape(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual);
  MapeResult r;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (std::abs(actual[i]) < kMapeZeroTargetKw) {
      ++r.n_skipped;
      continue;
    }
    sum += std::abs(pred[i] - actual[i]) / std::abs(actual[i]);
    ++r.n_evaluated;
  }
  r.value = r.n_evaluated > 0 ? sum / static_cast<double>(r.n_evaluated) : 0.0;
  return r;
}

MetricReport evaluate_forecasts(std::span<const double> pred, std::span<const double> actual) {
  const auto p = mape(pred, actual);
  return {mae(pred, actual), p.value, p.n_evaluated, p.n_skipped};
}

SplitRanges chronological_split(std::size_t n, const SplitFractions& f) {
  if (f.train < 0.0 || f.val < 0.0 || f.test < 0.0 || std::abs(f.train + f.val + f.test - 1.0) > 1e-9) {
    throw UsageError("split fractions must be non-negative and sum to 1");
  }
  const auto nd = static_cast<double>(n);
  SplitRanges r;
  r.train_end = std::min(n, static_cast<std::size_t>(std::llround(nd * f.train)));
  r.val_end = std::min(n, r.train_end + static_cast<std::size_t>(std::llround(nd * f.val)));
  r.test_end = n;
  return r;
}

std::vector<double> persistence_forecast(const AppliancePanel& panel, std::span<const std::size_t> positions) {
  std::vector<double> out;
  out.reserve(positions.size());
  for (auto t : positions) {
    if (t == 0 || t > panel.size() || !panel.total().valid(t - 1)) {
      throw DataError("persistence forecast needs a valid total at index " + std::to_string(t) + " - 1");
    }
    out.push_back(panel.total()[t - 1]);
  }
  return out;
}

std::vector<AblationRow> run_ablation(const AppliancePanel& panel, const TrainConfig& base, const SweepSpec& sweep) {
  std::vector<AblationRow> rows;
  for (auto tau : sweep.taus) {
    for (auto eps : sweep.epsilons) {
      for (bool filter : sweep.filters) {
        AblationRow r;
        r.tau = tau;
        r.epsilon = eps;
        r.filter = filter;
        r.seed = base.seed + rows.size();
        rows.push_back(r);
      }
    }
  }

  auto run_cell = [&](AblationRow& r) {
    try {
      TrainConfig c = base;
      c.tau = r.tau;
      c.epsilon = r.epsilon;
      c.use_filtering = r.filter;
      c.seed = r.seed;
      c.workers = 1;
      const auto built = train_forecaster(panel, c);
      r.report = evaluate_model(built.model, built.data, panel).full;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, base.workers);
  for (std::size_t begin = 0; begin < rows.size(); begin += workers) {
    const std::size_t end = std::min(rows.size(), begin + workers);
    if (end - begin == 1) {
      run_cell(rows[begin]);
      continue;
    }
    std::vector<std::future<void>> futures;
    for (std::size_t i = begin; i < end; ++i) futures.push_back(std::async(std::launch::async, run_cell, std::ref(rows[i])));
    for (auto& f : futures) f.get();
  }
  return rows;
}

void write_ablation_csv(const std::vector<AblationRow>& rows, std::ostream& out) {
  out << "tau,epsilon,filter,seed,mae_kw,mape_pct,n_eval,n_skipped,status\n";
  for (const auto& r : rows) {
    out << r.tau << ',' << format_real(r.epsilon) << ',' << (r.filter ? "on" : "off") << ',' << r.seed << ',';
    if (r.report) {
      out << format_real(r.report->mae) << ',' << format_real(100.0 * r.report->mape) << ',' << r.report->n_evaluated
          << ',' << r.report->n_skipped_zero_target << ",ok\n";
    } else {
      std::string msg = r.error;
      for (auto& ch : msg) {
        if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
      }
      out << ",,,,failed: " << msg << '\n';
    }
  }
}

}  // namespace gcabulf
