#include "gcabulf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "gcabulf/dwt.hpp"
#include "gcabulf/errors.hpp"
#include "gcabulf/optim.hpp"

namespace gcabulf {

namespace {

// Stream identifiers for per-component seeding.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kTrainStream = 100;
constexpr std::uint64_t kCoInitStream = 2000;
constexpr std::uint64_t kJointStream = 3000;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

LstmFcShape subnet_shape(const TrainConfig& c, std::size_t input_dim) {
  LstmFcShape s;
  s.input_dim = input_dim;
  s.hidden_dim = c.hidden_dim;
  s.context_dim = kContextDim;
  s.fc_hidden = c.fc_hidden;
  s.gates = c.gates;
  s.readout = c.readout;
  return s;
}

std::vector<std::size_t> co_sizes(const TrainConfig& c, std::size_t groups) {
  std::vector<std::size_t> sizes{groups + 1};
  sizes.insert(sizes.end(), c.co_hidden.begin(), c.co_hidden.end());
  sizes.push_back(1);
  return sizes;
}

// Training-ready copy: standardized inputs and targets.
struct StdData {
  std::size_t tau = 0;
  std::size_t channels = 0;
  std::vector<double> inputs;
  std::vector<double> context;
  std::vector<double> targets;

  std::size_t size() const { return targets.size(); }
  std::span<const double> input(std::size_t s) const { return {inputs.data() + s * tau * channels, tau * channels}; }
  std::span<const double> ctx(std::size_t s) const { return {context.data() + s * kContextDim, kContextDim}; }
};

StdData standardize(const WindowedDataset& ds, const SubnetScaling& scaling, std::size_t first, std::size_t count) {
  const auto sub = ds.subset(first, count);
  StdData out;
  out.tau = sub.tau;
  out.channels = sub.channels;
  out.inputs = sub.inputs;
  scaling.input.apply(out.inputs);
  out.context = sub.context;
  out.targets = sub.targets;
  for (auto& y : out.targets) y = (y - scaling.target_mean) / scaling.target_scale;
  return out;
}

SubnetScaling fit_scaling(const WindowedDataset& ds, std::size_t train_count) {
  SubnetScaling s;
  const auto train = ds.subset(0, train_count);
  s.input = Scaler::fit(train.inputs, ds.channels);
  const auto t = Scaler::fit(train.targets, 1);
  s.target_mean = t.mean[0];
  s.target_scale = t.scale[0];
  return s;
}

double dataset_loss(const LstmFcNet& net, const StdData& data) {
  if (data.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const double d = net.forward(data.input(s), data.tau, data.ctx(s)) - data.targets[s];
    sum += d * d;
  }
  const double loss = sum / static_cast<double>(data.size());
  if (!std::isfinite(loss)) throw TrainingError("non-finite validation loss");
  return loss;
}

// Tracks early stopping on validation loss (or training loss when no validation data exist).
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  /// Returns true when training should halt.
  bool update(double loss, std::span<const ParamRef> params) {
    if (loss < best_) {
      best_ = loss;
      best_params_ = snapshot(params);
      stale_ = 0;
      return false;
    }
    ++stale_;
    return patience_ > 0 && stale_ >= patience_;
  }

  void restore_best(std::span<const ParamRef> params) const {
    if (!best_params_.empty()) restore(params, best_params_);
  }

 private:
  std::size_t patience_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t stale_ = 0;
  std::vector<Tensor2> best_params_;
};

std::vector<EpochRecord> train_subnet(LstmFcNet& net, const StdData& train, const StdData& val, const TrainConfig& c,
                                      std::uint64_t seed, const std::string& name) {
  std::vector<EpochRecord> records;
  if (c.epochs_stage1 == 0 || train.size() == 0) return records;
  auto params = net.parameters();
  auto adam = make_adam_state(params, AdamConfig{c.lr_stage1});
  EarlyStopper stopper(c.patience);
  Rng rng(seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<LstmFcNet::Trace> traces;
  std::vector<double> pred, target;

  for (std::size_t epoch = 1; epoch <= c.epochs_stage1; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += c.batch_size) {
      const std::size_t n = std::min(c.batch_size, order.size() - begin);
      traces.resize(n);
      pred.resize(n);
      target.resize(n);
      zero_grads(params);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t s = order[begin + k];
        pred[k] = net.forward(train.input(s), train.tau, train.ctx(s), &traces[k]);
        target[k] = train.targets[s];
      }
      const auto loss = mse_loss(pred, target);
      for (std::size_t k = 0; k < n; ++k) net.backward(traces[k], loss.grad[k]);
      adam_step(adam, params);
      sum += loss.loss * static_cast<double>(n);
    }
    const double train_loss = sum / static_cast<double>(train.size());
    if (!std::isfinite(train_loss)) throw TrainingError(name + ": non-finite training loss at epoch " + std::to_string(epoch));
    const double val_loss = val.size() > 0 ? dataset_loss(net, val) : train_loss;
    records.push_back({name, epoch, train_loss, val_loss});
    if (stopper.update(val_loss, params)) break;
  }
  stopper.restore_best(params);
  return records;
}

struct SampleOutputs {
  double agg = 0.0;
  std::vector<double> groups;
  double refined = 0.0;
};

Forecast to_forecast(const ForecastModel& model, const SampleOutputs& out) {
  Forecast f;
  const auto& a = model.agg_scaling;
  f.total_kw = std::max(0.0, a.target_mean + a.target_scale * out.refined);
  f.preliminary_kw = std::max(0.0, a.target_mean + a.target_scale * out.agg);
  for (std::size_t i = 0; i < out.groups.size(); ++i) {
    const auto& g = model.group_scaling[i];
    f.group_kw.push_back(g.target_mean + g.target_scale * out.groups[i]);
  }
  return f;
}

SampleOutputs run_heads(const ForecastModel& model, std::span<const double> agg_in,
                        const std::vector<std::vector<double>>& group_in, std::span<const double> ctx) {
  const std::size_t tau = model.config.tau;
  SampleOutputs out;
  out.agg = model.agg_net.forward(agg_in, tau, ctx);
  std::vector<double> co_in{out.agg};
  for (std::size_t i = 0; i < model.group_count(); ++i) {
    out.groups.push_back(model.group_nets[i].forward(group_in[i], tau, ctx));
    co_in.push_back(out.groups.back());
  }
  out.refined = model.co_predictor.forward(co_in).output[0];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

Scaler Scaler::fit(std::span<const double> values, std::size_t channels) {
  if (channels == 0) throw UsageError("Scaler: channel count must be positive");
  Scaler s;
  s.mean.assign(channels, 0.0);
  s.scale.assign(channels, 1.0);
  const std::size_t rows = values.size() / channels;
  if (rows == 0) return s;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < channels; ++c) s.mean[c] += values[r * channels + c];
  }
  for (auto& m : s.mean) m /= static_cast<double>(rows);
  std::vector<double> ss(channels, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double d = values[r * channels + c] - s.mean[c];
      ss[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < channels; ++c) {
    const double sd = std::sqrt(ss[c] / static_cast<double>(rows));
    s.scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

void Scaler::apply(std::span<double> rows) const {
  const std::size_t channels = mean.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t c = i % channels;
    rows[i] = (rows[i] - mean[c]) / scale[c];
  }
}

PreparedData prepare_data(const ForecastModel& model, const AppliancePanel& panel) {
  const auto& c = model.config;
  const std::size_t m = panel.size();
  const std::size_t hist = c.history();
  const LoadSeries& total = panel.total();

  std::vector<std::vector<std::size_t>> group_pos;
  for (const auto& g : model.grouping.groups) {
    std::vector<std::size_t> pos;
    for (int id : g) pos.push_back(panel.position_of(id));
    group_pos.push_back(std::move(pos));
  }

  // Runs of consecutive valid samples ending at each index.
  auto runs = [m](auto&& valid_at) {
    std::vector<std::size_t> run(m, 0);
    for (std::size_t i = 0; i < m; ++i) run[i] = valid_at(i) ? (i > 0 ? run[i - 1] + 1 : 1) : 0;
    return run;
  };
  const auto total_run = runs([&](std::size_t i) { return total.valid(i); });
  const auto critical_run = runs([&](std::size_t i) {
    for (const auto& g : group_pos) {
      for (auto p : g) {
        if (!panel.appliance(p).valid(i)) return false;
      }
    }
    return true;
  });

  PreparedData data;
  data.agg.tau = c.tau;
  data.agg.channels = model.agg_channels();
  data.agg.context_dim = kContextDim;
  data.groups.resize(group_pos.size());
  for (std::size_t gi = 0; gi < group_pos.size(); ++gi) {
    data.groups[gi].tau = c.tau;
    data.groups[gi].channels = group_pos[gi].size();
    data.groups[gi].context_dim = kContextDim;
  }

  for (std::size_t t = hist; t < m; ++t) {
    if (total_run[t] < hist + 1 || critical_run[t] < c.tau + 1) continue;
    const std::int64_t ts = panel.index().timestamp(t);
    const auto ctx = context_features(ts, c.tz_offset_s);

    if (c.agg_features == AggFeatures::Dwt) {
      const auto bands = causal_band_window(total, t, c.tau, c.buffer_len, c.wavelet);
      data.agg.inputs.insert(data.agg.inputs.end(), bands.begin(), bands.end());
    } else {
      for (std::size_t j = t - c.tau; j < t; ++j) data.agg.inputs.push_back(total[j]);
    }
    data.agg.context.insert(data.agg.context.end(), ctx.begin(), ctx.end());
    data.agg.targets.push_back(total[t]);
    data.agg.positions.push_back(t);
    data.agg.timestamps.push_back(ts);

    for (std::size_t gi = 0; gi < group_pos.size(); ++gi) {
      auto& ds = data.groups[gi];
      for (std::size_t j = t - c.tau; j < t; ++j) {
        for (auto p : group_pos[gi]) ds.inputs.push_back(panel.appliance(p)[j]);
      }
      double sum = 0.0;
      for (auto p : group_pos[gi]) sum += panel.appliance(p)[t];
      ds.context.insert(ds.context.end(), ctx.begin(), ctx.end());
      ds.targets.push_back(sum);
      ds.positions.push_back(t);
      ds.timestamps.push_back(ts);
    }
  }
  if (data.agg.size() == 0) {
    throw DataError("no forecastable positions: need " + std::to_string(hist) +
                    " consecutive valid history samples (tau/buffer_len too large for the data)");
  }
  data.split = chronological_split(data.agg.size(), c.split);
  return data;
}

BuildResult build_model(const AppliancePanel& panel, const TrainConfig& config) {
  validate(config);
  if (panel.appliance_count() == 0) throw DataError("panel has no monitored appliances");
  if (panel.size() < 2 * config.day_len) throw DataError("panel shorter than two full days");

  BuildResult out;
  out.table = contribution_rank(panel, config.alpha, config.day_len);
  out.filter = config.use_filtering ? filter_critical_relative(panel, out.table, config.sigma_rel)
                                    : filter_critical(panel, out.table, 0.0);
  if (out.filter.critical_ids.empty()) {
    throw DataError("no critical appliances selected: total-load std is already below sigma; lower sigma_rel");
  }

  auto& model = out.model;
  model.config = config;
  std::vector<UsageVector> usage;
  for (int id : out.filter.critical_ids) {
    const auto pos = panel.position_of(id);
    model.critical.push_back(panel.meta()[pos]);
    usage.push_back(usage_vector(panel.appliance(pos)));
  }
  out.distances = correlation_distance_matrix(usage, out.filter.critical_ids, config.delta);
  model.grouping = cluster_appliances(out.distances, config.epsilon);

  const std::size_t g = model.grouping.group_count();
  for (std::size_t i = 0; i < g; ++i) {
    model.group_nets.emplace_back(subnet_shape(config, model.grouping.groups[i].size()));
  }
  model.agg_net = LstmFcNet(subnet_shape(config, model.agg_channels()));
  model.co_predictor = FcStack(co_sizes(config, g));

  Rng agg_rng(derive_seed(config.seed, kInitStream));
  model.agg_net.init(agg_rng);
  for (std::size_t i = 0; i < g; ++i) {
    Rng rng(derive_seed(config.seed, kInitStream + 1 + i));
    model.group_nets[i].init(rng);
  }
  Rng co_rng(derive_seed(config.seed, kCoInitStream));
  model.co_predictor.init(co_rng);

  out.data = prepare_data(model, panel);
  if (out.data.split.train_size() == 0) throw DataError("training split is empty");
  model.agg_scaling = fit_scaling(out.data.agg, out.data.split.train_size());
  for (const auto& ds : out.data.groups) model.group_scaling.push_back(fit_scaling(ds, out.data.split.train_size()));
  return out;
}

void pretrain_components(ForecastModel& model, const PreparedData& data) {
  const auto& c = model.config;
  const auto& sp = data.split;

  struct Job {
    LstmFcNet* net;
    const WindowedDataset* ds;
    const SubnetScaling* scaling;
    std::string name;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  jobs.push_back({&model.agg_net, &data.agg, &model.agg_scaling, "agg", derive_seed(c.seed, kTrainStream)});
  for (std::size_t i = 0; i < model.group_count(); ++i) {
    jobs.push_back({&model.group_nets[i], &data.groups[i], &model.group_scaling[i], "group" + std::to_string(i),
                    derive_seed(c.seed, kTrainStream + 1 + i)});
  }

  auto run = [&](const Job& job) {
    const auto train = standardize(*job.ds, *job.scaling, 0, sp.train_size());
    const auto val = standardize(*job.ds, *job.scaling, sp.train_end, sp.val_size());
    return train_subnet(*job.net, train, val, c, job.seed, job.name);
  };

  // Sub-networks share no parameters, so each may train on its own thread.
  std::vector<std::vector<EpochRecord>> records(jobs.size());
  for (std::size_t begin = 0; begin < jobs.size(); begin += c.workers) {
    const std::size_t end = std::min(jobs.size(), begin + c.workers);
    if (end - begin == 1) {
      records[begin] = run(jobs[begin]);
      continue;
    }
    std::vector<std::future<std::vector<EpochRecord>>> futures;
    for (std::size_t j = begin; j < end; ++j) futures.push_back(std::async(std::launch::async, run, std::cref(jobs[j])));
    for (std::size_t j = begin; j < end; ++j) records[j] = futures[j - begin].get();
  }
  for (auto& r : records) model.history.epochs.insert(model.history.epochs.end(), r.begin(), r.end());
}

void finetune_collaborative(ForecastModel& model, const PreparedData& data) {
  const auto& c = model.config;
  const auto& sp = data.split;
  const std::size_t g = model.group_count();

  model.co_predictor = FcStack(co_sizes(c, g));
  Rng co_rng(derive_seed(c.seed, kCoInitStream));
  model.co_predictor.init(co_rng);
  if (c.epochs_stage2 == 0 || sp.train_size() == 0) return;

  auto make = [&](std::size_t first, std::size_t count) {
    std::vector<StdData> out;
    out.push_back(standardize(data.agg, model.agg_scaling, first, count));
    for (std::size_t i = 0; i < g; ++i) out.push_back(standardize(data.groups[i], model.group_scaling[i], first, count));
    return out;
  };
  const auto train = make(0, sp.train_size());
  const auto val = make(sp.train_end, sp.val_size());

  std::vector<LstmFcNet*> nets{&model.agg_net};
  for (auto& n : model.group_nets) nets.push_back(&n);

  std::vector<ParamRef> co_params;
  model.co_predictor.append_parameters(co_params, "co.");
  std::vector<ParamRef> sub_params;
  for (std::size_t k = 0; k < nets.size(); ++k) {
    auto p = nets[k]->parameters("net" + std::to_string(k) + ".");
    sub_params.insert(sub_params.end(), p.begin(), p.end());
  }
  const bool tune_subnets = !c.freeze_subnets && c.finetune_lr_scale > 0.0;
  auto co_adam = make_adam_state(co_params, AdamConfig{c.lr_stage2});
  auto sub_adam = make_adam_state(sub_params, AdamConfig{c.lr_stage2 * c.finetune_lr_scale});
  std::vector<ParamRef> all_params = co_params;
  all_params.insert(all_params.end(), sub_params.begin(), sub_params.end());

  auto joint_forward = [&](const std::vector<StdData>& set, std::size_t s, std::vector<LstmFcNet::Trace>* traces,
                           FcStack::Trace* co_trace) {
    std::vector<double> co_in(nets.size());
    for (std::size_t k = 0; k < nets.size(); ++k) {
      co_in[k] = nets[k]->forward(set[k].input(s), c.tau, set[k].ctx(s), traces ? &(*traces)[k] : nullptr);
    }
    auto tr = model.co_predictor.forward(co_in);
    const double y = tr.output[0];
    if (co_trace) *co_trace = std::move(tr);
    return y;
  };
  auto set_loss = [&](const std::vector<StdData>& set) {
    double sum = 0.0;
    for (std::size_t s = 0; s < set[0].size(); ++s) {
      const double d = joint_forward(set, s, nullptr, nullptr) - set[0].targets[s];
      sum += d * d;
    }
    return sum / static_cast<double>(set[0].size());
  };

  EarlyStopper stopper(c.patience);
  Rng rng(derive_seed(c.seed, kJointStream));
  std::vector<std::size_t> order(sp.train_size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::vector<LstmFcNet::Trace>> traces;
  std::vector<FcStack::Trace> co_traces;
  std::vector<double> pred, target, d_in(nets.size());

  for (std::size_t epoch = 1; epoch <= c.epochs_stage2; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += c.batch_size) {
      const std::size_t n = std::min(c.batch_size, order.size() - begin);
      traces.assign(n, std::vector<LstmFcNet::Trace>(nets.size()));
      co_traces.assign(n, {});
      pred.resize(n);
      target.resize(n);
      zero_grads(all_params);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t s = order[begin + k];
        pred[k] = joint_forward(train, s, &traces[k], &co_traces[k]);
        target[k] = train[0].targets[s];
      }
      const auto loss = mse_loss(pred, target);
      for (std::size_t k = 0; k < n; ++k) {
        const double d_out[1] = {loss.grad[k]};
        model.co_predictor.backward(co_traces[k], d_out, tune_subnets ? std::span<double>(d_in) : std::span<double>());
        if (!tune_subnets) continue;
        for (std::size_t j = 0; j < nets.size(); ++j) nets[j]->backward(traces[k][j], d_in[j]);
      }
      adam_step(co_adam, co_params);
      if (tune_subnets) adam_step(sub_adam, sub_params);
      sum += loss.loss * static_cast<double>(n);
    }
    const double train_loss = sum / static_cast<double>(order.size());
    if (!std::isfinite(train_loss)) throw TrainingError("joint: non-finite training loss at epoch " + std::to_string(epoch));
    const double val_loss = sp.val_size() > 0 ? set_loss(val) : train_loss;
    if (!std::isfinite(val_loss)) throw TrainingError("joint: non-finite validation loss");
    model.history.epochs.push_back({"joint", epoch, train_loss, val_loss});
    if (stopper.update(val_loss, all_params)) break;
  }
  stopper.restore_best(all_params);
}

BuildResult train_forecaster(const AppliancePanel& panel, const TrainConfig& config) {
  auto built = build_model(panel, config);
  pretrain_components(built.model, built.data);
  finetune_collaborative(built.model, built.data);
  return built;
}

Forecast predict_next(const ForecastModel& model, const AppliancePanel& panel, std::size_t t) {
  const auto& c = model.config;
  const std::size_t hist = c.history();
  if (t < hist || t > panel.size()) {
    throw DataError("predict_next: position " + std::to_string(t) + " needs " + std::to_string(hist) +
                    " samples of history within the panel");
  }
  const LoadSeries& total = panel.total();

  std::vector<double> agg_in;
  if (c.agg_features == AggFeatures::Dwt) {
    agg_in = causal_band_window(total, t, c.tau, c.buffer_len, c.wavelet);
  } else {
    for (std::size_t j = t - c.tau; j < t; ++j) {
      if (!total.valid(j)) throw DataError("predict_next: invalid total load at index " + std::to_string(j));
      agg_in.push_back(total[j]);
    }
  }
  model.agg_scaling.input.apply(agg_in);

  std::vector<std::vector<double>> group_in(model.group_count());
  for (std::size_t i = 0; i < model.group_count(); ++i) {
    std::vector<std::size_t> pos;
    for (int id : model.grouping.groups[i]) pos.push_back(panel.position_of(id));
    for (std::size_t j = t - c.tau; j < t; ++j) {
      for (auto p : pos) {
        if (!panel.appliance(p).valid(j)) {
          throw DataError("predict_next: invalid appliance load at index " + std::to_string(j));
        }
        group_in[i].push_back(panel.appliance(p)[j]);
      }
    }
    model.group_scaling[i].input.apply(group_in[i]);
  }
  const auto ctx = context_features(panel.index().timestamp(t), c.tz_offset_s);
  return to_forecast(model, run_heads(model, agg_in, group_in, ctx));
}

std::vector<Forecast> predict_samples(const ForecastModel& model, const PreparedData& data, std::size_t first,
                                      std::size_t count) {
  std::vector<StdData> sets;
  sets.push_back(standardize(data.agg, model.agg_scaling, first, count));
  for (std::size_t i = 0; i < model.group_count(); ++i) {
    sets.push_back(standardize(data.groups[i], model.group_scaling[i], first, count));
  }
  std::vector<Forecast> out;
  out.reserve(count);
  std::vector<std::vector<double>> group_in(model.group_count());
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t i = 0; i < model.group_count(); ++i) {
      const auto in = sets[i + 1].input(s);
      group_in[i].assign(in.begin(), in.end());
    }
    out.push_back(to_forecast(model, run_heads(model, sets[0].input(s), group_in, sets[0].ctx(s))));
  }
  return out;
}

EvaluationResult evaluate_model(const ForecastModel& model, const PreparedData& data, const AppliancePanel& panel) {
  const auto& sp = data.split;
  EvaluationResult r;
  const auto forecasts = predict_samples(model, data, sp.val_end, sp.test_size());
  for (std::size_t k = 0; k < forecasts.size(); ++k) {
    const std::size_t s = sp.val_end + k;
    r.positions.push_back(data.agg.positions[s]);
    r.forecast_kw.push_back(forecasts[k].total_kw);
    r.preliminary_kw.push_back(forecasts[k].preliminary_kw);
    r.actual_kw.push_back(data.agg.targets[s]);
  }
  if (r.actual_kw.empty()) throw DataError("test split is empty");
  r.full = evaluate_forecasts(r.forecast_kw, r.actual_kw);
  r.preliminary = evaluate_forecasts(r.preliminary_kw, r.actual_kw);
  r.persistence = evaluate_forecasts(persistence_forecast(panel, r.positions), r.actual_kw);
  return r;
}

}  // namespace gcabulf
