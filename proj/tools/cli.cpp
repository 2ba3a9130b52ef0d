#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcabulf/errors.hpp"
#include "gcabulf/eval.hpp"
#include "gcabulf/filtering.hpp"
#include "gcabulf/grouping.hpp"
#include "gcabulf/ingest.hpp"
#include "gcabulf/pipeline.hpp"
#include "gcabulf/synth.hpp"

#ifndef GCABULF_VERSION
#define GCABULF_VERSION "0.0.0"
#endif

namespace gcabulf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct DataSource {
  std::optional<std::string> csv;
  std::optional<std::string> ukdale_dir;
  int house = 1;
  std::vector<int> channels;
  int aggregate_channel = 1;
  std::optional<std::string> start;
  std::optional<std::string> end;
};

struct RunConfig {
  TrainConfig train;
  DataSource data;
  std::string output_dir = ".";
  SweepSpec sweep{{0.92}, {12}, {true}};
};

struct Options {
  std::string config_path;
  std::optional<std::string> csv, ukdale_dir, start, end, out_dir;
  std::optional<int> house;
  std::vector<int> channels;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> tau, workers;
  std::optional<double> epsilon, alpha, sigma_rel;
  std::optional<std::int64_t> tz_offset;
  bool no_filter = false;
  bool relu_gates = false;
  std::string fixed_timestamp;
  std::string checkpoint;
  std::string preset;
  std::vector<std::string> at;
  std::string taus, epsilons, filters;
};

template <typename Fn>
void for_each_key(const json& obj, const std::string& where, Fn&& fn) {
  if (!obj.is_object()) throw UsageError("config: '" + where + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) fn(it.key(), it.value());
}

std::string scalar_text(const std::string& key, const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) return format_real(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += scalar_text(key, v[i]);
    }
    return out;
  }
  throw UsageError("config key '" + key + "': unsupported value type");
}

RunConfig parse_run_config(const json& j) {
  RunConfig rc;
  for_each_key(j, "<root>", [&](const std::string& key, const json& v) {
    if (key == "train") {
      for_each_key(v, "train", [&](const std::string& k, const json& x) { set_config_value(rc.train, k, scalar_text(k, x)); });
    } else if (key == "data") {
      for_each_key(v, "data", [&](const std::string& k, const json& x) {
        if (k == "csv") rc.data.csv = x.get<std::string>();
        else if (k == "ukdale_dir") rc.data.ukdale_dir = x.get<std::string>();
        else if (k == "house") rc.data.house = x.get<int>();
        else if (k == "channels") rc.data.channels = x.get<std::vector<int>>();
        else if (k == "aggregate_channel") rc.data.aggregate_channel = x.get<int>();
        else if (k == "start") rc.data.start = x.get<std::string>();
        else if (k == "end") rc.data.end = x.get<std::string>();
        else throw UsageError("config: unknown key 'data." + k + "'");
      });
    } else if (key == "output_dir") {
      rc.output_dir = v.get<std::string>();
    } else if (key == "sweep") {
      for_each_key(v, "sweep", [&](const std::string& k, const json& x) {
        if (k == "taus") rc.sweep.taus = x.get<std::vector<std::size_t>>();
        else if (k == "epsilons") rc.sweep.epsilons = x.get<std::vector<double>>();
        else if (k == "filters") rc.sweep.filters = x.get<std::vector<bool>>();
        else throw UsageError("config: unknown key 'sweep." + k + "'");
      });
    } else {
      throw UsageError("config: unknown key '" + key + "'");
    }
  });
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  try {
    return parse_run_config(j);
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw UsageError("malformed " + what + " list '" + text + "'");
    out.push_back(v);
  }
  return out;
}

RunConfig resolve(const Options& o) {
  RunConfig rc = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  if (o.csv) rc.data.csv = *o.csv;
  if (o.ukdale_dir) rc.data.ukdale_dir = *o.ukdale_dir;
  if (o.house) rc.data.house = *o.house;
  if (!o.channels.empty()) rc.data.channels = o.channels;
  if (o.start) rc.data.start = *o.start;
  if (o.end) rc.data.end = *o.end;
  if (o.out_dir) rc.output_dir = *o.out_dir;
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
    set_config_value(rc.train, s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.seed) rc.train.seed = *o.seed;
  if (o.tau) rc.train.tau = *o.tau;
  if (o.workers) rc.train.workers = *o.workers;
  if (o.epsilon) rc.train.epsilon = *o.epsilon;
  if (o.alpha) rc.train.alpha = *o.alpha;
  if (o.sigma_rel) rc.train.sigma_rel = *o.sigma_rel;
  if (o.tz_offset) rc.train.tz_offset_s = *o.tz_offset;
  if (o.no_filter) rc.train.use_filtering = false;
  if (o.relu_gates) rc.train.gates = GateActivation::Relu;
  if (!o.taus.empty()) rc.sweep.taus = parse_list<std::size_t>(o.taus, "tau");
  if (!o.epsilons.empty()) rc.sweep.epsilons = parse_list<double>(o.epsilons, "epsilon");
  if (!o.filters.empty()) {
    rc.sweep.filters.clear();
    for (const auto& f : parse_list<std::string>(o.filters, "filter")) {
      if (f == "on") rc.sweep.filters.push_back(true);
      else if (f == "off") rc.sweep.filters.push_back(false);
      else throw UsageError("filters must be on/off, got '" + f + "'");
    }
  }
  validate(rc.train);
  return rc;
}

std::string canonical_text(const RunConfig& rc) {
  std::string out;
  for (const auto& [k, v] : to_key_values(rc.train)) out += k + "=" + v + "\n";
  if (rc.data.csv) out += "data.csv=" + *rc.data.csv + "\n";
  if (rc.data.ukdale_dir) {
    out += "data.ukdale_dir=" + *rc.data.ukdale_dir + "\ndata.house=" + std::to_string(rc.data.house) + "\n";
    out += "data.aggregate_channel=" + std::to_string(rc.data.aggregate_channel) + "\ndata.channels=";
    for (int c : rc.data.channels) out += std::to_string(c) + ",";
    out += "\n";
  }
  if (rc.data.start) out += "data.start=" + *rc.data.start + "\n";
  if (rc.data.end) out += "data.end=" + *rc.data.end + "\n";
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Provenance {
  std::string version = GCABULF_VERSION;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string created;
};

Provenance make_provenance(const RunConfig& rc, const Options& o) {
  Provenance p;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(canonical_text(rc))));
  p.config_hash = buf;
  p.seed = rc.train.seed;
  if (!o.fixed_timestamp.empty()) {
    p.created = o.fixed_timestamp;
  } else {
    const auto now = std::chrono::system_clock::now();
    p.created = format_timestamp(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
  }
  return p;
}

void write_header(std::ostream& out, const Provenance& p) {
  out << "# gcabulf " << p.version << "\n# config_hash=" << p.config_hash << "\n# seed=" << p.seed
      << "\n# created=" << p.created << "\n";
}

json provenance_json(const Provenance& p) {
  return {{"tool", "gcabulf"}, {"version", p.version}, {"config_hash", p.config_hash}, {"seed", p.seed}, {"created", p.created}};
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

AppliancePanel load_panel(const RunConfig& rc) {
  AppliancePanel panel;
  if (rc.data.csv) {
    panel = load_csv_panel(*rc.data.csv);
  } else if (rc.data.ukdale_dir) {
    UkdaleOptions opts;
    opts.aggregate_channel = rc.data.aggregate_channel;
    const fs::path dir = fs::path(*rc.data.ukdale_dir) / ("house_" + std::to_string(rc.data.house));
    panel = load_ukdale_house(dir, rc.data.channels, opts);
  } else {
    throw UsageError("no data source: pass --csv or --ukdale-dir (or set data.csv / data.ukdale_dir)");
  }
  if (rc.data.start || rc.data.end) {
    const auto start = rc.data.start ? parse_timestamp(*rc.data.start) : panel.index().start;
    const auto end = rc.data.end ? parse_timestamp(*rc.data.end) : panel.index().end();
    panel = align_panel(panel, start, end);
  }
  return panel;
}

void log_resolved(std::ostream& err, const std::string& cmd, const RunConfig& rc, const Provenance& p) {
  err << "gcabulf " << cmd << ": seed=" << rc.train.seed << " config_hash=" << p.config_hash << "\n";
  for (const auto& [k, v] : to_key_values(rc.train)) err << "  " << k << "=" << v << "\n";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_metrics_row(std::ostream& out, const TrainConfig& c, const MetricReport& m) {
  out << c.tau << ',' << format_real(c.epsilon) << ',' << (c.use_filtering ? "on" : "off") << ',' << c.seed << ','
      << format_real(m.mae) << ',' << format_real(100.0 * m.mape) << ',' << m.n_evaluated << ','
      << m.n_skipped_zero_target << '\n';
}

// ------------------------------------------------------------------------------------------

int cmd_synth(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig rc = resolve(o);
  if (o.preset.empty()) throw UsageError("synth requires --preset (one of critical-vs-noise, two-linked-groups, periodic-vs-erratic, bottom-up-60d)");
  const auto result = generate_preset(o.preset, o.seed);
  rc.train.seed = o.seed.value_or(preset_scenario(o.preset).seed);
  const auto prov = make_provenance(rc, o);
  log_resolved(err, "synth", rc, prov);
  const fs::path dir = rc.output_dir;
  {
    auto f = open_output(dir / "panel.csv");
    write_header(f, prov);
    f << "# preset=" << o.preset << "\n";
    write_csv_panel(result.panel, f);
  }
  {
    auto f = open_output(dir / "ground_truth.json");
    std::ostringstream truth;
    write_ground_truth_json(result.truth, truth);
    json j;
    j["provenance"] = provenance_json(prov);
    j["ground_truth"] = json::parse(truth.str());
    f << j.dump(2) << '\n';
  }
  out << "wrote " << (dir / "panel.csv").string() << " and " << (dir / "ground_truth.json").string() << "\n";
  return kExitOk;
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig rc = resolve(o);
  const auto prov = make_provenance(rc, o);
  log_resolved(err, "ingest", rc, prov);
  const auto panel = load_panel(rc);
  const fs::path path = fs::path(rc.output_dir) / "panel.csv";
  auto f = open_output(path);
  write_header(f, prov);
  write_csv_panel(panel, f);
  out << "wrote " << path.string() << " (" << panel.size() << " hours, " << panel.appliance_count()
      << " appliances, " << panel.masked_violations() << " steps masked by the sum check)\n";
  return kExitOk;
}

int cmd_filter(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig rc = resolve(o);
  const auto prov = make_provenance(rc, o);
  log_resolved(err, "filter", rc, prov);
  const auto panel = load_panel(rc);
  const auto table = contribution_rank(panel, rc.train.alpha, rc.train.day_len);
  const auto result = filter_critical_relative(panel, table, rc.train.sigma_rel);

  const fs::path path = fs::path(rc.output_dir) / "contribution.csv";
  auto f = open_output(path);
  write_header(f, prov);
  f << "# sigma_kw=" << format_real(result.sigma) << "\n";
  f << "appliance,vola,period,ctrb,selected,residual_std_after\n";
  for (const auto& row : table.rows) {
    const auto it = std::find(result.critical_ids.begin(), result.critical_ids.end(), row.id);
    const bool selected = it != result.critical_ids.end();
    f << csv_field(row.name) << ',' << format_real(row.vola) << ',' << format_real(row.period) << ','
      << format_real(row.ctrb) << ',' << (selected ? "true" : "false") << ',';
    if (selected) f << format_real(result.residual_std_trace[static_cast<std::size_t>(it - result.critical_ids.begin()) + 1]);
    f << '\n';
  }
  out << "selected " << result.critical_ids.size() << " of " << table.rows.size() << " appliances; wrote "
      << path.string() << "\n";
  return kExitOk;
}

int cmd_group(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig rc = resolve(o);
  const auto prov = make_provenance(rc, o);
  log_resolved(err, "group", rc, prov);
  const auto panel = load_panel(rc);
  std::vector<int> ids;
  if (rc.train.use_filtering) {
    const auto table = contribution_rank(panel, rc.train.alpha, rc.train.day_len);
    ids = filter_critical_relative(panel, table, rc.train.sigma_rel).critical_ids;
  } else {
    for (const auto& m : panel.meta()) ids.push_back(m.id);
  }
  std::vector<UsageVector> usage;
  for (int id : ids) usage.push_back(usage_vector(panel.appliance(panel.position_of(id))));
  const auto dist = correlation_distance_matrix(usage, ids, rc.train.delta);
  const auto grouping = cluster_appliances(dist, rc.train.epsilon);
  auto name_of = [&](int id) { return panel.meta()[panel.position_of(id)].name; };

  const fs::path dir = rc.output_dir;
  {
    auto f = open_output(dir / "distance.csv");
    write_header(f, prov);
    f << "appliance";
    for (int id : ids) f << ',' << csv_field(name_of(id));
    f << '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
      f << csv_field(name_of(ids[i]));
      for (std::size_t j = 0; j < ids.size(); ++j) f << ',' << format_real(dist(i, j));
      f << '\n';
    }
  }
  {
    auto f = open_output(dir / "groups.json");
    json j;
    j["provenance"] = provenance_json(prov);
    j["epsilon"] = rc.train.epsilon;
    j["delta"] = rc.train.delta;
    j["groups"] = json::array();
    for (const auto& g : grouping.groups) {
      json members = json::array();
      for (int id : g) members.push_back({{"id", id}, {"name", name_of(id)}});
      j["groups"].push_back(members);
    }
    f << j.dump(2) << '\n';
  }
  out << grouping.group_count() << " groups from " << ids.size() << " appliances; wrote "
      << (dir / "distance.csv").string() << " and " << (dir / "groups.json").string() << "\n";
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig rc = resolve(o);
  const auto prov = make_provenance(rc, o);
  log_resolved(err, "train", rc, prov);
  const auto panel = load_panel(rc);
  const auto built = train_forecaster(panel, rc.train);
  const fs::path dir = rc.output_dir;
  const fs::path ckpt = o.checkpoint.empty() ? dir / "model.ckpt" : fs::path(o.checkpoint);
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  save_checkpoint(built.model, ckpt.string());
  {
    auto f = open_output(dir / "history.csv");
    write_header(f, prov);
    f << "component,epoch,train_loss,val_loss\n";
    for (const auto& e : built.model.history.epochs) {
      f << e.component << ',' << e.epoch << ',' << format_real(e.train_loss) << ',' << format_real(e.val_loss) << '\n';
    }
  }
  out << "trained " << built.model.group_count() << " group nets over " << built.model.critical.size()
      << " critical appliances; wrote " << ckpt.string() << "\n";
  return kExitOk;
}

ForecastModel load_model(const Options& o, const RunConfig& rc) {
  const fs::path ckpt = o.checkpoint.empty() ? fs::path(rc.output_dir) / "model.ckpt" : fs::path(o.checkpoint);
  return load_checkpoint(ckpt.string());
}

int cmd_predict(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig rc = resolve(o);
  const auto model = load_model(o, rc);
  rc.train = model.config;
  const auto prov = make_provenance(rc, o);
  log_resolved(err, "predict", rc, prov);
  const auto panel = load_panel(rc);

  std::vector<std::size_t> positions;
  if (o.at.empty()) {
    positions.push_back(panel.size());
  } else {
    for (const auto& text : o.at) {
      const auto pos = panel.index().position(parse_timestamp(text));
      if (!pos && parse_timestamp(text) != panel.index().end()) {
        throw DataError("--at " + text + " is not on the panel's hourly grid");
      }
      positions.push_back(pos.value_or(panel.size()));
    }
  }
  const fs::path path = fs::path(rc.output_dir) / "predictions.csv";
  auto f = open_output(path);
  write_header(f, prov);
  f << "timestamp,forecast_kw,preliminary_kw\n";
  for (auto t : positions) {
    const auto fc = predict_next(model, panel, t);
    f << format_timestamp(panel.index().timestamp(t)) << ',' << format_real(fc.total_kw) << ','
      << format_real(fc.preliminary_kw) << '\n';
  }
  out << "wrote " << positions.size() << " forecasts to " << path.string() << "\n";
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig rc = resolve(o);
  const auto model = load_model(o, rc);
  rc.train = model.config;
  const auto prov = make_provenance(rc, o);
  log_resolved(err, "evaluate", rc, prov);
  const auto panel = load_panel(rc);
  const auto data = prepare_data(model, panel);
  const auto result = evaluate_model(model, data, panel);

  const fs::path dir = rc.output_dir;
  {
    auto f = open_output(dir / "metrics.csv");
    write_header(f, prov);
    f << "tau,epsilon,filter,seed,mae_kw,mape_pct,n_eval,n_skipped\n";
    write_metrics_row(f, model.config, result.full);
  }
  {
    auto f = open_output(dir / "metrics_detail.csv");
    write_header(f, prov);
    f << "model,mae_kw,mape_pct,n_eval,n_skipped\n";
    auto row = [&](const char* name, const MetricReport& m) {
      f << name << ',' << format_real(m.mae) << ',' << format_real(100.0 * m.mape) << ',' << m.n_evaluated << ','
        << m.n_skipped_zero_target << '\n';
    };
    row("collaborative", result.full);
    row("agg_branch", result.preliminary);
    row("persistence", result.persistence);
  }
  {
    auto f = open_output(dir / "forecasts.csv");
    write_header(f, prov);
    f << "timestamp,actual_kw,forecast_kw,preliminary_kw\n";
    for (std::size_t i = 0; i < result.positions.size(); ++i) {
      f << format_timestamp(panel.index().timestamp(result.positions[i])) << ',' << format_real(result.actual_kw[i])
        << ',' << format_real(result.forecast_kw[i]) << ',' << format_real(result.preliminary_kw[i]) << '\n';
    }
  }
  out << "test MAE " << format_real(result.full.mae) << " kW, MAPE " << format_real(100.0 * result.full.mape)
      << "% over " << result.full.n_evaluated << " points (persistence MAPE "
      << format_real(100.0 * result.persistence.mape) << "%)\n";
  return kExitOk;
}

int cmd_ablate(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig rc = resolve(o);
  const auto prov = make_provenance(rc, o);
  log_resolved(err, "ablate", rc, prov);
  const auto panel = load_panel(rc);
  const auto rows = run_ablation(panel, rc.train, rc.sweep);
  const fs::path path = fs::path(rc.output_dir) / "ablation.csv";
  auto f = open_output(path);
  write_header(f, prov);
  write_ablation_csv(rows, f);
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (r.report) continue;
    ++failed;
    err << "cell tau=" << r.tau << " epsilon=" << format_real(r.epsilon) << " filter=" << (r.filter ? "on" : "off")
        << " failed: " << r.error << "\n";
  }
  out << rows.size() << " cells (" << failed << " failed); wrote " << path.string() << "\n";
  return kExitOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--csv", o.csv, "Hourly panel CSV");
  sub->add_option("--ukdale-dir", o.ukdale_dir, "UK-DALE root directory (containing house_N/)");
  sub->add_option("--house", o.house, "UK-DALE house number");
  sub->add_option("--channels", o.channels, "UK-DALE appliance channel ids")->delimiter(',');
  sub->add_option("--start", o.start, "First timestamp to keep (inclusive)");
  sub->add_option("--end", o.end, "Timestamp to stop before (exclusive)");
  sub->add_option("--out", o.out_dir, "Output directory");
  sub->add_option("--set", o.sets, "Override a training key, key=value (repeatable)");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--tau", o.tau, "Window length");
  sub->add_option("--epsilon", o.epsilon, "Clustering radius");
  sub->add_option("--alpha", o.alpha, "Periodicity weight in ctrb");
  sub->add_option("--sigma-rel", o.sigma_rel, "Residual std target relative to std(total)");
  sub->add_option("--workers", o.workers, "Parallel trainers");
  sub->add_option("--tz-offset", o.tz_offset, "Seconds added to UTC for calendar features");
  sub->add_flag("--no-filter", o.no_filter, "Keep every monitored appliance");
  sub->add_flag("--paper-relu-gates", o.relu_gates, "Use ReLU for the forget, input and output gates");
  sub->add_option("--fixed-timestamp", o.fixed_timestamp, "Timestamp written into output headers");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bottom-up short-term load forecasting", "gcabulf"};
  app.set_version_flag("--version", GCABULF_VERSION);
  app.require_subcommand(1);
  Options o;

  using Handler = int (*)(const Options&, std::ostream&, std::ostream&);
  std::vector<std::pair<CLI::App*, Handler>> commands;
  auto add = [&](const char* name, const char* help, Handler h) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    commands.emplace_back(sub, h);
    return sub;
  };
  add("synth", "Generate a preset synthetic household", cmd_synth)
      ->add_option("--preset", o.preset, "Preset name")
      ->required();
  add("ingest", "Resample UK-DALE channels into an hourly panel CSV", cmd_ingest);
  add("filter", "Rank appliances and select the critical set", cmd_filter);
  add("group", "Cluster critical appliances by lagged usage correlation", cmd_group);
  add("train", "Train the forecaster and write a checkpoint", cmd_train)
      ->add_option("--checkpoint", o.checkpoint, "Checkpoint path (default <out>/model.ckpt)");
  auto* predict = add("predict", "Forecast the next hour at given timestamps", cmd_predict);
  predict->add_option("--checkpoint", o.checkpoint, "Checkpoint path (default <out>/model.ckpt)");
  predict->add_option("--at", o.at, "Timestamp to forecast (default: the hour after the panel)");
  add("evaluate", "Test-split metrics for a trained checkpoint", cmd_evaluate)
      ->add_option("--checkpoint", o.checkpoint, "Checkpoint path (default <out>/model.ckpt)");
  auto* ablate = add("ablate", "Train and test over a tau x epsilon x filter grid", cmd_ablate);
  ablate->add_option("--taus", o.taus, "Comma-separated window lengths");
  ablate->add_option("--epsilons", o.epsilons, "Comma-separated clustering radii");
  ablate->add_option("--filters", o.filters, "Comma-separated on/off");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << GCABULF_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    for (const auto& [sub, h] : commands) {
      if (sub->parsed()) {
        err << sub->help();
        return kExitUsage;
      }
    }
    err << app.help();
    return kExitUsage;
  }

  try {
    for (const auto& [sub, h] : commands) {
      if (sub->parsed()) return h(o, out, err);
    }
    err << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TrainingError& e) {
    err << "training error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace gcabulf::cli
