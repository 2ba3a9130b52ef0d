#include "gcabulf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include "gcabulf/errors.hpp"

namespace gcabulf {

namespace {

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError("config key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& text) {
  Int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError("config key '" + key + "': expected an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw UsageError("config key '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  std::size_t begin = 0;
  for (;;) {
    const auto comma = text.find(',', begin);
    out.push_back(parse_integer<std::size_t>(key, text.substr(begin, comma - begin)));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return out;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string to_string(AggFeatures f) { return f == AggFeatures::Raw ? "raw" : "dwt"; }

AggFeatures agg_features_from_string(const std::string& s) {
  if (s == "dwt") return AggFeatures::Dwt;
  if (s == "raw") return AggFeatures::Raw;
  throw UsageError("unknown aggregate feature mode '" + s + "' (expected dwt or raw)");
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::size_t TrainConfig::history() const { return std::max(buffer_len, tau); }

void validate(const TrainConfig& c) {
  auto fail = [](const std::string& msg) { throw UsageError("invalid config: " + msg); };
  if (c.tau == 0) fail("tau must be positive");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (!(c.sigma_rel >= 0.0)) fail("sigma_rel must be non-negative");
  if (!(c.epsilon > 0.0 && c.epsilon <= 1.0)) fail("epsilon must lie in (0, 1]");
  if (c.day_len == 0) fail("day_len must be positive");
  if (c.hidden_dim == 0) fail("hidden_dim must be positive");
  if (std::find(c.fc_hidden.begin(), c.fc_hidden.end(), std::size_t{0}) != c.fc_hidden.end()) fail("fc_hidden widths must be positive");
  if (std::find(c.co_hidden.begin(), c.co_hidden.end(), std::size_t{0}) != c.co_hidden.end()) fail("co_hidden widths must be positive");
  if (c.buffer_len < c.tau) fail("buffer_len must be at least tau");
  if (c.agg_features == AggFeatures::Dwt && c.buffer_len < (std::size_t{1} << kDwtLevels)) fail("buffer_len must be at least 16");
  if (!(c.lr_stage1 > 0.0) || !(c.lr_stage2 > 0.0)) fail("learning rates must be positive");
  if (!(c.finetune_lr_scale >= 0.0)) fail("finetune_lr_scale must be non-negative");
  if (c.batch_size == 0) fail("batch_size must be positive");
  const auto& s = c.split;
  if (!(s.train > 0.0) || !(s.val >= 0.0) || !(s.test >= 0.0)) fail("split fractions must be non-negative, train positive");
  if (std::abs(s.train + s.val + s.test - 1.0) > 1e-9) fail("split fractions must sum to 1");
  if (c.workers == 0) fail("workers must be positive");
}

std::vector<std::pair<std::string, std::string>> to_key_values(const TrainConfig& c) {
  return {
      {"tau", std::to_string(c.tau)},
      {"alpha", format_real(c.alpha)},
      {"sigma_rel", format_real(c.sigma_rel)},
      {"epsilon", format_real(c.epsilon)},
      {"delta", std::to_string(c.delta)},
      {"day_len", std::to_string(c.day_len)},
      {"use_filtering", bool_text(c.use_filtering)},
      {"hidden_dim", std::to_string(c.hidden_dim)},
      {"fc_hidden", join_sizes(c.fc_hidden)},
      {"co_hidden", join_sizes(c.co_hidden)},
      {"gates", to_string(c.gates)},
      {"readout", to_string(c.readout)},
      {"agg_features", to_string(c.agg_features)},
      {"wavelet", to_string(c.wavelet)},
      {"buffer_len", std::to_string(c.buffer_len)},
      {"lr_stage1", format_real(c.lr_stage1)},
      {"lr_stage2", format_real(c.lr_stage2)},
      {"finetune_lr_scale", format_real(c.finetune_lr_scale)},
      {"freeze_subnets", bool_text(c.freeze_subnets)},
      {"epochs_stage1", std::to_string(c.epochs_stage1)},
      {"epochs_stage2", std::to_string(c.epochs_stage2)},
      {"batch_size", std::to_string(c.batch_size)},
      {"patience", std::to_string(c.patience)},
      {"seed", std::to_string(c.seed)},
      {"split_train", format_real(c.split.train)},
      {"split_val", format_real(c.split.val)},
      {"split_test", format_real(c.split.test)},
      {"tz_offset_s", std::to_string(c.tz_offset_s)},
      {"workers", std::to_string(c.workers)},
  };
}

void set_config_value(TrainConfig& c, const std::string& key, const std::string& v) {
  using Setter = std::function<void(TrainConfig&, const std::string&)>;
  static const std::map<std::string, Setter> setters = {
      {"tau", [](TrainConfig& c, const std::string& v) { c.tau = parse_integer<std::size_t>("tau", v); }},
      {"alpha", [](TrainConfig& c, const std::string& v) { c.alpha = parse_real("alpha", v); }},
      {"sigma_rel", [](TrainConfig& c, const std::string& v) { c.sigma_rel = parse_real("sigma_rel", v); }},
      {"epsilon", [](TrainConfig& c, const std::string& v) { c.epsilon = parse_real("epsilon", v); }},
      {"delta", [](TrainConfig& c, const std::string& v) { c.delta = parse_integer<std::size_t>("delta", v); }},
      {"day_len", [](TrainConfig& c, const std::string& v) { c.day_len = parse_integer<std::size_t>("day_len", v); }},
      {"use_filtering", [](TrainConfig& c, const std::string& v) { c.use_filtering = parse_bool("use_filtering", v); }},
      {"hidden_dim", [](TrainConfig& c, const std::string& v) { c.hidden_dim = parse_integer<std::size_t>("hidden_dim", v); }},
      {"fc_hidden", [](TrainConfig& c, const std::string& v) { c.fc_hidden = parse_sizes("fc_hidden", v); }},
      {"co_hidden", [](TrainConfig& c, const std::string& v) { c.co_hidden = parse_sizes("co_hidden", v); }},
      {"gates", [](TrainConfig& c, const std::string& v) { c.gates = gate_activation_from_string(v); }},
      {"readout", [](TrainConfig& c, const std::string& v) { c.readout = lstm_readout_from_string(v); }},
      {"agg_features", [](TrainConfig& c, const std::string& v) { c.agg_features = agg_features_from_string(v); }},
      {"wavelet", [](TrainConfig& c, const std::string& v) { c.wavelet = wavelet_family_from_string(v); }},
      {"buffer_len", [](TrainConfig& c, const std::string& v) { c.buffer_len = parse_integer<std::size_t>("buffer_len", v); }},
      {"lr_stage1", [](TrainConfig& c, const std::string& v) { c.lr_stage1 = parse_real("lr_stage1", v); }},
      {"lr_stage2", [](TrainConfig& c, const std::string& v) { c.lr_stage2 = parse_real("lr_stage2", v); }},
      {"finetune_lr_scale", [](TrainConfig& c, const std::string& v) { c.finetune_lr_scale = parse_real("finetune_lr_scale", v); }},
      {"freeze_subnets", [](TrainConfig& c, const std::string& v) { c.freeze_subnets = parse_bool("freeze_subnets", v); }},
      {"epochs_stage1", [](TrainConfig& c, const std::string& v) { c.epochs_stage1 = parse_integer<std::size_t>("epochs_stage1", v); }},
      {"epochs_stage2", [](TrainConfig& c, const std::string& v) { c.epochs_stage2 = parse_integer<std::size_t>("epochs_stage2", v); }},
      {"batch_size", [](TrainConfig& c, const std::string& v) { c.batch_size = parse_integer<std::size_t>("batch_size", v); }},
      {"patience", [](TrainConfig& c, const std::string& v) { c.patience = parse_integer<std::size_t>("patience", v); }},
      {"seed", [](TrainConfig& c, const std::string& v) { c.seed = parse_integer<std::uint64_t>("seed", v); }},
      {"split_train", [](TrainConfig& c, const std::string& v) { c.split.train = parse_real("split_train", v); }},
      {"split_val", [](TrainConfig& c, const std::string& v) { c.split.val = parse_real("split_val", v); }},
      {"split_test", [](TrainConfig& c, const std::string& v) { c.split.test = parse_real("split_test", v); }},
      {"tz_offset_s", [](TrainConfig& c, const std::string& v) { c.tz_offset_s = parse_integer<std::int64_t>("tz_offset_s", v); }},
      {"workers", [](TrainConfig& c, const std::string& v) { c.workers = parse_integer<std::size_t>("workers", v); }},
  };
  const auto it = setters.find(key);
  if (it == setters.end()) throw UsageError("unknown config key '" + key + "'");
  it->second(c, v);
}

}  // namespace gcabulf
