#include "gcabulf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>

#include <json.hpp>

#include "gcabulf/errors.hpp"

namespace gcabulf {

namespace {

constexpr int kHoursPerDay = 24;
constexpr int kMaxLagHours = 6;

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void validate_spec(const HouseholdSpec& spec) {
  if (spec.days < 2) throw UsageError("household spec needs at least 2 days");
  if (spec.base_kw < 0.0 || spec.meter_noise_kw < 0.0) throw UsageError("base load and meter noise must be non-negative");
  std::map<std::string, std::size_t> seen;
  auto check = [&](const std::vector<ApplianceSpec>& list, bool monitored) {
    for (const auto& a : list) {
      if (!(a.power_kw > 0.0)) throw UsageError("appliance '" + a.name + "': power must be positive");
      if (a.jitter_hours < 0.0 || a.noise_kw < 0.0) throw UsageError("appliance '" + a.name + "': jitter and noise must be non-negative");
      if (a.random_rate < 0.0 || a.random_rate > 1.0 || a.random_duration_hours < 1) {
        throw UsageError("appliance '" + a.name + "': invalid random event settings");
      }
      for (const auto& w : a.windows) {
        if (w.start_hour < 0 || w.end_hour > kHoursPerDay || w.start_hour >= w.end_hour || w.probability < 0.0 ||
            w.probability > 1.0) {
          throw UsageError("appliance '" + a.name + "': invalid on-window");
        }
      }
      if (a.link) {
        if (std::abs(a.link->lag_hours) > kMaxLagHours) throw UsageError("appliance '" + a.name + "': lag outside [-6, 6]");
        const auto it = seen.find(a.link->partner);
        if (it == seen.end()) throw UsageError("appliance '" + a.name + "': partner must be listed earlier");
        if (monitored && it->second == 1) throw UsageError("appliance '" + a.name + "': partner must be monitored");
      }
      if (!seen.emplace(a.name, monitored ? 0 : 1).second) throw UsageError("duplicate appliance name '" + a.name + "'");
    }
  };
  check(spec.appliances, true);
  check(spec.unmonitored, false);
}

std::vector<std::uint8_t> on_pattern(const ApplianceSpec& a, std::size_t hours, std::mt19937_64& rng,
                                     const std::map<std::string, std::vector<std::uint8_t>>& done) {
  std::vector<std::uint8_t> on(hours, 0);
  if (a.link) {
    const auto& partner = done.at(a.link->partner);
    for (std::size_t t = 0; t < hours; ++t) {
      const auto src = static_cast<std::int64_t>(t) - a.link->lag_hours;
      if (src >= 0 && src < static_cast<std::int64_t>(hours)) on[t] = partner[static_cast<std::size_t>(src)];
    }
    return on;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t days = hours / kHoursPerDay;
  for (std::size_t d = 0; d < days; ++d) {
    for (const auto& w : a.windows) {
      const bool take = unit(rng) < w.probability;
      const double z = gauss(rng);
      if (!take) continue;
      const auto shift = a.jitter_hours > 0.0 ? static_cast<std::int64_t>(std::lround(z * a.jitter_hours)) : 0;
      const auto day0 = static_cast<std::int64_t>(d * kHoursPerDay);
      for (auto h = day0 + w.start_hour + shift; h < day0 + w.end_hour + shift; ++h) {
        if (h >= 0 && h < static_cast<std::int64_t>(hours)) on[static_cast<std::size_t>(h)] = 1;
      }
    }
  }
  if (a.random_rate > 0.0) {
    for (std::size_t t = 0; t < hours; ++t) {
      if (unit(rng) >= a.random_rate) continue;
      for (std::size_t k = t; k < std::min(hours, t + static_cast<std::size_t>(a.random_duration_hours)); ++k) on[k] = 1;
    }
  }
  return on;
}

std::vector<double> to_load(const ApplianceSpec& a, const std::vector<std::uint8_t>& on, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> flat(-1.0, 1.0);
  std::vector<double> load(on.size(), 0.0);
  for (std::size_t t = 0; t < on.size(); ++t) {
    if (!on[t]) continue;
    load[t] = a.power_kw;
    if (a.noise_kw > 0.0) load[t] = std::max(0.0, load[t] + a.noise_kw * (a.uniform_noise ? flat(rng) : gauss(rng)));
  }
  return load;
}

double variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size());
}

double pattern_wgss(const std::vector<std::uint8_t>& on) {
  const std::size_t days = on.size() / kHoursPerDay;
  double wgss = 0.0;
  for (int h = 0; h < kHoursPerDay; ++h) {
    double mean = 0.0;
    for (std::size_t d = 0; d < days; ++d) mean += on[d * kHoursPerDay + h];
    mean /= static_cast<double>(days);
    for (std::size_t d = 0; d < days; ++d) {
      const double e = on[d * kHoursPerDay + h] - mean;
      wgss += e * e;
    }
  }
  return wgss;
}

ApplianceSpec scheduled(std::string name, double power, std::vector<OnWindow> windows, double jitter, double noise = 0.0) {
  ApplianceSpec a;
  a.name = std::move(name);
  a.power_kw = power;
  a.windows = std::move(windows);
  a.jitter_hours = jitter;
  a.noise_kw = noise;
  return a;
}

ApplianceSpec erratic(std::string name, double power, double rate, int duration) {
  ApplianceSpec a;
  a.name = std::move(name);
  a.power_kw = power;
  a.random_rate = rate;
  a.random_duration_hours = duration;
  return a;
}

// Always on, reading fluctuates independently every hour.
ApplianceSpec standby(std::string name, double power, double noise) {
  ApplianceSpec a = scheduled(std::move(name), power, {{0, 24, 1.0}}, 0.0, noise);
  a.uniform_noise = true;
  return a;
}

// Compressor-style duty cycle: `on` hours running, `off` hours idle, all day.
ApplianceSpec cycling(std::string name, double power, int on, int off, double probability) {
  std::vector<OnWindow> windows;
  for (int h = 0; h + on <= 24; h += on + off) windows.push_back({h, h + on, probability});
  return scheduled(std::move(name), power, std::move(windows), 0.0);
}

ApplianceSpec linked(std::string name, double power, std::string partner, int lag) {
  ApplianceSpec a;
  a.name = std::move(name);
  a.power_kw = power;
  a.link = ApplianceLink{std::move(partner), lag};
  return a;
}

}  // namespace

SynthResult generate_household(const HouseholdSpec& spec) {
  validate_spec(spec);
  const std::size_t hours = spec.days * kHoursPerDay;
  const TimeIndex index{spec.start, kSecondsPerHour, hours};

  std::map<std::string, std::vector<std::uint8_t>> patterns;
  std::vector<std::vector<double>> monitored;
  std::vector<double> total(hours, spec.base_kw);
  std::uint64_t stream = 0;
  auto generate = [&](const ApplianceSpec& a) {
    std::mt19937_64 rng(stream_seed(spec.seed, stream++));
    auto on = on_pattern(a, hours, rng, patterns);
    auto load = to_load(a, on, rng);
    patterns[a.name] = std::move(on);
    for (std::size_t t = 0; t < hours; ++t) total[t] += load[t];
    return load;
  };
  for (const auto& a : spec.appliances) monitored.push_back(generate(a));
  for (const auto& a : spec.unmonitored) generate(a);

  if (spec.meter_noise_kw > 0.0) {
    std::mt19937_64 rng(stream_seed(spec.seed, 1'000'000));
    std::normal_distribution<double> gauss(0.0, spec.meter_noise_kw);
    for (auto& v : total) v = std::max(0.0, v + gauss(rng));
  }

  SynthResult out;
  out.truth.preset = spec.name;
  const double total_var = variance(total);
  std::vector<ApplianceMeta> meta;
  std::vector<LoadSeries> series;
  for (std::size_t i = 0; i < spec.appliances.size(); ++i) {
    const auto& a = spec.appliances[i];
    const int id = static_cast<int>(i) + 1;
    meta.push_back({id, a.name});
    ApplianceTruth t;
    t.id = id;
    t.name = a.name;
    t.variance = variance(monitored[i]);
    t.variance_share = total_var > 0.0 ? t.variance / total_var : 0.0;
    t.raw_wgss = pattern_wgss(patterns[a.name]);
    out.truth.appliances.push_back(t);
    if (a.link) out.truth.links.push_back({a.link->partner, a.name, a.link->lag_hours});
    series.emplace_back(index, std::move(monitored[i]));
  }
  out.panel = AppliancePanel(std::move(meta), std::move(series), LoadSeries(index, std::move(total)));
  return out;
}

std::vector<std::string> preset_names() {
  return {"critical-vs-noise", "two-linked-groups", "periodic-vs-erratic", "bottom-up-60d"};
}

HouseholdSpec preset_scenario(const std::string& name) {
  HouseholdSpec s;
  s.name = name;
  if (name == "critical-vs-noise") {
    s.days = 28;
    s.seed = 11;
    s.appliances = {
        scheduled("heater", 2.0, {{6, 9, 0.9}, {17, 23, 0.9}}, 0.5),
        scheduled("oven", 1.5, {{17, 19, 0.8}}, 0.5),
        scheduled("washer", 1.2, {{9, 12, 0.6}}, 0.5),
        erratic("charger", 0.02, 0.05, 2),
        erratic("led", 0.01, 0.08, 1),
        erratic("router", 0.015, 0.1, 1),
    };
  } else if (name == "two-linked-groups") {
    s.days = 28;
    s.seed = 12;
    s.appliances = {
        scheduled("kettle", 2.0, {{7, 8, 0.8}, {16, 17, 0.5}}, 1.0),
        linked("toaster", 0.8, "kettle", 0),
        scheduled("tv", 0.15, {{19, 23, 0.85}}, 1.0),
        linked("console", 0.2, "tv", 2),
        erratic("fridge", 0.1, 0.1, 2),
        erratic("dehumidifier", 0.3, 0.05, 3),
    };
  } else if (name == "periodic-vs-erratic") {
    s.days = 28;
    s.seed = 13;
    s.appliances = {
        scheduled("periodic", 1.0, {{18, 21, 1.0}}, 0.0),
        erratic("erratic", 1.0, 0.042, 3),
    };
  } else if (name == "bottom-up-60d") {
    s.days = 60;
    s.seed = 14;
    s.base_kw = 0.25;
    s.appliances = {
        scheduled("heater", 2.0, {{6, 9, 0.9}, {17, 22, 0.9}}, 0.5, 0.05),
        scheduled("kettle", 1.8, {{7, 8, 0.8}, {13, 14, 0.4}, {18, 19, 0.6}}, 0.5),
        linked("toaster", 0.8, "kettle", 0),
        scheduled("oven", 1.5, {{17, 19, 0.7}}, 0.5),
        scheduled("washer", 1.0, {{10, 13, 0.4}}, 1.0),
        linked("dryer", 1.2, "washer", 3),
        standby("phone", 0.01, 0.008),
        standby("router", 0.015, 0.01),
        standby("lamp", 0.03, 0.02),
        standby("clock", 0.005, 0.004),
    };
    s.unmonitored = {cycling("fridge", 0.12, 1, 2, 0.95), erratic("misc", 0.3, 0.05, 2)};
  } else {
    throw UsageError("unknown preset '" + name + "'");
  }
  return s;
}

SynthResult generate_preset(const std::string& name, std::optional<std::uint64_t> seed) {
  auto spec = preset_scenario(name);
  if (seed) spec.seed = *seed;
  auto out = generate_household(spec);
  auto& t = out.truth;
  if (name == "critical-vs-noise") {
    t.expected_critical = {"heater", "oven", "washer"};
    t.noise_appliances = {"charger", "led", "router"};
  } else if (name == "two-linked-groups") {
    t.expected_groups = {{"kettle", "toaster"}, {"tv", "console"}, {"fridge"}, {"dehumidifier"}};
  } else if (name == "bottom-up-60d") {
    t.noise_appliances = {"phone", "router", "lamp", "clock"};
  }
  return out;
}

void write_ground_truth_json(const GroundTruth& truth, std::ostream& out) {
  nlohmann::ordered_json j;
  j["preset"] = truth.preset;
  j["appliances"] = nlohmann::ordered_json::array();
  for (const auto& a : truth.appliances) {
    j["appliances"].push_back({{"id", a.id},
                               {"name", a.name},
                               {"variance", a.variance},
                               {"variance_share", a.variance_share},
                               {"raw_wgss", a.raw_wgss}});
  }
  j["links"] = nlohmann::ordered_json::array();
  for (const auto& l : truth.links) j["links"].push_back({{"a", l.a}, {"b", l.b}, {"lag_hours", l.lag_hours}});
  j["expected_critical"] = truth.expected_critical;
  j["expected_groups"] = truth.expected_groups;
  j["noise_appliances"] = truth.noise_appliances;
  out << j.dump(2) << '\n';
}

}  // namespace gcabulf
