#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gcabulf/ingest.hpp"

namespace gcabulf {

/// Daily on-window [start_hour, end_hour), taken on a given day with `probability`.
struct OnWindow {
  int start_hour = 0;
  int end_hour = 1;
  double probability = 1.0;
};

/// The appliance mirrors `partner`'s on-state `lag_hours` later (negative lag: earlier).
struct ApplianceLink {
  std::string partner;
  int lag_hours = 0;
};

struct ApplianceSpec {
  std::string name;
  double power_kw = 1.0;
  std::vector<OnWindow> windows;
  double jitter_hours = 0.0;            // stddev of the daily window shift
  std::optional<ApplianceLink> link;    // overrides windows and random events
  double noise_kw = 0.0;                // stddev of the draw while on
  bool uniform_noise = false;           // draw from [-noise_kw, noise_kw] instead
  double random_rate = 0.0;             // per-hour probability of an unscheduled start
  int random_duration_hours = 1;
};

struct HouseholdSpec {
  std::string name;
  std::vector<ApplianceSpec> appliances;   // monitored, ids 1..n in order
  std::vector<ApplianceSpec> unmonitored;  // contribute to the total only
  double base_kw = 0.2;
  double meter_noise_kw = 0.005;
  std::size_t days = 14;
  std::uint64_t seed = 1;
  std::int64_t start = 1357516800;  // 2013-01-07T00:00:00Z, a Monday
};

struct ApplianceTruth {
  int id = 0;
  std::string name;
  double variance = 0.0;        // of the generated series
  double variance_share = 0.0;  // variance / variance of the total
  double raw_wgss = 0.0;        // of the noise-free on/off pattern over daily segments
};

struct LinkTruth {
  std::string a;
  std::string b;
  int lag_hours = 0;
};

struct GroundTruth {
  std::string preset;
  std::vector<ApplianceTruth> appliances;
  std::vector<LinkTruth> links;
  std::vector<std::string> expected_critical;               // empty when not planted
  std::vector<std::vector<std::string>> expected_groups;    // empty when not planted
  std::vector<std::string> noise_appliances;
};

struct SynthResult {
  AppliancePanel panel;
  GroundTruth truth;
};

/// Throws UsageError for an invalid spec (power <= 0, lag outside [-6, 6], unknown or later partner, days < 2).
SynthResult generate_household(const HouseholdSpec& spec);

/// Names accepted by preset_scenario.
std::vector<std::string> preset_names();

/// `critical-vs-noise`, `two-linked-groups`, `periodic-vs-erratic`, `bottom-up-60d`.
HouseholdSpec preset_scenario(const std::string& name);

/// Planted expectations for a preset, merged into the ground truth by generate_preset.
SynthResult generate_preset(const std::string& name, std::optional<std::uint64_t> seed = std::nullopt);

void write_ground_truth_json(const GroundTruth& truth, std::ostream& out);

}  // namespace gcabulf
