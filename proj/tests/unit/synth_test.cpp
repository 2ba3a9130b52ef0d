#include <algorithm>
#include <vector>

#include "doctest.h"
#include "gcabulf/errors.hpp"
#include "gcabulf/filtering.hpp"
#include "gcabulf/grouping.hpp"
#include "gcabulf/synth.hpp"

using namespace gcabulf;

namespace {

ApplianceSpec plain(std::string name, double power, std::vector<OnWindow> windows) {
  ApplianceSpec a;
  a.name = std::move(name);
  a.power_kw = power;
  a.windows = std::move(windows);
  return a;
}

}  // namespace

TEST_CASE("single appliance composition") {
  HouseholdSpec spec;
  spec.appliances = {plain("heater", 2.0, {{6, 9, 1.0}})};
  spec.meter_noise_kw = 0.0;
  spec.days = 3;
  const auto r = generate_household(spec);
  const auto& p = r.panel;
  REQUIRE(p.size() == 72);
  for (std::size_t t = 0; t < p.size(); ++t) CHECK(p.total()[t] - spec.base_kw == doctest::Approx(p.appliance(0)[t]));
  CHECK(p.appliance(0)[6] == 2.0);
  CHECK(p.appliance(0)[9] == 0.0);
}

TEST_CASE("linked appliances") {
  HouseholdSpec spec;
  spec.days = 6;
  auto a = plain("a", 1.0, {{7, 9, 0.7}, {18, 20, 0.6}});
  auto b = plain("b", 0.5, {});
  b.link = ApplianceLink{"a", 0};
  auto c = plain("c", 0.4, {});
  c.link = ApplianceLink{"a", 2};
  spec.appliances = {a, b, c};
  const auto r = generate_household(spec);
  const auto ua = usage_vector(r.panel.appliance(0));
  const auto ub = usage_vector(r.panel.appliance(1));
  const auto uc = usage_vector(r.panel.appliance(2));
  CHECK(ua.bits == ub.bits);
  CHECK(correlation_distance_matrix({ua, ub}, {1, 2}, 6)(0, 1) == doctest::Approx(0.0));
  const auto lc = lag_correlation_scan(ua.bits, uc.bits, 6);
  CHECK(lc.lag == 2);
  CHECK(lc.value == doctest::Approx(1.0));
}

TEST_CASE("spec validation") {
  HouseholdSpec spec;
  spec.appliances = {plain("a", 0.0, {{1, 2, 1.0}})};
  CHECK_THROWS_AS(generate_household(spec), UsageError);
  spec.appliances = {plain("a", 1.0, {{1, 2, 1.0}}), plain("b", 1.0, {})};
  spec.appliances[1].link = ApplianceLink{"a", 7};
  CHECK_THROWS_AS(generate_household(spec), UsageError);
  spec.appliances[1].link = ApplianceLink{"missing", 0};
  CHECK_THROWS_AS(generate_household(spec), UsageError);
  CHECK_THROWS_AS(generate_preset("no-such-preset"), UsageError);
}

TEST_CASE("presets are deterministic") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto a = generate_preset(name);
    const auto b = generate_preset(name);
    REQUIRE(a.panel.size() == b.panel.size());
    CHECK(std::equal(a.panel.total().values().begin(), a.panel.total().values().end(),
                     b.panel.total().values().begin()));
    const auto c = generate_preset(name, 999);
    CHECK_FALSE(std::equal(a.panel.total().values().begin(), a.panel.total().values().end(),
                           c.panel.total().values().begin()));
  }
}

TEST_CASE("critical-vs-noise selects the planted appliances") {
  const auto r = generate_preset("critical-vs-noise");
  const auto f = filter_critical_relative(r.panel, contribution_rank(r.panel, 0.5, 24), 0.2);
  std::vector<std::string> names;
  for (int id : f.critical_ids) names.push_back(r.panel.meta()[r.panel.position_of(id)].name);
  std::sort(names.begin(), names.end());
  auto expected = r.truth.expected_critical;
  std::sort(expected.begin(), expected.end());
  CHECK(names == expected);
}

TEST_CASE("two-linked-groups recovers the pairs") {
  const auto r = generate_preset("two-linked-groups");
  std::vector<UsageVector> usage;
  std::vector<int> ids;
  for (std::size_t i = 0; i < r.panel.appliance_count(); ++i) {
    usage.push_back(usage_vector(r.panel.appliance(i)));
    ids.push_back(r.panel.meta()[i].id);
  }
  const auto groups = cluster_appliances(correlation_distance_matrix(usage, ids, 6), 0.3);
  CHECK(groups.group_count() == 4);
  std::vector<std::vector<std::string>> named;
  for (const auto& g : groups.groups) {
    std::vector<std::string> n;
    for (int id : g) n.push_back(r.panel.meta()[r.panel.position_of(id)].name);
    named.push_back(n);
  }
  for (const auto& want : r.truth.expected_groups) CHECK(std::find(named.begin(), named.end(), want) != named.end());
}

TEST_CASE("periodic-vs-erratic") {
  const auto r = generate_preset("periodic-vs-erratic");
  const auto s = periodicity_scores(r.panel, 24);
  CHECK(s.period[0] > s.period[1]);
}
