#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gcabulf/series.hpp"

namespace gcabulf {

struct ApplianceMeta {
  int id = 0;  // channel number, unique within a panel
  std::string name;
};

/// Total load plus monitored appliance loads on one shared hourly grid.
///
/// Construction enforces sum(valid appliance loads) <= total + n * kPanelSlackKw at
/// every valid step; offending steps are masked in every series and counted.
class AppliancePanel {
 public:
  static constexpr double kPanelSlackKw = 1e-6;

  AppliancePanel() = default;
  AppliancePanel(std::vector<ApplianceMeta> meta, std::vector<LoadSeries> appliances, LoadSeries total);

  const TimeIndex& index() const { return total_.index(); }
  std::size_t size() const { return total_.size(); }
  std::size_t appliance_count() const { return meta_.size(); }
  const std::vector<ApplianceMeta>& meta() const { return meta_; }
  const std::vector<LoadSeries>& appliances() const { return appliances_; }
  const LoadSeries& appliance(std::size_t i) const { return appliances_.at(i); }
  const LoadSeries& total() const { return total_; }
  /// Position of the appliance with channel `id`; throws DataError if absent.
  std::size_t position_of(int id) const;
  /// Number of steps masked because monitored loads exceeded the total.
  std::size_t masked_violations() const { return masked_violations_; }

  /// Panel restricted to the listed appliance ids (in that order).
  AppliancePanel select(const std::vector<int>& ids) const;

 private:
  std::vector<ApplianceMeta> meta_;
  std::vector<LoadSeries> appliances_;
  LoadSeries total_;
  std::size_t masked_violations_ = 0;
};

struct UkdaleOptions {
  int aggregate_channel = 1;
  ResampleOptions resample;
};

/// Reads one UK-DALE house directory (`labels.dat`, `channel_N.dat`).
AppliancePanel load_ukdale_house(const std::filesystem::path& dir, const std::vector<int>& channel_ids,
                                 const UkdaleOptions& options = {});

/// Parses "unix_ts watts" lines; throws DataError with the line number on malformed input.
std::vector<RawSample> read_ukdale_channel(const std::filesystem::path& file);

/// Parses an ISO-8601 UTC date-time ("2013-04-01T05:00:00Z", "2013-04-01 05:00", "2013-04-01")
/// or integral epoch seconds.
std::int64_t parse_timestamp(const std::string& text);
/// ISO-8601 UTC rendering, e.g. "2013-04-01T05:00:00Z".
std::string format_timestamp(std::int64_t epoch_seconds);

/// Reads a `timestamp,total,<name>...` CSV panel of hourly kW values. Lines starting with '#'
/// are comments; empty cells are masked.
AppliancePanel load_csv_panel(const std::filesystem::path& path);
AppliancePanel read_csv_panel(std::istream& in, const std::string& source_name = "<stream>");

/// Writes the panel in the format read by load_csv_panel (values at round-trip precision).
void write_csv_panel(const AppliancePanel& panel, std::ostream& out);

/// Steps with timestamps in [start, end).
AppliancePanel align_panel(const AppliancePanel& panel, std::int64_t start, std::int64_t end);

}  // namespace gcabulf
