#include "gcabulf/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gcabulf/errors.hpp"

namespace gcabulf {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  for (;;) {
    const auto pos = line.find(delim, begin);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(begin));
      return out;
    }
    out.push_back(line.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::map<int, std::string> read_labels(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::map<int, std::string> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto space = body.find_first_of(" \t");
    int id = 0;
    if (space == std::string_view::npos || !parse_int(body.substr(0, space), id)) {
      throw DataError(file.string() + ":" + std::to_string(line_no) + ": malformed label line");
    }
    labels[id] = std::string(trim(body.substr(space + 1)));
  }
  return labels;
}

}  // namespace

AppliancePanel::AppliancePanel(std::vector<ApplianceMeta> meta, std::vector<LoadSeries> appliances, LoadSeries total)
    : meta_(std::move(meta)), appliances_(std::move(appliances)), total_(std::move(total)) {
  if (meta_.size() != appliances_.size()) throw DataError("panel: metadata and series counts differ");
  std::set<int> ids;
  for (const auto& m : meta_) {
    if (!ids.insert(m.id).second) throw DataError("panel: duplicate appliance id " + std::to_string(m.id));
  }
  for (const auto& a : appliances_) {
    if (!(a.index() == total_.index())) throw DataError("panel: appliance series index differs from total");
  }

  const std::size_t m = total_.size();
  const double slack = kPanelSlackKw * static_cast<double>(appliances_.size());
  std::vector<std::uint8_t> keep(m, 1);
  for (std::size_t t = 0; t < m; ++t) {
    if (!total_.valid(t)) continue;
    double sum = 0.0;
    for (const auto& a : appliances_) {
      if (a.valid(t)) sum += a[t];
    }
    if (sum > total_[t] + slack) {
      keep[t] = 0;
      ++masked_violations_;
    }
  }
  if (masked_violations_ == 0) return;

  auto masked = [&](const LoadSeries& s) {
    std::vector<double> v(s.values().begin(), s.values().end());
    std::vector<std::uint8_t> mk(s.mask().begin(), s.mask().end());
    for (std::size_t t = 0; t < m; ++t) mk[t] = static_cast<std::uint8_t>(mk[t] & keep[t]);
    return LoadSeries(s.index(), std::move(v), std::move(mk));
  };
  total_ = masked(total_);
  for (auto& a : appliances_) a = masked(a);
}

std::size_t AppliancePanel::position_of(int id) const {
  for (std::size_t i = 0; i < meta_.size(); ++i) {
    if (meta_[i].id == id) return i;
  }
  throw DataError("panel has no appliance with id " + std::to_string(id));
}

AppliancePanel AppliancePanel::select(const std::vector<int>& ids) const {
  std::vector<ApplianceMeta> meta;
  std::vector<LoadSeries> series;
  for (int id : ids) {
    const auto pos = position_of(id);
    meta.push_back(meta_[pos]);
    series.push_back(appliances_[pos]);
  }
  AppliancePanel out(std::move(meta), std::move(series), total_);
  out.masked_violations_ += masked_violations_;
  return out;
}

std::vector<RawSample> read_ukdale_channel(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::vector<RawSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto space = body.find_first_of(" \t");
    RawSample s{};
    if (space == std::string_view::npos) {
      throw DataError(file.string() + ":" + std::to_string(line_no) + ": expected 'timestamp watts'");
    }
    // Second column may be followed by further columns (e.g. apparent power); only the first is used.
    auto rest = trim(body.substr(space + 1));
    rest = rest.substr(0, rest.find_first_of(" \t"));
    if (!parse_int(body.substr(0, space), s.timestamp) || !parse_double(rest, s.watts)) {
      throw DataError(file.string() + ":" + std::to_string(line_no) + ": malformed line");
    }
    out.push_back(s);
  }
  if (out.empty()) throw DataError(file.string() + ": channel file is empty");
  return out;
}

AppliancePanel load_ukdale_house(const std::filesystem::path& dir, const std::vector<int>& channel_ids,
                                 const UkdaleOptions& options) {
  const auto labels = read_labels(dir / "labels.dat");
  auto channel_file = [&](int id) { return dir / ("channel_" + std::to_string(id) + ".dat"); };

  if (!labels.contains(options.aggregate_channel)) {
    throw DataError("aggregate channel " + std::to_string(options.aggregate_channel) + " not in labels.dat");
  }
  for (int id : channel_ids) {
    if (!labels.contains(id)) throw DataError("channel " + std::to_string(id) + " not in labels.dat");
    if (id == options.aggregate_channel) throw UsageError("aggregate channel cannot be requested as an appliance");
  }

  const auto total_raw = read_ukdale_channel(channel_file(options.aggregate_channel));
  LoadSeries total = resample_hourly(total_raw, options.resample);

  std::vector<ApplianceMeta> meta;
  std::vector<LoadSeries> appliances;
  for (int id : channel_ids) {
    const auto raw = read_ukdale_channel(channel_file(id));
    appliances.push_back(reindex(resample_hourly(raw, options.resample), total.index()));
    meta.push_back({id, labels.at(id)});
  }
  return AppliancePanel(std::move(meta), std::move(appliances), std::move(total));
}

std::int64_t parse_timestamp(const std::string& text) {
  const auto s = trim(text);
  std::int64_t epoch = 0;
  if (parse_int(s, epoch)) return epoch;

  int y = 0;
  unsigned mo = 0, d = 0, hh = 0, mm = 0, ss = 0;
  auto fail = [&]() -> std::int64_t { throw DataError("unrecognized timestamp '" + text + "'"); };
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return fail();
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), mo) || !parse_int(s.substr(8, 2), d)) return fail();
  auto rest = s.substr(10);
  if (!rest.empty()) {
    if (rest[0] != 'T' && rest[0] != ' ') return fail();
    rest.remove_prefix(1);
    if (rest.size() < 5 || rest[2] != ':') return fail();
    if (!parse_int(rest.substr(0, 2), hh) || !parse_int(rest.substr(3, 2), mm)) return fail();
    rest.remove_prefix(5);
    if (!rest.empty() && rest[0] == ':') {
      if (rest.size() < 3 || !parse_int(rest.substr(1, 2), ss)) return fail();
      rest.remove_prefix(3);
    }
    if (rest == "Z" || rest == "+00:00") rest = {};
    if (!rest.empty()) return fail();
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59) return fail();
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * kSecondsPerDay + hh * 3600 + mm * 60 + ss;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
  const auto days = std::chrono::floor<std::chrono::days>(std::chrono::sys_seconds{std::chrono::seconds{epoch_seconds}});
  const std::chrono::year_month_day ymd{days};
  const auto secs = epoch_seconds - days.time_since_epoch().count() * kSecondsPerDay;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long long>(secs / 3600), static_cast<long long>((secs / 60) % 60),
                static_cast<long long>(secs % 60));
  return buf;
}

AppliancePanel load_csv_panel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_csv_panel(in, path.string());
}

AppliancePanel read_csv_panel(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  auto where = [&] { return source_name + ":" + std::to_string(line_no) + ": "; };

  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    for (auto cell : split(body, ',')) header.emplace_back(trim(cell));
    break;
  }
  if (header.size() < 2 || header[0] != "timestamp" || header[1] != "total") {
    throw DataError(where() + "header must start with 'timestamp,total'");
  }
  const std::size_t n = header.size() - 2;

  std::vector<std::int64_t> stamps;
  std::vector<std::vector<double>> values(n + 1);
  std::vector<std::vector<std::uint8_t>> masks(n + 1);
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto cells = split(body, ',');
    if (cells.size() != header.size()) throw DataError(where() + "expected " + std::to_string(header.size()) + " cells");
    std::int64_t ts = 0;
    try {
      ts = parse_timestamp(std::string(cells[0]));
    } catch (const DataError& e) {
      throw DataError(where() + e.what());
    }
    if (!stamps.empty()) {
      if (ts == stamps.back()) throw DataError(where() + "duplicate timestamp");
      if (ts < stamps.back()) throw DataError(where() + "timestamps not ascending");
      if (ts - stamps.back() != kSecondsPerHour) throw DataError(where() + "non-hourly spacing");
    }
    stamps.push_back(ts);
    for (std::size_t c = 0; c <= n; ++c) {
      const auto cell = trim(cells[c + 1]);
      double v = 0.0;
      if (cell.empty()) {
        values[c].push_back(0.0);
        masks[c].push_back(0);
      } else if (parse_double(cell, v)) {
        values[c].push_back(v);
        masks[c].push_back(1);
      } else {
        throw DataError(where() + "malformed value '" + std::string(cell) + "'");
      }
    }
  }
  if (stamps.empty()) throw DataError(source_name + ": no data rows");

  const TimeIndex idx{stamps.front(), kSecondsPerHour, stamps.size()};
  LoadSeries total(idx, std::move(values[0]), std::move(masks[0]));
  std::vector<ApplianceMeta> meta;
  std::vector<LoadSeries> appliances;
  for (std::size_t c = 0; c < n; ++c) {
    meta.push_back({static_cast<int>(c + 1), header[c + 2]});
    appliances.emplace_back(idx, std::move(values[c + 1]), std::move(masks[c + 1]));
  }
  return AppliancePanel(std::move(meta), std::move(appliances), std::move(total));
}

void write_csv_panel(const AppliancePanel& panel, std::ostream& out) {
  out << "timestamp,total";
  for (const auto& m : panel.meta()) out << ',' << m.name;
  out << '\n';
  auto cell = [&](const LoadSeries& s, std::size_t t) { return s.valid(t) ? format_double(s[t]) : std::string(); };
  for (std::size_t t = 0; t < panel.size(); ++t) {
    out << format_timestamp(panel.index().timestamp(t)) << ',' << cell(panel.total(), t);
    for (const auto& a : panel.appliances()) out << ',' << cell(a, t);
    out << '\n';
  }
}

AppliancePanel align_panel(const AppliancePanel& panel, std::int64_t start, std::int64_t end) {
  if (start >= end) throw UsageError("align_panel: start must precede end");
  const auto& idx = panel.index();
  auto first_at_or_after = [&](std::int64_t ts) -> std::size_t {
    if (ts <= idx.start) return 0;
    const auto steps = (ts - idx.start + idx.step - 1) / idx.step;
    return static_cast<std::size_t>(std::min<std::int64_t>(steps, static_cast<std::int64_t>(idx.len)));
  };
  const std::size_t first = first_at_or_after(start);
  const std::size_t last = first_at_or_after(end);
  if (last <= first) {
    throw DataError("align_panel: range [" + format_timestamp(start) + ", " + format_timestamp(end) +
                    ") selects no samples");
  }
  std::vector<LoadSeries> appliances;
  for (const auto& a : panel.appliances()) appliances.push_back(a.slice(first, last - first));
  return AppliancePanel(panel.meta(), std::move(appliances), panel.total().slice(first, last - first));
}

}  // namespace gcabulf
