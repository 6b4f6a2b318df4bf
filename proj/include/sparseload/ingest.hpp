#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparseload/csv.hpp"
#include "sparseload/datetime.hpp"
#include "sparseload/frame.hpp"

namespace sparseload {

/// Layout of a single-value hourly CSV (e.g. the PJM Dayton file:
/// "Datetime,DAYTON_MW"). unit_scale converts file units to kW (MW -> 1000).
struct CsvSchema {
  std::string timestamp_column = "Datetime";
  std::string timestamp_format = "%Y-%m-%d %H:%M:%S";
  std::string value_column = "DAYTON_MW";
  double unit_scale = 1.0;
};

struct IngestStats {
  std::size_t duplicate_count = 0;
  std::size_t warning_count = 0;
};

/// Reads an hourly load CSV into a frame covering the min..max timestamp
/// range at 1-hour spacing. Hours absent from the file become missing rows;
/// duplicate timestamps resolve last-wins and are counted.
inline TimeSeriesFrame load_hourly_csv(const std::string& path, const CsvSchema& schema,
                                       IngestStats* stats = nullptr) {
  const CsvTable table = read_csv(path);
  const int tcol = table.column(schema.timestamp_column);
  const int vcol = table.column(schema.value_column);
  if (tcol < 0 || vcol < 0) {
    throw IngestError("header of " + path + " does not match schema (want '" +
                      schema.timestamp_column + "', '" + schema.value_column + "')");
  }
  if (table.rows.empty()) throw IngestError("no data rows in " + path);

  std::map<HourStamp, double> values;
  std::size_t duplicates = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (static_cast<std::size_t>(std::max(tcol, vcol)) >= row.size()) {
      throw IngestError("short row " + std::to_string(r + 2) + " in " + path);
    }
    HourStamp ts;
    try {
      ts = parse_hourstamp(row[tcol], schema.timestamp_format);
    } catch (const IngestError& e) {
      throw IngestError("row " + std::to_string(r + 2) + ": " + e.what());
    }
    const double v = parse_double(row[vcol], r + 2) * schema.unit_scale;
    if (values.count(ts)) ++duplicates;
    values[ts] = v;  // last wins
  }

  const HourStamp start = values.begin()->first;
  const HourStamp last = values.rbegin()->first;
  TimeSeriesFrame frame(start, static_cast<std::size_t>(last - start) + 1);
  for (const auto& [ts, v] : values) {
    frame.set_load(static_cast<std::size_t>(ts - start), v);
  }
  if (stats) {
    stats->duplicate_count = duplicates;
    if (duplicates) ++stats->warning_count;
  }
  return frame;
}

/// Joins an hourly weather CSV (columns: timestamp, avg_temperature,
/// wind_speed, relative_humidity, precipitation) onto matching frame rows.
inline TimeSeriesFrame join_weather(TimeSeriesFrame frame, const std::string& path,
                                    const std::string& timestamp_format = "%Y-%m-%d %H:%M:%S") {
  const CsvTable table = read_csv(path);
  const int tcol = table.column("timestamp");
  if (tcol < 0) throw IngestError("weather file missing 'timestamp' column: " + path);
  const int temp = table.column("avg_temperature");
  const int wind = table.column("wind_speed");
  const int rh = table.column("relative_humidity");
  const int prec = table.column("precipitation");

  std::size_t matched = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    HourStamp ts;
    try {
      ts = parse_hourstamp(row[tcol], timestamp_format);
    } catch (const IngestError& e) {
      throw JoinError("weather row " + std::to_string(r + 2) +
                      " fails the hourly alignment check: " + e.what());
    }
    const HourStamp offset = ts - frame.start();
    if (offset < 0 || offset >= static_cast<HourStamp>(frame.size())) continue;
    WeatherRecord& w = frame.weather(static_cast<std::size_t>(offset));
    auto assign = [&](int col, std::optional<double>& field) {
      if (col >= 0 && static_cast<std::size_t>(col) < row.size() && !row[col].empty()) {
        field = parse_double(row[col], r + 2);
      }
    };
    assign(temp, w.avg_temperature);
    assign(wind, w.wind_speed);
    assign(rh, w.relative_humidity);
    assign(prec, w.precipitation);
    ++matched;
  }
  if (matched == 0) {
    throw JoinError("no weather timestamps overlap the frame range: " + path);
  }
  return frame;
}

/// Reads a holiday file (one YYYY-MM-DD per line, '#' comments allowed).
inline std::vector<HourStamp> load_holiday_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open holiday file: " + path);
  std::vector<HourStamp> days;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    days.push_back(parse_date(line.substr(first)));
  }
  return days;
}

/// Flags all 24 rows of each listed date. Dates outside the frame range are
/// counted as warnings and otherwise ignored.
inline TimeSeriesFrame mark_holidays(TimeSeriesFrame frame, const std::vector<HourStamp>& days,
                                     IngestStats* stats = nullptr) {
  for (const HourStamp day : days) {
    bool any = false;
    for (int h = 0; h < 24; ++h) {
      const HourStamp offset = day + h - frame.start();
      if (offset >= 0 && offset < static_cast<HourStamp>(frame.size())) {
        frame.set_holiday(static_cast<std::size_t>(offset), true);
        any = true;
      }
    }
    if (!any && stats) ++stats->warning_count;
  }
  return frame;
}

/// Canonical frame serialization: the load+weather CSV layout plus holiday,
/// operating and imputed flags (and ground truth when present). Values are
/// written with 17 significant digits so a round-trip is bit-exact.
inline void save_frame_csv(const TimeSeriesFrame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write file: " + path);
  std::vector<std::string> header = {"timestamp",          "load",
                                     "avg_temperature",    "wind_speed",
                                     "relative_humidity",  "precipitation",
                                     "holiday",            "operating",
                                     "imputed"};
  if (frame.has_ground_truth()) header.push_back("ground_truth");
  write_csv_row(out, header);

  auto opt = [](const std::optional<double>& v) {
    return v.has_value() ? format_double(*v) : std::string();
  };
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const WeatherRecord& w = frame.weather(i);
    std::vector<std::string> row = {
        format_hourstamp(frame.timestamp(i)),
        opt(frame.load(i)),
        opt(w.avg_temperature),
        opt(w.wind_speed),
        opt(w.relative_humidity),
        opt(w.precipitation),
        frame.holiday(i) ? "1" : "0",
        frame.operating(i) ? "1" : "0",
        frame.imputed(i) ? "1" : "0",
    };
    if (frame.has_ground_truth()) row.push_back(opt(frame.ground_truth(i)));
    write_csv_row(out, row);
  }
}

inline TimeSeriesFrame load_frame_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int ts = table.column("timestamp");
  const int load = table.column("load");
  if (ts < 0 || load < 0) throw IngestError("not a frame CSV (missing timestamp/load): " + path);
  const int temp = table.column("avg_temperature");
  const int wind = table.column("wind_speed");
  const int rh = table.column("relative_humidity");
  const int prec = table.column("precipitation");
  const int hol = table.column("holiday");
  const int op = table.column("operating");
  const int imp = table.column("imputed");
  const int gt = table.column("ground_truth");
  if (table.rows.empty()) throw IngestError("no data rows in " + path);

  const HourStamp start = parse_hourstamp(table.rows.front()[ts], "%Y-%m-%d %H:%M:%S");
  TimeSeriesFrame frame(start, table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const HourStamp t = parse_hourstamp(row[ts], "%Y-%m-%d %H:%M:%S");
    if (t != start + static_cast<HourStamp>(i)) {
      throw IngestError("frame CSV rows not hourly-contiguous at row " + std::to_string(i + 2));
    }
    auto get = [&](int col) -> std::optional<double> {
      if (col < 0 || static_cast<std::size_t>(col) >= row.size() || row[col].empty()) {
        return std::nullopt;
      }
      return parse_double(row[col], i + 2);
    };
    if (auto v = get(load)) frame.set_load(i, *v);
    WeatherRecord& w = frame.weather(i);
    w.avg_temperature = get(temp);
    w.wind_speed = get(wind);
    w.relative_humidity = get(rh);
    w.precipitation = get(prec);
    if (hol >= 0) frame.set_holiday(i, row[hol] == "1");
    if (op >= 0) frame.set_operating(i, row[op] == "1");
    if (imp >= 0) frame.set_imputed(i, row[imp] == "1");
    if (auto v = get(gt)) frame.set_ground_truth(i, *v);
  }
  return frame;
}

}  // namespace sparseload
