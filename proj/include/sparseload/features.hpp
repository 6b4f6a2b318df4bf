#pragma once

#include <array>
#include <string>
#include <vector>

#include "sparseload/frame.hpp"

namespace sparseload {

/// Model feature layout. Field order is fixed; total_load is always last.
constexpr std::size_t kNumFeatures = 9;
constexpr std::size_t kLoadFeature = 8;

inline const std::array<std::string, kNumFeatures>& feature_names() {
  static const std::array<std::string, kNumFeatures> names = {
      "year", "month",         "day",        "weekday",          "hour",
      "avg_temperature", "wind_speed", "relative_humidity", "total_load"};
  return names;
}

using FeatureVector = std::array<double, kNumFeatures>;

/// Feature row for frame row i. Requires the load present and weather gaps
/// already filled (fill_weather_gaps). Precipitation is ingested but not a
/// model feature.
inline FeatureVector feature_row(const TimeSeriesFrame& frame, std::size_t i) {
  if (!frame.load(i).has_value()) {
    throw SparsityError("feature_row: missing load at row " + std::to_string(i));
  }
  const CalendarFields c = calendar_features(frame.timestamp(i));
  const WeatherRecord& w = frame.weather(i);
  return FeatureVector{
      static_cast<double>(c.year),
      static_cast<double>(c.month),
      static_cast<double>(c.day),
      static_cast<double>(c.weekday),
      static_cast<double>(c.hour),
      w.avg_temperature.value_or(0.0),
      w.wind_speed.value_or(0.0),
      w.relative_humidity.value_or(0.0),
      *frame.load(i),
  };
}

}  // namespace sparseload
