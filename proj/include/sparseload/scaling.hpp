#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sparseload/errors.hpp"
#include "sparseload/features.hpp"
#include "sparseload/frame.hpp"

namespace sparseload {

/// Per-feature min-max scaling parameters. transform maps min -> 0 and
/// max -> 1; a constant feature (max == min) is flagged and maps to 0.
struct MinMaxParams {
  std::vector<std::string> names;
  std::vector<double> min;
  std::vector<double> max;
  std::vector<bool> constant;

  std::size_t size() const { return names.size(); }

  double transform(std::size_t j, double x) const {
    if (constant[j]) return 0.0;
    return (x - min[j]) / (max[j] - min[j]);
  }

  double invert(std::size_t j, double y) const {
    if (constant[j]) return min[j];
    return min[j] + y * (max[j] - min[j]);
  }

  double transform_load(double x) const { return transform(kLoadFeature, x); }
  double invert_load(double y) const { return invert(kLoadFeature, y); }

  void check_names(const std::vector<std::string>& other) const {
    if (other.size() != names.size()) {
      throw SchemaError("feature count mismatch: " + std::to_string(other.size()) +
                        " vs " + std::to_string(names.size()));
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] != other[i]) {
        throw SchemaError("feature name mismatch at " + std::to_string(i) + ": '" +
                          other[i] + "' vs '" + names[i] + "'");
      }
    }
  }
};

/// Fits min-max parameters over frame rows [row_begin, row_end). Rows whose
/// load is absent contribute their calendar/weather features only; absent
/// weather values enter as the fill value 0, matching feature_row.
inline MinMaxParams fit_minmax(const TimeSeriesFrame& frame, std::size_t row_begin,
                               std::size_t row_end) {
  if (row_begin >= row_end || row_end > frame.size()) {
    throw RangeError("fit_minmax: empty or out-of-bounds row range");
  }
  MinMaxParams p;
  p.names.assign(feature_names().begin(), feature_names().end());
  p.min.assign(kNumFeatures, std::numeric_limits<double>::infinity());
  p.max.assign(kNumFeatures, -std::numeric_limits<double>::infinity());

  auto update = [&p](std::size_t j, double v) {
    if (v < p.min[j]) p.min[j] = v;
    if (v > p.max[j]) p.max[j] = v;
  };

  for (std::size_t i = row_begin; i < row_end; ++i) {
    const CalendarFields c = calendar_features(frame.timestamp(i));
    update(0, c.year);
    update(1, c.month);
    update(2, c.day);
    update(3, c.weekday);
    update(4, c.hour);
    const WeatherRecord& w = frame.weather(i);
    update(5, w.avg_temperature.value_or(0.0));
    update(6, w.wind_speed.value_or(0.0));
    update(7, w.relative_humidity.value_or(0.0));
    if (frame.load(i)) update(8, *frame.load(i));
  }

  p.constant.resize(kNumFeatures);
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    if (!std::isfinite(p.min[j]) || !std::isfinite(p.max[j])) {
      throw RangeError("fit_minmax: feature '" + p.names[j] + "' has no present value in range");
    }
    p.constant[j] = (p.max[j] == p.min[j]);
  }
  return p;
}

inline FeatureVector apply_minmax(const MinMaxParams& params, const FeatureVector& v) {
  params.check_names({feature_names().begin(), feature_names().end()});
  FeatureVector out;
  for (std::size_t j = 0; j < kNumFeatures; ++j) out[j] = params.transform(j, v[j]);
  return out;
}

inline FeatureVector invert_minmax(const MinMaxParams& params, const FeatureVector& v) {
  params.check_names({feature_names().begin(), feature_names().end()});
  FeatureVector out;
  for (std::size_t j = 0; j < kNumFeatures; ++j) out[j] = params.invert(j, v[j]);
  return out;
}

}  // namespace sparseload
