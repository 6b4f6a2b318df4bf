#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparseload/datetime.hpp"
#include "sparseload/errors.hpp"

namespace sparseload {

struct WeatherRecord {
  std::optional<double> avg_temperature;  // degC
  std::optional<double> wind_speed;       // m/s
  std::optional<double> relative_humidity;  // %
  std::optional<double> precipitation;    // mm
};

/// Hourly time-series frame. Timestamps are implicit (start + row index in
/// hours) which enforces the strictly-increasing, gap-free 1-hour grid by
/// construction; missing observations are rows whose load is absent.
class TimeSeriesFrame {
 public:
  TimeSeriesFrame() = default;

  TimeSeriesFrame(HourStamp start, std::size_t n)
      : start_(start),
        load_(n),
        weather_(n),
        holiday_(n, 0),
        operating_(n, 1),
        imputed_(n, 0) {}

  std::size_t size() const { return load_.size(); }
  HourStamp start() const { return start_; }
  HourStamp timestamp(std::size_t i) const { return start_ + static_cast<HourStamp>(i); }

  const std::optional<double>& load(std::size_t i) const { return load_[i]; }
  void set_load(std::size_t i, double v) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError("load must be finite and >= 0, got " + std::to_string(v));
    }
    load_[i] = v;
  }
  void clear_load(std::size_t i) { load_[i] = std::nullopt; }

  WeatherRecord& weather(std::size_t i) { return weather_[i]; }
  const WeatherRecord& weather(std::size_t i) const { return weather_[i]; }

  bool holiday(std::size_t i) const { return holiday_[i] != 0; }
  void set_holiday(std::size_t i, bool v) { holiday_[i] = v ? 1 : 0; }

  bool operating(std::size_t i) const { return operating_[i] != 0; }
  void set_operating(std::size_t i, bool v) { operating_[i] = v ? 1 : 0; }

  bool imputed(std::size_t i) const { return imputed_[i] != 0; }
  void set_imputed(std::size_t i, bool v) { imputed_[i] = v ? 1 : 0; }

  bool has_ground_truth() const { return !ground_truth_.empty(); }
  const std::optional<double>& ground_truth(std::size_t i) const {
    static const std::optional<double> none;
    return ground_truth_.empty() ? none : ground_truth_[i];
  }
  void set_ground_truth(std::size_t i, double v) {
    if (ground_truth_.empty()) ground_truth_.resize(size());
    ground_truth_[i] = v;
  }

  /// Fraction of operating-hour rows whose load is absent.
  double sparsity() const {
    std::size_t op = 0, missing = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!operating(i)) continue;
      ++op;
      if (!load_[i].has_value()) ++missing;
    }
    return op == 0 ? 0.0 : static_cast<double>(missing) / static_cast<double>(op);
  }

  std::vector<std::size_t> operating_rows() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < size(); ++i) {
      if (operating(i)) idx.push_back(i);
    }
    return idx;
  }

  /// Observed (non-imputed marker is kept) loads over operating rows.
  std::vector<double> operating_loads() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) {
      if (operating(i) && load_[i].has_value()) out.push_back(*load_[i]);
    }
    return out;
  }

  /// Forward-fill then back-fill each weather channel; a channel with no
  /// observations anywhere is filled with 0.
  void fill_weather_gaps() {
    auto fill = [this](std::optional<double> WeatherRecord::* field) {
      std::optional<double> last;
      for (std::size_t i = 0; i < size(); ++i) {
        if ((weather_[i].*field).has_value()) last = weather_[i].*field;
        else if (last.has_value()) weather_[i].*field = last;
      }
      std::optional<double> next;
      for (std::size_t i = size(); i-- > 0;) {
        if ((weather_[i].*field).has_value()) next = weather_[i].*field;
        else if (next.has_value()) weather_[i].*field = next;
      }
      if (!next.has_value()) {
        for (auto& w : weather_) w.*field = 0.0;
      }
    };
    fill(&WeatherRecord::avg_temperature);
    fill(&WeatherRecord::wind_speed);
    fill(&WeatherRecord::relative_humidity);
    fill(&WeatherRecord::precipitation);
  }

 private:
  HourStamp start_ = 0;
  std::vector<std::optional<double>> load_;
  std::vector<WeatherRecord> weather_;
  std::vector<std::uint8_t> holiday_;
  std::vector<std::uint8_t> operating_;
  std::vector<std::uint8_t> imputed_;
  std::vector<std::optional<double>> ground_truth_;
};

}  // namespace sparseload
