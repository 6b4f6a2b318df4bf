#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sparseload/errors.hpp"
#include "sparseload/frame.hpp"
#include "sparseload/rng.hpp"

namespace sparseload {

/// Per-hour-of-day Gaussian estimates driving imputation. Hours with fewer
/// than two observations fall back to the global (mu, sigma) over all
/// observed operating-hour loads.
struct HourlyGaussianTable {
  struct HourStats {
    double mu = 0.0;
    double sigma = 0.0;
    std::size_t count = 0;
    bool fallback_used = false;
  };

  std::array<HourStats, 24> hours{};
  double global_mu = 0.0;
  double global_sigma = 0.0;
  std::size_t global_count = 0;
  double lo = 0.0;      // kW
  double hi = 2000.0;   // kW, plant capacity

  const HourStats& at(int hour) const { return hours[static_cast<std::size_t>(hour)]; }
};

namespace detail {

// Sample mean and standard deviation (n-1 denominator).
inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = n >= 2 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return {mean, sd};
}

}  // namespace detail

inline HourlyGaussianTable estimate_hourly_gaussians(const TimeSeriesFrame& frame,
                                                     double capacity = 2000.0) {
  std::array<std::vector<double>, 24> by_hour;
  std::vector<double> all;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (!frame.operating(i) || !frame.load(i).has_value()) continue;
    const int h = calendar_features(frame.timestamp(i)).hour;
    by_hour[static_cast<std::size_t>(h)].push_back(*frame.load(i));
    all.push_back(*frame.load(i));
  }
  if (all.empty()) {
    throw EstimationError("estimate_hourly_gaussians: no observed operating-hour loads");
  }

  HourlyGaussianTable table;
  table.hi = capacity;
  auto [gmu, gsd] = detail::mean_std(all);
  table.global_mu = gmu;
  table.global_sigma = gsd;
  table.global_count = all.size();

  for (int h = 0; h < 24; ++h) {
    auto& stats = table.hours[static_cast<std::size_t>(h)];
    const auto& xs = by_hour[static_cast<std::size_t>(h)];
    stats.count = xs.size();
    if (xs.size() >= 2) {
      auto [mu, sd] = detail::mean_std(xs);
      stats.mu = mu;
      stats.sigma = sd;
    } else {
      stats.mu = gmu;
      stats.sigma = gsd;
      stats.fallback_used = true;
    }
  }
  return table;
}

/// Replaces every missing operating-hour load with clip(mu_h + sigma_h * Z,
/// lo, hi). Each missing cell consumes exactly one draw from the seeded
/// normal stream in timestamp order, so the result is independent of how
/// callers iterate. Observed values are untouched.
inline TimeSeriesFrame impute_gaussian(TimeSeriesFrame frame, const HourlyGaussianTable& table,
                                       std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (!frame.operating(i) || frame.load(i).has_value()) continue;
    const int h = calendar_features(frame.timestamp(i)).hour;
    const auto& stats = table.at(h);
    const double draw = stats.mu + stats.sigma * rng.normal();
    frame.set_load(i, std::clamp(draw, table.lo, table.hi));
    frame.set_imputed(i, true);
  }
  return frame;
}

/// Linear-interpolation baseline: missing operating-hour values are filled
/// by interpolating in time between the nearest observed neighbours;
/// leading/trailing gaps take the nearest observed value.
inline TimeSeriesFrame impute_linear(TimeSeriesFrame frame) {
  std::vector<std::size_t> observed;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame.operating(i) && frame.load(i).has_value()) observed.push_back(i);
  }
  if (observed.size() < 2) {
    throw EstimationError("impute_linear: need at least two observed loads");
  }

  std::size_t seg = 0;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (!frame.operating(i) || frame.load(i).has_value()) continue;
    while (seg + 1 < observed.size() && observed[seg + 1] < i) ++seg;
    double value;
    if (i < observed.front()) {
      value = *frame.load(observed.front());
    } else if (i > observed.back()) {
      value = *frame.load(observed.back());
    } else {
      const std::size_t a = observed[seg];
      const std::size_t b = observed[seg + 1];
      const double wa = static_cast<double>(b - i) / static_cast<double>(b - a);
      value = wa * *frame.load(a) + (1.0 - wa) * *frame.load(b);
    }
    frame.set_load(i, value);
    frame.set_imputed(i, true);
  }
  return frame;
}

}  // namespace sparseload
