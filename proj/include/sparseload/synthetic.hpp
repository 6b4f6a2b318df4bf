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

/// Wide-sense-stationary synthetic load generator: each hour of day has a
/// fixed (mu, sigma), optionally rescaled on weekends, clipped to
/// [0, capacity].
struct SyntheticSpec {
  HourStamp start = make_hourstamp(2021, 1, 1, 0);
  int n_days = 365;
  std::array<double, 24> hourly_mean_profile{};  // kW
  std::array<double, 24> hourly_std_profile{};   // kW, >= 0
  double weekend_scale = 1.0;
  double capacity = 2000.0;  // kW
  int operating_begin = 8;   // inclusive hour
  int operating_end = 23;    // inclusive hour
  std::uint64_t seed = 1;

  void validate() const {
    if (n_days <= 0) throw RangeError("SyntheticSpec: n_days must be positive");
    if (capacity <= 0.0) throw RangeError("SyntheticSpec: capacity must be positive");
    for (double s : hourly_std_profile) {
      if (!(s >= 0.0)) throw RangeError("SyntheticSpec: std profile must be non-negative");
    }
    if (operating_begin < 0 || operating_end > 23 || operating_begin > operating_end) {
      throw RangeError("SyntheticSpec: invalid operating hour interval");
    }
  }

  /// Default profile shaped like a daytime plant: ramp up through the
  /// morning, peak near midday, taper into the evening.
  static SyntheticSpec plant_default() {
    SyntheticSpec spec;
    for (int h = 0; h < 24; ++h) {
      const double phase = (h - 13.0) / 24.0 * 2.0 * M_PI;
      spec.hourly_mean_profile[h] = 1000.0 + 450.0 * std::cos(phase);
      spec.hourly_std_profile[h] = 60.0;
    }
    return spec;
  }
};

/// Generates a frame from the spec. Draws consume the seeded normal stream
/// in timestamp order over operating hours only; non-operating hours carry
/// no load and are masked out. Ground truth stores the generated values.
inline TimeSeriesFrame generate_synthetic_wss(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t n = static_cast<std::size_t>(spec.n_days) * 24;
  TimeSeriesFrame frame(spec.start, n);
  Rng rng(spec.seed);

  for (std::size_t i = 0; i < n; ++i) {
    const CalendarFields c = calendar_features(frame.timestamp(i));
    const bool operating = c.hour >= spec.operating_begin && c.hour <= spec.operating_end;
    frame.set_operating(i, operating);
    if (!operating) continue;
    const bool weekend = c.weekday >= 5;  // Saturday/Sunday under Monday=0
    const double mu = spec.hourly_mean_profile[c.hour] * (weekend ? spec.weekend_scale : 1.0);
    const double sigma = spec.hourly_std_profile[c.hour];
    const double value = std::clamp(mu + sigma * rng.normal(), 0.0, spec.capacity);
    frame.set_load(i, value);
    frame.set_ground_truth(i, value);
  }
  return frame;
}

/// Masks exactly round(fraction * n_operating) operating-hour loads, chosen
/// uniformly without replacement by the seeded generator. Non-operating
/// rows and weather are never touched.
inline TimeSeriesFrame apply_sparsity_mask(TimeSeriesFrame frame, double fraction,
                                           std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw RangeError("apply_sparsity_mask: fraction must lie in [0, 1]");
  }
  const std::vector<std::size_t> rows = frame.operating_rows();
  const std::size_t k = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(rows.size())));
  if (k == 0) return frame;
  Rng rng(seed);
  for (std::size_t pick : rng.sample_without_replacement(rows.size(), k)) {
    frame.clear_load(rows[pick]);
  }
  return frame;
}

}  // namespace sparseload
