#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparseload/errors.hpp"

namespace sparseload {

/// Outcome of a hypothesis test. p-values that come from embedded critical
/// value tables are reported as a bracket instead of a point estimate.
struct TestResult {
  std::string name;
  double statistic = 0.0;
  std::optional<double> p_value;                      // exact, when available
  std::optional<std::pair<double, double>> p_bracket;  // table-bounded interval
  bool reject_at_5pct = false;
  std::map<std::string, double> nuisance;  // lags, bandwidth, bins, critical values
};

/// Additive decomposition: series == trend + seasonal + residual wherever the
/// trend is defined. Undefined trend/residual entries are NaN.
struct Decomposition {
  std::vector<double> trend;
  std::vector<double> seasonal;
  std::vector<double> residual;
  int period = 0;

  static bool defined(double v) { return !std::isnan(v); }
};

struct BlandAltman {
  std::vector<double> means;  // (a + b) / 2
  std::vector<double> diffs;  // a - b
  double bias = 0.0;          // mean diff
  double lower_limit = 0.0;   // bias - 1.96 * std(diff)
  double upper_limit = 0.0;   // bias + 1.96 * std(diff)
};

namespace stats_detail {

inline double mean_of(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  return m / static_cast<double>(xs.size());
}

inline double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace stats_detail

/// Biased-estimator autocorrelation r_k = sum (x_t - m)(x_{t+k} - m) /
/// sum (x_t - m)^2 for k = 0..max_lag.
inline std::vector<double> autocorrelation(const std::vector<double>& series, int max_lag) {
  const std::size_t n = series.size();
  if (n <= static_cast<std::size_t>(max_lag)) {
    throw RangeError("autocorrelation: series length must exceed max_lag");
  }
  const double m = stats_detail::mean_of(series);
  double denom = 0.0;
  for (double x : series) denom += (x - m) * (x - m);
  if (denom == 0.0) throw DegenerateError("autocorrelation: zero-variance series");

  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1);
  for (int k = 0; k <= max_lag; ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t) {
      num += (series[t] - m) * (series[t + static_cast<std::size_t>(k)] - m);
    }
    r[static_cast<std::size_t>(k)] = num / denom;
  }
  return r;
}

/// Classical moving-average additive decomposition. The trend is a centered
/// moving average of window `period` (even windows use half-weight
/// endpoints); the seasonal component is the per-phase mean of the detrended
/// series re-centered to zero; the residual is what remains. Trend and
/// residual are undefined (NaN) at the first/last floor(period/2) points.
inline Decomposition additive_decompose(const std::vector<double>& series, int period) {
  const std::size_t n = series.size();
  if (period < 2 || n < 2 * static_cast<std::size_t>(period)) {
    throw RangeError("additive_decompose: need length >= 2 * period");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Decomposition dec;
  dec.period = period;
  dec.trend.assign(n, nan);
  dec.seasonal.assign(n, 0.0);
  dec.residual.assign(n, nan);

  const int half = period / 2;
  if (period % 2 == 0) {
    // weights [0.5, 1, ..., 1, 0.5] / period over 2*half + 1 points
    for (std::size_t t = half; t + half < n; ++t) {
      double acc = 0.5 * (series[t - half] + series[t + half]);
      for (int j = -half + 1; j <= half - 1; ++j) {
        acc += series[t + j];
      }
      dec.trend[t] = acc / period;
    }
  } else {
    for (std::size_t t = half; t + half < n; ++t) {
      double acc = 0.0;
      for (int j = -half; j <= half; ++j) acc += series[t + j];
      dec.trend[t] = acc / period;
    }
  }

  std::vector<double> phase_sum(period, 0.0);
  std::vector<std::size_t> phase_count(period, 0);
  for (std::size_t t = 0; t < n; ++t) {
    if (!Decomposition::defined(dec.trend[t])) continue;
    const std::size_t phase = t % static_cast<std::size_t>(period);
    phase_sum[phase] += series[t] - dec.trend[t];
    ++phase_count[phase];
  }
  std::vector<double> seasonal(period);
  double season_mean = 0.0;
  for (int p = 0; p < period; ++p) {
    seasonal[p] = phase_count[p] ? phase_sum[p] / phase_count[p] : 0.0;
    season_mean += seasonal[p];
  }
  season_mean /= period;
  for (int p = 0; p < period; ++p) seasonal[p] -= season_mean;

  for (std::size_t t = 0; t < n; ++t) {
    dec.seasonal[t] = seasonal[t % static_cast<std::size_t>(period)];
    if (Decomposition::defined(dec.trend[t])) {
      dec.residual[t] = series[t] - dec.trend[t] - dec.seasonal[t];
    }
  }
  return dec;
}

/// Bland-Altman agreement summary between two aligned prediction traces.
inline BlandAltman bland_altman(const std::vector<double>& pred_a,
                                const std::vector<double>& pred_b) {
  if (pred_a.size() != pred_b.size() || pred_a.empty()) {
    throw SchemaError("bland_altman: traces must have equal nonzero length");
  }
  BlandAltman ba;
  ba.means.resize(pred_a.size());
  ba.diffs.resize(pred_a.size());
  for (std::size_t i = 0; i < pred_a.size(); ++i) {
    ba.means[i] = 0.5 * (pred_a[i] + pred_b[i]);
    ba.diffs[i] = pred_a[i] - pred_b[i];
  }
  ba.bias = stats_detail::mean_of(ba.diffs);
  const double sd = stats_detail::sample_std(ba.diffs);
  ba.lower_limit = ba.bias - 1.96 * sd;
  ba.upper_limit = ba.bias + 1.96 * sd;
  if (!std::isfinite(ba.bias)) throw NumericalError("bland_altman: non-finite bias");
  return ba;
}

}  // namespace sparseload
