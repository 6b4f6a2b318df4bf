#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "sparseload/errors.hpp"
#include "sparseload/features.hpp"
#include "sparseload/frame.hpp"
#include "sparseload/scaling.hpp"

namespace sparseload {

/// Supervised sliding windows over the operating-hour rows of a frame.
/// inputs is n_windows x (seq_len * n_features) row-major; each window's
/// target is the load immediately following its input span, and consecutive
/// windows shift by one row.
struct WindowedDataset {
  std::size_t seq_len = 0;
  std::size_t pred_len = 0;
  std::size_t n_features = 0;
  std::vector<double> inputs;       // n() * seq_len * n_features
  std::vector<double> targets;      // n() * pred_len, normalized load
  std::vector<HourStamp> start_ts;  // first input row per window
  std::vector<HourStamp> target_ts; // first target row per window

  std::size_t n() const { return start_ts.size(); }

  const double* window(std::size_t w) const { return inputs.data() + w * seq_len * n_features; }
  const double* target(std::size_t w) const { return targets.data() + w * pred_len; }

  WindowedDataset slice(std::size_t begin, std::size_t end) const {
    WindowedDataset out;
    out.seq_len = seq_len;
    out.pred_len = pred_len;
    out.n_features = n_features;
    const std::size_t in_stride = seq_len * n_features;
    out.inputs.assign(inputs.begin() + begin * in_stride, inputs.begin() + end * in_stride);
    out.targets.assign(targets.begin() + begin * pred_len, targets.begin() + end * pred_len);
    out.start_ts.assign(start_ts.begin() + begin, start_ts.begin() + end);
    out.target_ts.assign(target_ts.begin() + begin, target_ts.begin() + end);
    return out;
  }
};

struct DatasetSplits {
  WindowedDataset train;
  WindowedDataset val;
  WindowedDataset test;
};

/// Serializes a fully-imputed frame into supervised windows, scaled by the
/// provided min-max parameters. Operating-hour rows are concatenated across
/// the overnight gap by default; respect_gaps restricts windows to spans of
/// contiguous timestamps.
inline WindowedDataset serialize_windows(const TimeSeriesFrame& frame, std::size_t seq_len,
                                         std::size_t pred_len, const MinMaxParams& scaler,
                                         bool respect_gaps = false) {
  const std::vector<std::size_t> rows = frame.operating_rows();
  for (std::size_t r : rows) {
    if (!frame.load(r).has_value()) {
      throw SparsityError("serialize_windows: missing load at row " + std::to_string(r) +
                          " (impute first)");
    }
  }
  if (rows.size() < seq_len + pred_len) {
    throw RangeError("serialize_windows: frame too short for requested window");
  }

  WindowedDataset ds;
  ds.seq_len = seq_len;
  ds.pred_len = pred_len;
  ds.n_features = kNumFeatures;

  std::vector<FeatureVector> scaled(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    scaled[i] = apply_minmax(scaler, feature_row(frame, rows[i]));
  }

  const std::size_t n_windows = rows.size() - seq_len - pred_len + 1;
  for (std::size_t w = 0; w < n_windows; ++w) {
    if (respect_gaps) {
      const HourStamp span_start = frame.timestamp(rows[w]);
      const HourStamp span_end = frame.timestamp(rows[w + seq_len + pred_len - 1]);
      if (span_end - span_start != static_cast<HourStamp>(seq_len + pred_len - 1)) continue;
    }
    for (std::size_t t = 0; t < seq_len; ++t) {
      ds.inputs.insert(ds.inputs.end(), scaled[w + t].begin(), scaled[w + t].end());
    }
    for (std::size_t h = 0; h < pred_len; ++h) {
      ds.targets.push_back(scaled[w + seq_len + h][kLoadFeature]);
    }
    ds.start_ts.push_back(frame.timestamp(rows[w]));
    ds.target_ts.push_back(frame.timestamp(rows[w + seq_len]));
  }
  if (ds.start_ts.empty()) {
    throw RangeError("serialize_windows: no admissible windows");
  }
  return ds;
}

/// Chronological contiguous splits with sizes floor(n * frac); the
/// remainder goes to test.
inline DatasetSplits split_dataset(const WindowedDataset& ds, double train_frac = 0.66,
                                   double val_frac = 0.17) {
  if (!(train_frac > 0.0) || !(val_frac > 0.0) || train_frac + val_frac >= 1.0) {
    throw RangeError("split_dataset: fractions must be positive and sum below 1");
  }
  const std::size_t n = ds.n();
  const std::size_t n_train = static_cast<std::size_t>(std::floor(n * train_frac));
  const std::size_t n_val = static_cast<std::size_t>(std::floor(n * val_frac));
  const std::size_t n_test = n - n_train - n_val;
  if (n_train == 0 || n_val == 0 || n_test == 0) {
    throw RangeError("split_dataset: a split would be empty (n=" + std::to_string(n) + ")");
  }
  DatasetSplits splits;
  splits.train = ds.slice(0, n_train);
  splits.val = ds.slice(n_train, n_train + n_val);
  splits.test = ds.slice(n_train + n_val, n);
  return splits;
}

}  // namespace sparseload
