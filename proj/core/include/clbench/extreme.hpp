#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clbench/metrics.hpp"
#include "clbench/store.hpp"
#include "clbench/tensor.hpp"

namespace clbench {

/// Per-pixel lower/upper percentile thresholds of the localized rolling mean.
struct ThresholdField {
  std::size_t h = 0, w = 0;
  std::vector<float> lo;  // 5th percentile by default
  std::vector<float> hi;  // 95th percentile by default
};

/// Per-timestamp boolean masks over an evaluation period; true marks pixels
/// whose localized mean fell outside the thresholds.
struct ExtremeMaskSeries {
  Grid grid;
  std::int64_t time_start_unix = 0;
  std::int64_t time_step_seconds = 1;
  std::size_t n = 0, h = 0, w = 0;
  std::vector<std::uint8_t> masks;  // n * h * w

  std::int64_t time(std::size_t k) const {
    return time_start_unix + static_cast<std::int64_t>(k) * time_step_seconds;
  }
  MaskView view() const { return MaskView(masks.data(), n, h, w); }
  std::size_t true_count() const;
};

struct ExtremeConfig {
  int window_days = 7;
  double lo_quantile = 0.05;
  double hi_quantile = 0.95;
  std::size_t min_samples = 100;       // per-pixel floor for threshold estimation
  bool renormalize_stencil = false;    // divide blend weights by their actual sum
  bool inclusive_bounds = false;       // treat boundary-equal values as extreme
};

/// Trailing window mean followed by the 3x3 spatial blend (0.44 center,
/// 0.11 per edge neighbor, 0.027 per vertex neighbor; the printed weights
/// sum to 0.988 and are used as-is unless renormalize_stencil is set).
/// Longitude wraps on periodic grids; rows past the top/bottom simply omit
/// the missing neighbors. The window covers window_days of trailing history
/// inclusive of t, so the output starts window_len - 1 steps into the input.
FieldSeries localized_rolling_mean(const FieldSeries& series, const ExtremeConfig& cfg = {});

/// Per-pixel lo/hi percentiles of the localized-mean series (linear
/// interpolation between closest order statistics), all channels folded to
/// channel 0; pass a single-variable series.
ThresholdField compute_thresholds(const FieldSeries& train_series, const ExtremeConfig& cfg = {});

/// Percentile with linear interpolation between order statistics; `sorted`
/// must be ascending. q in [0, 1].
double percentile_sorted(const std::vector<double>& sorted, double q);

/// Masks over every timestamp of `localized` (a localized-mean series):
/// true where the value is outside (lo, hi), strict by default.
ExtremeMaskSeries build_masks(const FieldSeries& localized, const ThresholdField& thresholds,
                              const ExtremeConfig& cfg = {});

enum class DeterministicMetric { rmse, bias, pearson };

/// A deterministic metric restricted to the masked pixels per timestep;
/// prediction timestamps must align with the mask series.
MetricValue masked_metric(DeterministicMetric metric, CubeView pred, CubeView truth,
                          const ExtremeMaskSeries& masks, const LatWeights& weights);

/// ExtremeMaskSeries round-trip through the CLBT container (masks stored as
/// 0/1 binary32) for external pipelines.
FieldSeries masks_to_series(const ExtremeMaskSeries& masks);
ExtremeMaskSeries masks_from_series(const FieldSeries& series);
FieldSeries thresholds_to_series(const ThresholdField& thresholds, const Grid& grid);
ThresholdField thresholds_from_series(const FieldSeries& series);

}  // namespace clbench
