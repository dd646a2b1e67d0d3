#include "clbench/extreme.hpp"

#include <algorithm>
#include <cmath>

#include "clbench/error.hpp"
#include "clbench/parallel.hpp"

namespace clbench {

namespace {

std::size_t window_samples(const FieldSeries& series, int window_days) {
  require(window_days >= 1, errc::bad_config, "window must be at least one day");
  const std::int64_t per_day = 86400 / series.time_step_seconds;
  require(per_day >= 1 && 86400 % series.time_step_seconds == 0, errc::bad_config,
          "series step must divide one day");
  return static_cast<std::size_t>(window_days) * static_cast<std::size_t>(per_day);
}

}  // namespace

std::size_t ExtremeMaskSeries::true_count() const {
  std::size_t c = 0;
  for (std::uint8_t b : masks) c += b != 0;
  return c;
}

FieldSeries localized_rolling_mean(const FieldSeries& series, const ExtremeConfig& cfg) {
  const std::size_t win = window_samples(series, cfg.window_days);
  require(series.n_times() >= win, errc::insufficient_history,
          "series shorter than the rolling window");

  const std::size_t t_in = series.data.t, c = series.data.c;
  const std::size_t h = series.data.h, w = series.data.w, plane = h * w;
  const std::size_t t_out = t_in - win + 1;

  // Stage 1: trailing temporal mean, window inclusive of t.
  std::vector<float> rolled(t_out * c * plane);
  parallel_for(c * plane, [&](std::size_t begin, std::size_t end) {
    for (std::size_t cp = begin; cp < end; ++cp) {
      const std::size_t ci = cp / plane, p = cp % plane;
      double acc = 0.0;
      for (std::size_t k = 0; k < win; ++k) acc += series.data.v[(k * c + ci) * plane + p];
      rolled[(0 * c + ci) * plane + p] = static_cast<float>(acc / static_cast<double>(win));
      for (std::size_t k = 1; k < t_out; ++k) {
        acc += series.data.v[((k + win - 1) * c + ci) * plane + p];
        acc -= series.data.v[((k - 1) * c + ci) * plane + p];
        rolled[(k * c + ci) * plane + p] = static_cast<float>(acc / static_cast<double>(win));
      }
    }
  });

  // Stage 2: 3x3 spatial blend. Missing latitude neighbors are omitted; the
  // weight sum is not renormalized unless configured, matching the printed
  // 0.44 / 0.11 / 0.027 stencil whose total is 0.988.
  constexpr double kCenter = 0.44, kEdge = 0.11, kVertex = 0.027;
  FieldSeries out;
  out.grid = series.grid;
  out.vars = series.vars;
  out.extra = series.extra;
  out.time_step_seconds = series.time_step_seconds;
  out.time_start_unix = series.time(win - 1);
  out.data = Tensor4(t_out, c, h, w);

  const bool periodic = series.grid.periodic_lon;
  parallel_for(t_out * c, [&](std::size_t begin, std::size_t end) {
    for (std::size_t kc = begin; kc < end; ++kc) {
      const float* src = rolled.data() + kc * plane;
      float* dst = out.data.v.data() + kc * plane;
      for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
          double acc = kCenter * src[i * w + j];
          double wsum = kCenter;
          for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
              if (di == 0 && dj == 0) continue;
              const std::int64_t ii = static_cast<std::int64_t>(i) + di;
              if (ii < 0 || ii >= static_cast<std::int64_t>(h)) continue;
              std::int64_t jj = static_cast<std::int64_t>(j) + dj;
              if (periodic) {
                jj = (jj + static_cast<std::int64_t>(w)) % static_cast<std::int64_t>(w);
              } else if (jj < 0 || jj >= static_cast<std::int64_t>(w)) {
                continue;
              }
              const double weight = (di == 0 || dj == 0) ? kEdge : kVertex;
              acc += weight * src[ii * static_cast<std::int64_t>(w) + jj];
              wsum += weight;
            }
          }
          dst[i * w + j] = static_cast<float>(cfg.renormalize_stencil ? acc / wsum : acc);
        }
      }
    }
  });
  return out;
}

double percentile_sorted(const std::vector<double>& sorted, double q) {
  require(!sorted.empty(), errc::insufficient_samples, "percentile of an empty sample");
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

ThresholdField compute_thresholds(const FieldSeries& train_series, const ExtremeConfig& cfg) {
  const FieldSeries localized = localized_rolling_mean(train_series, cfg);
  require(localized.data.c == 1, errc::bad_config,
          "threshold computation expects a single-variable series");
  const std::size_t h = localized.data.h, w = localized.data.w, plane = h * w;
  const std::size_t t = localized.data.t;

  ThresholdField out;
  out.h = h;
  out.w = w;
  out.lo.resize(plane);
  out.hi.resize(plane);

  std::vector<std::string> failures(plane);
  parallel_for(plane, [&](std::size_t begin, std::size_t end) {
    std::vector<double> vals;
    vals.reserve(t);
    for (std::size_t p = begin; p < end; ++p) {
      vals.clear();
      for (std::size_t k = 0; k < t; ++k) {
        const double x = localized.data.v[k * plane + p];
        if (std::isfinite(x)) vals.push_back(x);
      }
      if (vals.size() < cfg.min_samples) {
        failures[p] = "pixel " + std::to_string(p) + " has " + std::to_string(vals.size()) +
                      " localized-mean samples (< " + std::to_string(cfg.min_samples) + ")";
        continue;
      }
      std::sort(vals.begin(), vals.end());
      out.lo[p] = static_cast<float>(percentile_sorted(vals, cfg.lo_quantile));
      out.hi[p] = static_cast<float>(percentile_sorted(vals, cfg.hi_quantile));
    }
  });
  for (const auto& msg : failures)
    require(msg.empty(), errc::insufficient_samples, msg);
  return out;
}

ExtremeMaskSeries build_masks(const FieldSeries& localized, const ThresholdField& thresholds,
                              const ExtremeConfig& cfg) {
  require(localized.data.h == thresholds.h && localized.data.w == thresholds.w,
          errc::dimension_mismatch, "threshold field shape differs from series");
  require(localized.data.c == 1, errc::bad_config, "mask building expects a single variable");

  ExtremeMaskSeries out;
  out.grid = localized.grid;
  out.time_start_unix = localized.time_start_unix;
  out.time_step_seconds = localized.time_step_seconds;
  out.n = localized.data.t;
  out.h = localized.data.h;
  out.w = localized.data.w;
  const std::size_t plane = out.h * out.w;
  out.masks.assign(out.n * plane, 0);
  for (std::size_t k = 0; k < out.n; ++k)
    for (std::size_t p = 0; p < plane; ++p) {
      const float x = localized.data.v[k * plane + p];
      const bool outside = cfg.inclusive_bounds
                               ? (x <= thresholds.lo[p] || x >= thresholds.hi[p])
                               : (x < thresholds.lo[p] || x > thresholds.hi[p]);
      out.masks[k * plane + p] = outside ? 1 : 0;
    }
  return out;
}

MetricValue masked_metric(DeterministicMetric metric, CubeView pred, CubeView truth,
                          const ExtremeMaskSeries& masks, const LatWeights& weights) {
  require(masks.n == pred.n && masks.h == pred.h && masks.w == pred.w,
          errc::dimension_mismatch, "mask series shape differs from predictions");
  require(masks.true_count() > 0, errc::empty_result, "no masked pixel in the whole period");
  const MaskView mv = masks.view();
  switch (metric) {
    case DeterministicMetric::rmse:
      return lat_rmse(pred, truth, weights, mv);
    case DeterministicMetric::bias:
      return mean_bias(pred, truth, mv);
    case DeterministicMetric::pearson:
      return pearson(pred, truth, mv);
  }
  return MetricValue::undefined();
}

FieldSeries masks_to_series(const ExtremeMaskSeries& masks) {
  FieldSeries out;
  out.grid = masks.grid;
  out.vars = {{"extreme_mask", "bool", "surface", false}};
  out.time_start_unix = masks.time_start_unix;
  out.time_step_seconds = masks.time_step_seconds;
  out.data = Tensor4(masks.n, 1, masks.h, masks.w);
  for (std::size_t x = 0; x < masks.masks.size(); ++x)
    out.data.v[x] = masks.masks[x] ? 1.0f : 0.0f;
  return out;
}

ExtremeMaskSeries masks_from_series(const FieldSeries& series) {
  require(series.data.c == 1, errc::dimension_mismatch, "mask container must be single-channel");
  ExtremeMaskSeries out;
  out.grid = series.grid;
  out.time_start_unix = series.time_start_unix;
  out.time_step_seconds = series.time_step_seconds;
  out.n = series.data.t;
  out.h = series.data.h;
  out.w = series.data.w;
  out.masks.resize(series.data.size());
  for (std::size_t x = 0; x < series.data.v.size(); ++x)
    out.masks[x] = series.data.v[x] != 0.0f ? 1 : 0;
  return out;
}

FieldSeries thresholds_to_series(const ThresholdField& thresholds, const Grid& grid) {
  FieldSeries out;
  out.grid = grid;
  out.vars = {{"threshold_lo", "", "surface", false}, {"threshold_hi", "", "surface", false}};
  out.time_start_unix = 0;
  out.time_step_seconds = 1;
  out.data = Tensor4(1, 2, thresholds.h, thresholds.w);
  std::copy(thresholds.lo.begin(), thresholds.lo.end(), out.data.v.begin());
  std::copy(thresholds.hi.begin(), thresholds.hi.end(),
            out.data.v.begin() + static_cast<std::ptrdiff_t>(thresholds.h * thresholds.w));
  return out;
}

ThresholdField thresholds_from_series(const FieldSeries& series) {
  require(series.data.c == 2 && series.data.t == 1, errc::dimension_mismatch,
          "threshold container must be 1 x 2 x H x W");
  ThresholdField out;
  out.h = series.data.h;
  out.w = series.data.w;
  const std::size_t plane = out.h * out.w;
  out.lo.assign(series.data.v.begin(), series.data.v.begin() + static_cast<std::ptrdiff_t>(plane));
  out.hi.assign(series.data.v.begin() + static_cast<std::ptrdiff_t>(plane),
                series.data.v.begin() + static_cast<std::ptrdiff_t>(2 * plane));
  return out;
}

}  // namespace clbench
