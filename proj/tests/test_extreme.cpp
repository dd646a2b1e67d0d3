#include "doctest.h"

#include <cmath>

#include "clbench/error.hpp"
#include "clbench/extreme.hpp"
#include "clbench/rng.hpp"
#include "clbench/synthetic.hpp"

#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace clbench;

namespace {

FieldSeries constant_series(std::size_t t, std::size_t h, std::size_t w, float value) {
  FieldSeries s = testutil::tiny_series(t, h, w, {"t2m"});
  for (auto& x : s.data.v) x = value;
  return s;
}

// Naive reference for the localized mean: per-pixel double loop over the
// window, then an explicit stencil pass.
std::vector<float> naive_localized(const FieldSeries& s, int window_days) {
  const std::size_t win =
      static_cast<std::size_t>(window_days) * static_cast<std::size_t>(86400 / s.time_step_seconds);
  const std::size_t h = s.data.h, w = s.data.w, plane = h * w;
  const std::size_t t_out = s.data.t - win + 1;
  std::vector<double> rolled(t_out * plane);
  for (std::size_t k = 0; k < t_out; ++k)
    for (std::size_t p = 0; p < plane; ++p) {
      double acc = 0.0;
      for (std::size_t d = 0; d < win; ++d) acc += s.data.v[(k + d) * plane + p];
      rolled[k * plane + p] = acc / static_cast<double>(win);
    }
  std::vector<float> out(t_out * plane);
  for (std::size_t k = 0; k < t_out; ++k)
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j) {
        double acc = 0.44 * rolled[k * plane + i * w + j];
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            if (di == 0 && dj == 0) continue;
            const std::int64_t ii = static_cast<std::int64_t>(i) + di;
            if (ii < 0 || ii >= static_cast<std::int64_t>(h)) continue;
            const std::size_t jj =
                static_cast<std::size_t>((static_cast<std::int64_t>(j) + dj + w) % w);
            acc += ((di == 0 || dj == 0) ? 0.11 : 0.027) * rolled[k * plane + ii * w + jj];
          }
        out[k * plane + i * w + j] = static_cast<float>(acc);
      }
  return out;
}

}  // namespace

TEST_CASE("localized mean: constant field scales by the 0.988 stencil sum") {
  // 6-hourly, 7-day window = 28 samples; h >= 3 so interior rows exist.
  const FieldSeries s = constant_series(40, 4, 8, 2.0f);
  const FieldSeries lm = localized_rolling_mean(s);
  CHECK(lm.n_times() == 40 - 28 + 1);
  // Interior rows see the full stencil: 0.44 + 4*0.11 + 4*0.027 = 0.988.
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(lm.data.v[1 * 8 + j] == doctest::Approx(0.988 * 2.0).epsilon(1e-6));
    CHECK(lm.data.v[2 * 8 + j] == doctest::Approx(0.988 * 2.0).epsilon(1e-6));
  }
  // Edge rows miss one edge and two vertex neighbors: 0.988 - 0.11 - 2*0.027.
  for (std::size_t j = 0; j < 8; ++j)
    CHECK(lm.data.v[0 * 8 + j] == doctest::Approx((0.988 - 0.164) * 2.0).epsilon(1e-6));
}

TEST_CASE("localized mean: renormalized stencil restores the constant") {
  const FieldSeries s = constant_series(30, 4, 8, 3.0f);
  ExtremeConfig cfg;
  cfg.renormalize_stencil = true;
  const FieldSeries lm = localized_rolling_mean(s, cfg);
  for (float x : lm.data.v) CHECK(x == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("localized mean: spatial delta reproduces the stencil footprint") {
  FieldSeries s = constant_series(28, 5, 8, 0.0f);
  // Delta at (2, 3) in every timestep; time mean leaves the delta in place.
  const std::size_t plane = 5 * 8;
  for (std::size_t k = 0; k < 28; ++k) s.data.v[k * plane + 2 * 8 + 3] = 1.0f;
  const FieldSeries lm = localized_rolling_mean(s);
  REQUIRE(lm.n_times() == 1);
  CHECK(lm.data.v[2 * 8 + 3] == doctest::Approx(0.44));
  CHECK(lm.data.v[1 * 8 + 3] == doctest::Approx(0.11));
  CHECK(lm.data.v[3 * 8 + 3] == doctest::Approx(0.11));
  CHECK(lm.data.v[2 * 8 + 2] == doctest::Approx(0.11));
  CHECK(lm.data.v[2 * 8 + 4] == doctest::Approx(0.11));
  CHECK(lm.data.v[1 * 8 + 2] == doctest::Approx(0.027));
  CHECK(lm.data.v[1 * 8 + 4] == doctest::Approx(0.027));
  CHECK(lm.data.v[3 * 8 + 2] == doctest::Approx(0.027));
  CHECK(lm.data.v[3 * 8 + 4] == doctest::Approx(0.027));
  CHECK(lm.data.v[0 * 8 + 3] == doctest::Approx(0.0));
  CHECK(lm.data.v[2 * 8 + 5] == doctest::Approx(0.0));
}

TEST_CASE("localized mean: longitude wrap includes the rightmost column") {
  FieldSeries s = constant_series(28, 3, 6, 0.0f);
  const std::size_t plane = 3 * 6;
  for (std::size_t k = 0; k < 28; ++k) s.data.v[k * plane + 1 * 6 + 0] = 1.0f;  // left edge
  const FieldSeries lm = localized_rolling_mean(s);
  CHECK(lm.data.v[1 * 6 + 5] == doctest::Approx(0.11));  // wraps to the rightmost pixel
  CHECK(lm.data.v[0 * 6 + 5] == doctest::Approx(0.027));
}

TEST_CASE("localized mean: random series matches the naive double loop") {
  SyntheticConfig cfg;
  cfg.n_steps = 60;
  cfg.resolution_deg = 30.0;  // 6 x 12
  cfg.seed = 31;
  const FieldSeries s = gen_synthetic(cfg);
  const FieldSeries lm = localized_rolling_mean(s);
  const std::vector<float> naive = naive_localized(s, 7);
  REQUIRE(lm.data.v.size() == naive.size());
  for (std::size_t x = 0; x < naive.size(); ++x)
    CHECK(lm.data.v[x] == doctest::Approx(naive[x]).epsilon(1e-6));
}

TEST_CASE("localized mean: linearity in the input") {
  SyntheticConfig cfg;
  cfg.n_steps = 35;
  cfg.resolution_deg = 45.0;
  cfg.seed = 32;
  const FieldSeries a = gen_synthetic(cfg);
  cfg.seed = 33;
  const FieldSeries b = gen_synthetic(cfg);
  FieldSeries sum = a;
  for (std::size_t x = 0; x < sum.data.v.size(); ++x)
    sum.data.v[x] = 2.0f * a.data.v[x] + 3.0f * b.data.v[x];
  const FieldSeries la = localized_rolling_mean(a);
  const FieldSeries lb = localized_rolling_mean(b);
  const FieldSeries ls = localized_rolling_mean(sum);
  for (std::size_t x = 0; x < ls.data.v.size(); ++x)
    CHECK(ls.data.v[x] ==
          doctest::Approx(2.0 * la.data.v[x] + 3.0 * lb.data.v[x]).epsilon(1e-4));
}

TEST_CASE("localized mean: insufficient history rejected") {
  const FieldSeries s = constant_series(10, 2, 2, 1.0f);  // needs 28 samples
  CHECK_THROWS_AS(localized_rolling_mean(s), Error);
}

TEST_CASE("compute_thresholds: constant series collapses lo == hi") {
  const FieldSeries s = constant_series(130, 3, 4, 7.0f);
  const ThresholdField th = compute_thresholds(s);
  const float interior = th.lo[1 * 4 + 2];
  CHECK(interior == doctest::Approx(0.988 * 7.0).epsilon(1e-6));
  for (std::size_t p = 0; p < 12; ++p) CHECK(th.lo[p] == th.hi[p]);
}

TEST_CASE("compute_thresholds: order statistics of 1..100 interpolate to 5.95 / 95.05") {
  std::vector<double> vals;
  for (int i = 1; i <= 100; ++i) vals.push_back(i);
  CHECK(percentile_sorted(vals, 0.05) == doctest::Approx(5.95).epsilon(1e-12));
  CHECK(percentile_sorted(vals, 0.95) == doctest::Approx(95.05).epsilon(1e-12));
  // Against the independent order-statistic oracle on random samples.
  Rng rng(34);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> xs;
    for (int i = 0; i < 137; ++i) xs.push_back(rng.normal());
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    CHECK(percentile_sorted(sorted, 0.05) == doctest::Approx(oracle::percentile(xs, 0.05)));
    CHECK(percentile_sorted(sorted, 0.95) == doctest::Approx(oracle::percentile(xs, 0.95)));
  }
}

TEST_CASE("compute_thresholds: pixelwise random series against a sort-based oracle") {
  SyntheticConfig cfg;
  cfg.n_steps = 160;
  cfg.resolution_deg = 45.0;  // 4 x 8
  cfg.seed = 35;
  cfg.ar1 = 0.0;
  const FieldSeries s = gen_synthetic(cfg);
  const ThresholdField th = compute_thresholds(s);
  const FieldSeries lm = localized_rolling_mean(s);
  const std::size_t plane = 4 * 8;
  for (std::size_t p = 0; p < plane; ++p) {
    std::vector<double> vals;
    for (std::size_t k = 0; k < lm.data.t; ++k) vals.push_back(lm.data.v[k * plane + p]);
    CHECK(th.lo[p] == doctest::Approx(oracle::percentile(vals, 0.05)).epsilon(1e-6));
    CHECK(th.hi[p] == doctest::Approx(oracle::percentile(vals, 0.95)).epsilon(1e-6));
  }
}

TEST_CASE("compute_thresholds: insufficient samples rejected") {
  const FieldSeries s = constant_series(40, 2, 2, 1.0f);  // only 13 localized samples
  CHECK_THROWS_AS(compute_thresholds(s), Error);
}

TEST_CASE("build_masks: strict inequality keeps boundary values out") {
  const FieldSeries s = constant_series(30, 2, 4, 5.0f);
  const FieldSeries lm = localized_rolling_mean(s);
  ThresholdField th;
  th.h = 2;
  th.w = 4;
  th.lo.assign(8, lm.data.v[0]);
  th.hi.assign(8, lm.data.v[0]);
  const ExtremeMaskSeries masks = build_masks(lm, th);
  CHECK(masks.true_count() == 0);

  ExtremeConfig inclusive;
  inclusive.inclusive_bounds = true;
  const ExtremeMaskSeries masks2 = build_masks(lm, th, inclusive);
  CHECK(masks2.true_count() == masks2.masks.size());
}

TEST_CASE("build_masks: values above hi are all masked") {
  const FieldSeries s = constant_series(30, 2, 4, 50.0f);
  const FieldSeries lm = localized_rolling_mean(s);
  ThresholdField th;
  th.h = 2;
  th.w = 4;
  th.lo.assign(8, 0.0f);
  th.hi.assign(8, 1.0f);
  const ExtremeMaskSeries masks = build_masks(lm, th);
  CHECK(masks.true_count() == masks.masks.size());
}

TEST_CASE("build_masks: monotone in the upper threshold") {
  SyntheticConfig cfg;
  cfg.n_steps = 200;
  cfg.resolution_deg = 45.0;
  cfg.seed = 36;
  const FieldSeries s = gen_synthetic(cfg);
  const FieldSeries lm = localized_rolling_mean(s);
  const ThresholdField th = compute_thresholds(s, ExtremeConfig{.min_samples = 100});
  ThresholdField raised = th;
  for (auto& x : raised.hi) x += 0.5f;
  const auto before = build_masks(lm, th);
  const auto after = build_masks(lm, raised);
  CHECK(after.true_count() <= before.true_count());
  for (std::size_t x = 0; x < before.masks.size(); ++x)
    if (after.masks[x]) CHECK(before.masks[x]);
}

TEST_CASE("build_masks: deterministic bit-for-bit") {
  SyntheticConfig cfg;
  cfg.n_steps = 150;
  cfg.resolution_deg = 45.0;
  cfg.seed = 37;
  const FieldSeries s = gen_synthetic(cfg);
  const ThresholdField th = compute_thresholds(s);
  const FieldSeries lm = localized_rolling_mean(s);
  const auto a = build_masks(lm, th);
  const auto b = build_masks(lm, th);
  CHECK(a.masks == b.masks);
}

TEST_CASE("masked_metric: all-true masks equal the unmasked metric") {
  Rng rng(38);
  auto r = testutil::random_instance(rng, 4, 3, 5, false);
  ExtremeMaskSeries masks;
  masks.n = 4;
  masks.h = 3;
  masks.w = 5;
  masks.masks.assign(4 * 15, 1);
  const MetricValue masked = masked_metric(DeterministicMetric::rmse,
                                           CubeView(r.pred.data(), 4, 3, 5),
                                           CubeView(r.truth.data(), 4, 3, 5), masks, r.weights);
  const MetricValue plain =
      lat_rmse(CubeView(r.pred.data(), 4, 3, 5), CubeView(r.truth.data(), 4, 3, 5), r.weights);
  CHECK(masked.value == plain.value);
}

TEST_CASE("masked_metric: single-pixel mask reduces to that pixel's error") {
  Rng rng(39);
  auto r = testutil::random_instance(rng, 1, 3, 5, false);
  ExtremeMaskSeries masks;
  masks.n = 1;
  masks.h = 3;
  masks.w = 5;
  masks.masks.assign(15, 0);
  masks.masks[7] = 1;
  const MetricValue v = masked_metric(DeterministicMetric::rmse,
                                      CubeView(r.pred.data(), 1, 3, 5),
                                      CubeView(r.truth.data(), 1, 3, 5), masks, r.weights);
  CHECK(v.value == doctest::Approx(std::abs(r.pred[7] - r.truth[7])).epsilon(1e-6));
}

TEST_CASE("masked_metric: random masks agree with the metrics-module oracle path") {
  Rng rng(40);
  auto r = testutil::random_instance(rng, 5, 4, 6, true);
  ExtremeMaskSeries masks;
  masks.n = 5;
  masks.h = 4;
  masks.w = 6;
  masks.masks = r.mask;
  const MetricValue v = masked_metric(DeterministicMetric::bias,
                                      CubeView(r.pred.data(), 5, 4, 6),
                                      CubeView(r.truth.data(), 5, 4, 6), masks, r.weights);
  CHECK(oracle::close_rel(v.value, oracle::mean_bias(r.inst), 1e-9));
}

TEST_CASE("masked_metric: empty mask series rejected") {
  Rng rng(41);
  auto r = testutil::random_instance(rng, 2, 2, 2, false);
  ExtremeMaskSeries masks;
  masks.n = 2;
  masks.h = 2;
  masks.w = 2;
  masks.masks.assign(8, 0);
  CHECK_THROWS_AS(masked_metric(DeterministicMetric::rmse, CubeView(r.pred.data(), 2, 2, 2),
                                CubeView(r.truth.data(), 2, 2, 2), masks, r.weights),
                  Error);
}

TEST_CASE("threshold and mask containers round-trip") {
  SyntheticConfig cfg;
  cfg.n_steps = 140;
  cfg.resolution_deg = 45.0;
  cfg.seed = 42;
  const FieldSeries s = gen_synthetic(cfg);
  const ThresholdField th = compute_thresholds(s);
  const FieldSeries packed = thresholds_to_series(th, s.grid);
  const ThresholdField back = thresholds_from_series(packed);
  CHECK(back.lo == th.lo);
  CHECK(back.hi == th.hi);

  const FieldSeries lm = localized_rolling_mean(s);
  const ExtremeMaskSeries masks = build_masks(lm, th);
  const ExtremeMaskSeries masks_back = masks_from_series(masks_to_series(masks));
  CHECK(masks_back.masks == masks.masks);
  CHECK(masks_back.time_start_unix == masks.time_start_unix);
}

TEST_CASE("iid train/test distributions mask close to 10 percent") {
  // Small version of the acceptance pipeline check.
  SyntheticConfig cfg;
  cfg.n_steps = 1600;
  cfg.resolution_deg = 30.0;  // 6 x 12
  cfg.ar1 = 0.0;              // iid in time
  cfg.seed = 43;
  const FieldSeries train = gen_synthetic(cfg);
  cfg.seed = 44;
  const FieldSeries test = gen_synthetic(cfg);
  const ThresholdField th = compute_thresholds(train);
  const ExtremeMaskSeries masks = build_masks(localized_rolling_mean(test), th);
  const double fraction =
      static_cast<double>(masks.true_count()) / static_cast<double>(masks.masks.size());
  CHECK(fraction > 0.06);
  CHECK(fraction < 0.14);
}
