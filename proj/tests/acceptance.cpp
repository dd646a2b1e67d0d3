// Acceptance suite: one pass/fail line per criterion, exit 0 only when every
// non-skipped criterion passes. Criterion 7 is data-gated and reports SKIP
// when no locally converted reanalysis container is available.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "clbench/baselines.hpp"
#include "clbench/error.hpp"
#include "clbench/extreme.hpp"
#include "clbench/harness.hpp"
#include "clbench/metrics.hpp"
#include "clbench/regrid.hpp"
#include "clbench/rng.hpp"
#include "clbench/sampler.hpp"
#include "clbench/store.hpp"
#include "clbench/synthetic.hpp"

#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace clbench;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
int g_skips = 0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << number << ": " << name;
  if (!detail.empty()) std::cout << " -- " << detail;
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

void report_skip(int number, const std::string& name, const std::string& why) {
  std::cout << "[SKIP] criterion " << number << ": " << name << " -- " << why << std::endl;
  ++g_skips;
}

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.str().empty()) detail << "; ";
      detail << what;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

// --- criterion 1: metric-oracle equivalence ----------------------------------

void criterion_1() {
  const auto start = Clock::now();
  Check c;
  Rng rng(20240);
  const double tol = 1e-6;
  int instances = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t t = 1 + rng.uniform_index(10);
    const std::size_t channels = 1 + rng.uniform_index(3);
    const std::size_t h = 2 + rng.uniform_index(7);   // <= 8
    const std::size_t w = 2 + rng.uniform_index(15);  // <= 16
    const bool with_mask = rep % 2 == 1;
    ++instances;

    for (std::size_t ch = 0; ch < channels; ++ch) {
      auto r = testutil::random_instance(rng, t, h, w, with_mask);
      const CubeView pred(r.pred.data(), t, h, w);
      const CubeView truth(r.truth.data(), t, h, w);
      const MaskView mask =
          with_mask ? MaskView(r.mask.data(), t, h, w) : MaskView();

      c.expect(oracle::close_rel(lat_rmse(pred, truth, r.weights, mask).value,
                                 oracle::lat_rmse(r.inst), tol),
               "lat_rmse mismatch");
      const ClimatologyMap clim = temporal_mean(truth, "test-split");
      const std::vector<double> clim64(clim.v.begin(), clim.v.end());
      // Single-timestep instances have zero anomaly variance against the
      // test-split climatology: the library must flag undefined exactly when
      // the oracle's ratio degenerates.
      const MetricValue acc_v = acc(pred, truth, clim, r.weights, mask);
      const double acc_oracle = oracle::acc(r.inst, clim64);
      c.expect(acc_v.defined == std::isfinite(acc_oracle), "acc definedness mismatch");
      if (acc_v.defined && std::isfinite(acc_oracle))
        c.expect(oracle::close_rel(acc_v.value, acc_oracle, tol), "acc mismatch");
      c.expect(oracle::close_rel(mean_bias(pred, truth, mask).value,
                                 oracle::mean_bias(r.inst), tol),
               "mean_bias mismatch");
      c.expect(oracle::close_rel(pearson(pred, truth, mask).value, oracle::pearson(r.inst), tol),
               "pearson mismatch");
      c.expect(oracle::close_rel(nrmse_s(pred, truth, r.weights).value, oracle::nrmse_s(r.inst),
                                 tol),
               "nrmse_s mismatch");
      c.expect(oracle::close_rel(nrmse_g(pred, truth, r.weights).value, oracle::nrmse_g(r.inst),
                                 tol),
               "nrmse_g mismatch");
      c.expect(oracle::close_rel(nrmse_total(pred, truth, r.weights).value,
                                 oracle::nrmse_s(r.inst) + 5.0 * oracle::nrmse_g(r.inst), tol),
               "total mismatch");

      // Spread on a fresh random ensemble for the same geometry.
      const std::size_t m = 2 + rng.uniform_index(5);
      EnsembleForecast ens;
      ens.m = m;
      ens.n = t;
      ens.h = h;
      ens.w = w;
      ens.v.resize(m * t * h * w);
      for (auto& x : ens.v) x = static_cast<float>(rng.normal());
      std::vector<std::vector<double>> members(m);
      for (std::size_t mi = 0; mi < m; ++mi)
        members[mi].assign(ens.v.begin() + static_cast<std::ptrdiff_t>(mi * t * h * w),
                           ens.v.begin() + static_cast<std::ptrdiff_t>((mi + 1) * t * h * w));
      c.expect(oracle::close_rel(spread(ens, r.weights).value,
                                 oracle::spread(members, t, h, w, r.weights.w, true), tol),
               "spread mismatch");
    }
  }
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 10.0, "runtime " + fmt(elapsed) + "s exceeds 10s");
  report(1, "metric-oracle equivalence on " + std::to_string(instances) + " seeded instances",
         c.ok, c.ok ? fmt(elapsed) + "s" : c.detail.str());
}

// --- criterion 2: CRPS closed form vs quadrature ------------------------------

void criterion_2() {
  const auto start = Clock::now();
  Check c;
  const double point = crps_gaussian_point(0.0, 1.0, 0.0);
  c.expect(std::abs(point - 0.233695) <= 1e-6 + 5e-7,
           "point case " + fmt(point) + " != 0.233695");
  c.expect(std::abs(point - 0.23369497725510907) <= 1e-9, "frozen value drifted");

  Rng rng(20241);
  for (int rep = 0; rep < 100; ++rep) {
    const double mu = (rng.uniform() * 2 - 1) * 5.0;
    const double sigma = 0.05 + rng.uniform() * 3.0;
    const double x = mu + (rng.uniform() * 2 - 1) * 5.0 * sigma;
    const double closed = crps_gaussian_point(mu, sigma, x);
    const double integral = oracle::crps_integral(mu, sigma, x);
    if (!oracle::close_rel(closed, integral, 1e-6)) {
      c.expect(false, "mu=" + fmt(mu) + " sigma=" + fmt(sigma) + " x=" + fmt(x) + ": " +
                          fmt(closed) + " vs " + fmt(integral));
      break;
    }
  }
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 5.0, "runtime " + fmt(elapsed) + "s exceeds 5s");
  report(2, "CRPS closed form matches adaptive quadrature", c.ok,
         c.ok ? fmt(elapsed) + "s" : c.detail.str());
}

// --- criterion 3: perfect-forecast fixed points -------------------------------

void criterion_3() {
  Check c;
  SyntheticConfig cfg;
  cfg.n_steps = 40;
  cfg.resolution_deg = 22.5;
  cfg.seed = 20242;
  const FieldSeries series = gen_synthetic(cfg);
  const SampleSet truth = forecasting_samples(series, {0}, LeadTime{6}, {"t2m"}, {"t2m"});
  const PredictionSet preds = predictions_from_raw(truth.targets, truth, "perfect");
  const LatWeights w = make_lat_weights(series.grid);
  EvalConfig ecfg;
  const MetricReport rep = evaluate_direct(preds, truth, w, ecfg);
  for (const auto& row : rep.rows) {
    if (row.metric == "rmse") c.expect(row.value == 0.0, "rmse " + fmt(row.value) + " != 0");
    if (row.metric == "acc")
      c.expect(std::abs(row.value - 1.0) < 1e-12, "acc " + fmt(row.value) + " != 1");
    if (row.metric == "bias") c.expect(row.value == 0.0, "bias " + fmt(row.value) + " != 0");
    if (row.metric == "pearson")
      c.expect(std::abs(row.value - 1.0) < 1e-12, "pearson " + fmt(row.value) + " != 1");
  }
  const CubeView t = truth.target_channel(0);
  c.expect(nrmse_s(t, t, w).value == 0.0, "nrmse_s nonzero");
  c.expect(nrmse_g(t, t, w).value == 0.0, "nrmse_g nonzero");
  c.expect(nrmse_total(t, t, w).value == 0.0, "total nonzero");
  report(3, "perfect forecast scores RMSE 0, ACC 1, bias 0, Pearson 1, NRMSE 0", c.ok,
         c.detail.str());
}

// --- criterion 4: regridding properties ---------------------------------------

void criterion_4() {
  Check c;
  Rng rng(20243);

  // Identity on the same grid.
  const Grid g = grid_from_resolution(22.5);
  GridField f;
  f.grid = g;
  f.v.resize(g.h() * g.w());
  for (auto& x : f.v) x = static_cast<float>(rng.normal());
  c.expect(regrid_nearest(f, g).v == f.v, "nearest not identity on same grid");
  const GridField bl = regrid_bilinear(f, g);
  for (std::size_t x = 0; x < f.v.size(); ++x)
    if (std::abs(bl.v[x] - f.v[x]) > 1e-6f) {
      c.expect(false, "bilinear not identity on same grid");
      break;
    }

  // Longitude-linear reproduction at interior points.
  GridField lin;
  lin.grid = g;
  lin.v.resize(g.h() * g.w());
  for (std::size_t i = 0; i < g.h(); ++i)
    for (std::size_t j = 0; j < g.w(); ++j)
      lin.v[i * g.w() + j] = static_cast<float>(2.0 + 0.25 * static_cast<double>(j));
  for (int rep = 0; rep < 300; ++rep) {
    const double lon = rng.uniform() * (g.lons.back() - g.lons.front()) + g.lons.front();
    const double lat = (rng.uniform() * 2 - 1) * 80.0;
    Grid dst;
    dst.lats = {lat};
    dst.lons = {lon};
    dst.periodic_lon = false;
    const GridField out = regrid_bilinear(lin, dst);
    const double expect = 2.0 + 0.25 * (lon / 22.5);
    if (!oracle::close_rel(out.v[0], expect, 1e-6)) {
      c.expect(false, "lon-linear field not reproduced at lon " + fmt(lon));
      break;
    }
  }

  // Nearest vs exhaustive oracle on 50 random grid pairs.
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t hs = 2 + rng.uniform_index(7);
    const std::size_t ws = 2 + rng.uniform_index(15);
    const std::size_t ht = 2 + rng.uniform_index(7);
    const std::size_t wt = 2 + rng.uniform_index(15);
    const bool periodic = rep % 3 != 0;
    Grid src = testutil::random_grid(rng, hs, ws, periodic);
    Grid dst = testutil::random_grid(rng, ht, wt, periodic);
    GridField field;
    field.grid = src;
    field.v.resize(hs * ws);
    for (auto& x : field.v) x = static_cast<float>(rng.normal());
    const GridField out = regrid_nearest(field, dst);
    bool pair_ok = true;
    for (std::size_t i = 0; i < ht && pair_ok; ++i)
      for (std::size_t j = 0; j < wt && pair_ok; ++j) {
        const auto [si, sj] = oracle::nearest_exhaustive(src.lats, src.lons, periodic,
                                                         dst.lats[i], dst.lons[j]);
        if (out.v[i * wt + j] != field.v[si * ws + sj]) pair_ok = false;
      }
    if (!pair_ok) {
      c.expect(false, "nearest oracle mismatch on pair " + std::to_string(rep));
      break;
    }
  }
  report(4, "regridding: identity, interior lon-linear exactness, nearest oracle", c.ok,
         c.detail.str());
}

// --- criterion 5: extreme pipeline --------------------------------------------

void criterion_5() {
  Check c;
  SyntheticConfig cfg;
  cfg.n_steps = 3000;
  cfg.resolution_deg = 22.5;  // 8 x 16
  cfg.ar1 = 0.0;              // iid in time; matching train/test distributions
  cfg.seed = 20244;
  const FieldSeries train = gen_synthetic(cfg);
  cfg.seed = 20245;
  const FieldSeries test = gen_synthetic(cfg);

  const ThresholdField th = compute_thresholds(train);
  const ExtremeMaskSeries masks = build_masks(localized_rolling_mean(test), th);
  const double fraction =
      static_cast<double>(masks.true_count()) / static_cast<double>(masks.masks.size());
  c.expect(fraction >= 0.08 && fraction <= 0.12,
           "masked fraction " + fmt(fraction) + " outside [0.08, 0.12]");

  // Interior localized mean of a constant field is exactly 0.988x.
  FieldSeries flat = testutil::tiny_series(30, 4, 8, {"t2m"});
  for (auto& x : flat.data.v) x = 3.0f;
  const FieldSeries lm = localized_rolling_mean(flat);
  bool interior_ok = true;
  for (std::size_t i = 1; i + 1 < 4 && interior_ok; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      if (std::abs(lm.data.v[i * 8 + j] - 0.988f * 3.0f) > 1e-5f) interior_ok = false;
  c.expect(interior_ok, "interior localized mean != 0.988 * constant");

  report(5, "extreme pipeline: masked fraction near 10% and exact 0.988 stencil", c.ok,
         c.ok ? "fraction " + fmt(fraction) : c.detail.str());
}

// --- criterion 6: baseline behavior -------------------------------------------

void criterion_6() {
  Check c;
  SyntheticConfig cfg;
  cfg.n_steps = 6000;
  cfg.resolution_deg = 22.5;  // 8 x 16
  cfg.ar1 = 0.9;
  cfg.stddev = 2.0;
  cfg.seed = 20246;
  const FieldSeries train = gen_synthetic(cfg);
  cfg.seed = 20247;
  const FieldSeries test = gen_synthetic(cfg);
  const LatWeights w = make_lat_weights(test.grid);

  // Climatology RMSE is lead-invariant within 2%.
  const ClimatologyModel clim = climatology_forecast(train, {"t2m"});
  double lo = 1e300, hi = 0.0;
  for (const int lead : {6, 24, 72}) {
    const SampleSet truth = forecasting_samples(test, {0}, LeadTime{lead}, {"t2m"}, {"t2m"});
    const auto preds = climatology_predict(clim, truth.n);
    const MetricValue rmse =
        lat_rmse(CubeView(preds.data(), truth.n, 8, 16), truth.target_channel(0), w);
    lo = std::min(lo, rmse.value);
    hi = std::max(hi, rmse.value);
  }
  c.expect((hi - lo) / lo <= 0.02,
           "climatology RMSE varies " + fmt(100.0 * (hi - lo) / lo) + "% across leads");

  // Persistence RMSE grows with lead and matches the AR(1) closed form.
  double prev = 0.0;
  bool monotone = true;
  for (const int steps : {1, 4, 12}) {
    const SampleSet truth =
        forecasting_samples(test, {0}, LeadTime{6 * steps}, {"t2m"}, {"t2m"});
    const auto preds = persistence_forecast(truth, {"t2m"});
    const double rmse =
        lat_rmse(CubeView(preds.data(), truth.n, 8, 16), truth.target_channel(0), w).value;
    const double closed = std::sqrt(2.0 * (1.0 - std::pow(cfg.ar1, steps))) * cfg.stddev;
    if (!(rmse > prev)) monotone = false;
    prev = rmse;
    c.expect(std::abs(rmse - closed) / closed <= 0.03,
             "persistence lead " + std::to_string(6 * steps) + "h: " + fmt(rmse) + " vs closed " +
                 fmt(closed));
  }
  c.expect(monotone, "persistence RMSE not strictly increasing with lead");
  report(6, "baselines: lead-invariant climatology, AR(1) persistence closed form", c.ok,
         c.detail.str());
}

// --- criterion 7: data-gated reanalysis integration ---------------------------

void criterion_7() {
  const char* env = std::getenv("CLBENCH_ERA5_T2M");
  const std::string path = env ? env : "data/era5_t2m_5.625deg.clbt";
  if (!fs::exists(path)) {
    report_skip(7, "reanalysis T2m integration",
                "no local container at " + path +
                    " (set CLBENCH_ERA5_T2M; see README for the conversion recipe)");
    return;
  }
  Check c;
  try {
    const FieldSeries all = read_container(path);
    SplitSpec spec{{1979, 2015}, {2016, 2016}, {2017, 2018}};
    const SplitSeries parts = split_by_years(all, spec);
    const LatWeights w = make_lat_weights(all.grid);

    const ClimatologyModel clim = climatology_forecast(parts.train, {"t2m"});
    const SampleSet t6 = forecasting_samples(parts.test, {0}, LeadTime{6}, {"t2m"}, {"t2m"});
    const auto clim_preds = climatology_predict(clim, t6.n);
    const double clim_rmse =
        lat_rmse(CubeView(clim_preds.data(), t6.n, all.grid.h(), all.grid.w()),
                 t6.target_channel(0), w)
            .value;
    c.expect(std::abs(clim_rmse - 5.87) <= 0.05,
             "climatology RMSE " + fmt(clim_rmse) + " != 5.87 +- 0.05");

    const auto p6 = persistence_forecast(t6, {"t2m"});
    const double pers6 = lat_rmse(CubeView(p6.data(), t6.n, all.grid.h(), all.grid.w()),
                                  t6.target_channel(0), w)
                             .value;
    c.expect(std::abs(pers6 - 2.76) <= 0.05, "persistence 6h " + fmt(pers6) + " != 2.76 +- 0.05");

    const SampleSet t24 = forecasting_samples(parts.test, {0}, LeadTime{24}, {"t2m"}, {"t2m"});
    const auto p24 = persistence_forecast(t24, {"t2m"});
    const double pers24 = lat_rmse(CubeView(p24.data(), t24.n, all.grid.h(), all.grid.w()),
                                   t24.target_channel(0), w)
                              .value;
    c.expect(std::abs(pers24 - 2.13) <= 0.05,
             "persistence 1d " + fmt(pers24) + " != 2.13 +- 0.05");
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
  report(7, "reanalysis T2m climatology/persistence reference values", c.ok, c.detail.str());
}

// --- criterion 8: probabilistic suite ------------------------------------------

void criterion_8() {
  Check c;
  // Exchangeable Gaussian ensemble, M = 10, 16 x 32 x 64 > 5e5 pixel-draws.
  Rng rng = Rng(20248).stream("calibrated-ensemble");
  const std::size_t m = 10, n = 16, h = 32, w = 64;
  SampleSet truth;
  truth.n = n;
  truth.c_out = 1;
  truth.h_out = h;
  truth.w_out = w;
  truth.c_in = 1;
  truth.h_in = h;
  truth.w_in = w;
  truth.target_channels = {"t2m"};
  truth.input_channels = {"t2m@0h"};
  truth.targets.resize(n * h * w);
  truth.lead_hours.assign(n, 6);
  truth.init_times.assign(n, 0);
  for (auto& x : truth.targets) x = static_cast<float>(rng.normal());

  EnsembleForecast ens;
  ens.m = m;
  ens.n = n;
  ens.h = h;
  ens.w = w;
  ens.v.resize(m * n * h * w);
  for (auto& x : ens.v) x = static_cast<float>(rng.normal());

  const Grid grid = grid_from_resolution(5.625);
  const LatWeights weights = make_lat_weights(grid);
  EvalConfig cfg;
  cfg.rng_seed = 99;
  const MetricReport rep = evaluate_probabilistic(ens, truth, weights, cfg);

  double ssr = 0.0;
  for (const auto& row : rep.rows)
    if (row.metric == "spread_skill") ssr = row.value;
  c.expect(std::abs(ssr - 1.0) <= 0.05, "spread-skill " + fmt(ssr) + " not within 5% of 1");

  const auto& counts = rep.histograms.at(0).counts;
  const double p = oracle::chi_square_p(oracle::chi_square_uniform_stat(counts), m);
  c.expect(p > 0.01, "rank histogram chi-square p " + fmt(p) + " <= 0.01");
  report(8, "calibrated ensemble: spread-skill near 1, uniform rank histogram", c.ok,
         c.ok ? "ssr " + fmt(ssr) + ", p " + fmt(p) : c.detail.str());
}

// --- criterion 9: rollout structure --------------------------------------------

namespace {

class IdentityStep : public StepModel {
 public:
  IdentityStep(std::vector<std::string> vars, std::size_t block)
      : vars_(std::move(vars)), block_(block) {}
  std::vector<std::string> output_vars() const override { return vars_; }
  void predict(const float* input, float* output) const override {
    std::copy(input, input + block_, output);
  }

 private:
  std::vector<std::string> vars_;
  std::size_t block_;
};

class LinearStep : public StepModel {
 public:
  LinearStep(std::vector<double> a, std::size_t dim) : a_(std::move(a)), dim_(dim) {}
  std::vector<std::string> output_vars() const override { return {"x"}; }
  void predict(const float* input, float* output) const override {
    for (std::size_t i = 0; i < dim_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) acc += a_[i * dim_ + j] * input[j];
      output[i] = static_cast<float>(acc);
    }
  }

 private:
  std::vector<double> a_;
  std::size_t dim_;
};

}  // namespace

void criterion_9() {
  Check c;
  SyntheticConfig cfg;
  cfg.n_steps = 60;
  cfg.resolution_deg = 45.0;
  cfg.seed = 20249;
  const FieldSeries series = gen_synthetic(cfg);
  const std::size_t plane = series.grid.h() * series.grid.w();

  // Persistence is a fixed point for every step count.
  const SampleSet init =
      forecasting_samples(series, {0, -6, -12}, LeadTime{6}, {"t2m"}, {"t2m"});
  IdentityStep persistence({"t2m"}, plane);
  RolloutSpec spec;
  spec.vars = {"t2m"};
  spec.offsets_hours = {0, -6, -12};
  spec.base_step_hours = 6;
  for (const std::size_t steps : {1u, 3u, 8u}) {
    const auto traj = rollout(persistence, init, spec, steps);
    bool fixed = traj.size() == steps;
    for (const auto& step : traj)
      for (std::size_t k = 0; k < init.n && fixed; ++k)
        for (std::size_t p = 0; p < plane; ++p)
          if (step.preds[k * plane + p] != init.input(k)[p]) {
            fixed = false;
            break;
          }
    c.expect(fixed, "persistence not a fixed point at " + std::to_string(steps) + " steps");
  }

  // Linear step model rolled k times matches the k-th matrix power.
  Rng rng(20250);
  const std::size_t h = 2, w = 4, dim = h * w;
  std::vector<double> a(dim * dim);
  for (auto& x : a) x = rng.normal() * 0.25;
  SampleSet linit;
  linit.n = 5;
  linit.c_in = 1;
  linit.h_in = h;
  linit.w_in = w;
  linit.c_out = 1;
  linit.h_out = h;
  linit.w_out = w;
  linit.input_channels = {"x@0h"};
  linit.target_channels = {"x"};
  linit.inputs.resize(linit.n * dim);
  linit.targets.resize(linit.n * dim);
  for (auto& x : linit.inputs) x = static_cast<float>(rng.normal());
  linit.lead_hours.assign(linit.n, 6);
  linit.init_times.assign(linit.n, 0);
  LinearStep lin(a, dim);
  RolloutSpec lspec;
  lspec.vars = {"x"};
  lspec.offsets_hours = {0};
  lspec.base_step_hours = 6;
  const std::size_t k_steps = 7;
  const auto traj = rollout(lin, linit, lspec, k_steps);
  const auto ak = oracle::matrix_power(a, dim, k_steps);
  bool match = true;
  for (std::size_t s = 0; s < linit.n && match; ++s)
    for (std::size_t i = 0; i < dim; ++i) {
      double expect = 0.0;
      for (std::size_t j = 0; j < dim; ++j) expect += ak[i * dim + j] * linit.input(s)[j];
      if (std::abs(traj[k_steps - 1].preds[s * dim + i] - expect) > 1e-5) {
        match = false;
        break;
      }
    }
  c.expect(match, "linear rollout differs from the matrix power");
  report(9, "rollout: persistence fixed point, linear model matches matrix powers", c.ok,
         c.detail.str());
}

// --- criterion 10: container bit-exactness and CLI end-to-end ------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int run_cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = "cd '" + dir.string() + "' && '" + CLBENCH_CLI_PATH + "' " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_10() {
  const auto start = Clock::now();
  Check c;

  // Container round trip is bit-exact.
  SyntheticConfig cfg;
  cfg.n_steps = 12;
  cfg.resolution_deg = 22.5;
  cfg.seed = 20251;
  const FieldSeries series = gen_synthetic(cfg);
  const fs::path dir = fs::temp_directory_path() / "clbench-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_container(series, (dir / "rt1.clbt").string());
  const FieldSeries reread = read_container((dir / "rt1.clbt").string());
  write_container(reread, (dir / "rt2.clbt").string());
  c.expect(slurp(dir / "rt1.clbt") == slurp(dir / "rt2.clbt"),
           "container round trip not byte-identical");
  c.expect(reread.data.v == series.data.v, "payload altered by round trip");

  // CLI end-to-end, run twice into separate directories; reports must match.
  auto pipeline = [&](const fs::path& d) -> bool {
    fs::create_directories(d);
    if (run_cli("gen-synthetic --seed 42 --out data.clbt --steps 4400 --resolution 22.5 "
                "--ar1 0.5 --threads 4",
                d) != 0)
      return false;
    if (run_cli("split --in data.clbt --out-prefix sp --train 1979:1979 --val 1980:1980 "
                "--test 1981:1981",
                d) != 0)
      return false;
    if (run_cli("extreme-thresholds --in sp.train.clbt --var t2m --out th.clbt --threads 4",
                d) != 0)
      return false;
    if (run_cli("extreme-masks --in data.clbt --thresholds th.clbt --var t2m "
                "--test-years 1981:1981 --out masks.clbt",
                d) != 0)
      return false;
    if (run_cli("baseline fit --model climatology --train sp.train.clbt --out-vars t2m "
                "--out clim.clbt",
                d) != 0)
      return false;
    if (run_cli("baseline predict --model climatology --model-file clim.clbt "
                "--in sp.test.clbt --lead 6 --out preds.clbt",
                d) != 0)
      return false;
    if (run_cli("evaluate --protocol direct --preds preds.clbt --truth sp.test.clbt "
                "--mask extreme --extreme-masks masks.clbt --out report",
                d) != 0)
      return false;
    if (run_cli("report --in report.json --format csv --out-prefix report", d) != 0)
      return false;
    if (run_cli("report --in report.json --format maps --out-prefix report", d) != 0)
      return false;
    return true;
  };
  const bool a_ok = pipeline(dir / "a");
  const bool b_ok = pipeline(dir / "b");
  c.expect(a_ok && b_ok, "pipeline run failed");
  if (a_ok && b_ok) {
    c.expect(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"),
             "reports differ between identical runs");
    c.expect(slurp(dir / "a" / "report.csv") == slurp(dir / "b" / "report.csv"),
             "csv reports differ between identical runs");
    c.expect(fs::exists(dir / "a" / "report.csv"), "csv report missing");
  }
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 60.0, "runtime " + fmt(elapsed) + "s exceeds 60s");
  report(10, "container bit-exactness and deterministic CLI end-to-end", c.ok,
         c.ok ? fmt(elapsed) + "s" : c.detail.str());
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();

  std::cout << "acceptance: " << (10 - g_failures - g_skips) << " passed, " << g_failures
            << " failed, " << g_skips << " skipped" << std::endl;
  return g_failures == 0 ? 0 : 1;
}
