#include <benchmark/benchmark.h>

#include "clbench/baselines.hpp"
#include "clbench/extreme.hpp"
#include "clbench/regrid.hpp"
#include "clbench/rng.hpp"
#include "clbench/sampler.hpp"
#include "clbench/synthetic.hpp"

using namespace clbench;

namespace {

const FieldSeries& series_5p625() {
  static const FieldSeries s = [] {
    SyntheticConfig cfg;
    cfg.n_steps = 256;
    cfg.resolution_deg = 5.625;
    cfg.seed = 3;
    return gen_synthetic(cfg);
  }();
  return s;
}

void BM_regrid_bilinear_up2x(benchmark::State& state) {
  const Grid src = grid_from_resolution(5.625);
  const Grid dst = grid_from_resolution(2.8125);
  GridField f;
  f.grid = src;
  f.v.resize(src.h() * src.w());
  Rng rng(4);
  for (auto& x : f.v) x = static_cast<float>(rng.normal());
  for (auto _ : state) benchmark::DoNotOptimize(regrid_bilinear(f, dst).v.size());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * dst.h() * dst.w());
}
BENCHMARK(BM_regrid_bilinear_up2x);

void BM_localized_rolling_mean(benchmark::State& state) {
  const FieldSeries& s = series_5p625();
  for (auto _ : state) benchmark::DoNotOptimize(localized_rolling_mean(s).data.size());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * s.data.size());
}
BENCHMARK(BM_localized_rolling_mean);

void BM_forecasting_samples(benchmark::State& state) {
  const FieldSeries& s = series_5p625();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        forecasting_samples(s, {0, -6, -12}, LeadTime{24}, {"t2m"}, {"t2m"}).n);
}
BENCHMARK(BM_forecasting_samples);

void BM_linreg_fit_stencil3(benchmark::State& state) {
  SyntheticConfig cfg;
  cfg.n_steps = 128;
  cfg.resolution_deg = 22.5;  // 8 x 16
  cfg.seed = 5;
  const FieldSeries s = gen_synthetic(cfg);
  const SampleSet samples = forecasting_samples(s, {0}, LeadTime{6}, {"t2m"}, {"t2m"});
  const LatWeights w = make_lat_weights(s.grid);
  LinregConfig lcfg;
  lcfg.ridge_lambda = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(linreg_fit(samples, w, lcfg).coef.size());
}
BENCHMARK(BM_linreg_fit_stencil3);

}  // namespace
