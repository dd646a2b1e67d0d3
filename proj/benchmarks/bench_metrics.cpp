#include <benchmark/benchmark.h>

#include <vector>

#include "clbench/grid.hpp"
#include "clbench/metrics.hpp"
#include "clbench/rng.hpp"

using namespace clbench;

namespace {

struct Fixture {
  std::size_t n, h, w;
  std::vector<float> pred, truth;
  LatWeights weights;

  Fixture(std::size_t n_, double resolution) : n(n_) {
    const Grid g = grid_from_resolution(resolution);
    h = g.h();
    w = g.w();
    weights = make_lat_weights(g);
    pred.resize(n * h * w);
    truth.resize(n * h * w);
    Rng rng(1);
    for (auto& x : pred) x = static_cast<float>(rng.normal());
    for (auto& x : truth) x = static_cast<float>(rng.normal());
  }
  CubeView pred_view() const { return CubeView(pred.data(), n, h, w); }
  CubeView truth_view() const { return CubeView(truth.data(), n, h, w); }
};

const Fixture& fixture_5p625() {
  static const Fixture f(64, 5.625);  // 64 x 32 x 64
  return f;
}

const Fixture& fixture_2p8125() {
  static const Fixture f(64, 2.8125);  // 64 x 64 x 128
  return f;
}

void BM_lat_rmse_5p625(benchmark::State& state) {
  const auto& f = fixture_5p625();
  for (auto _ : state)
    benchmark::DoNotOptimize(lat_rmse(f.pred_view(), f.truth_view(), f.weights).value);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * f.n * f.h * f.w);
}
BENCHMARK(BM_lat_rmse_5p625);

void BM_lat_rmse_2p8125(benchmark::State& state) {
  const auto& f = fixture_2p8125();
  for (auto _ : state)
    benchmark::DoNotOptimize(lat_rmse(f.pred_view(), f.truth_view(), f.weights).value);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * f.n * f.h * f.w);
}
BENCHMARK(BM_lat_rmse_2p8125);

void BM_acc(benchmark::State& state) {
  const auto& f = fixture_5p625();
  const ClimatologyMap clim = temporal_mean(f.truth_view(), "test-split");
  for (auto _ : state)
    benchmark::DoNotOptimize(acc(f.pred_view(), f.truth_view(), clim, f.weights).value);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * f.n * f.h * f.w);
}
BENCHMARK(BM_acc);

void BM_pearson(benchmark::State& state) {
  const auto& f = fixture_5p625();
  for (auto _ : state)
    benchmark::DoNotOptimize(pearson(f.pred_view(), f.truth_view()).value);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * f.n * f.h * f.w);
}
BENCHMARK(BM_pearson);

void BM_crps_gaussian(benchmark::State& state) {
  const auto& f = fixture_5p625();
  GaussianForecast fc;
  fc.n = f.n;
  fc.h = f.h;
  fc.w = f.w;
  fc.mu = f.pred;
  fc.sigma.assign(f.pred.size(), 1.0f);
  for (auto _ : state) benchmark::DoNotOptimize(crps_gaussian(fc, f.truth_view()).value);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * f.n * f.h * f.w);
}
BENCHMARK(BM_crps_gaussian);

void BM_rank_histogram_m10(benchmark::State& state) {
  const std::size_t m = 10, n = 8;
  const Grid g = grid_from_resolution(5.625);
  EnsembleForecast ens;
  ens.m = m;
  ens.n = n;
  ens.h = g.h();
  ens.w = g.w();
  ens.v.resize(m * n * ens.h * ens.w);
  Rng rng(2);
  for (auto& x : ens.v) x = static_cast<float>(rng.normal());
  std::vector<float> truth(n * ens.h * ens.w);
  for (auto& x : truth) x = static_cast<float>(rng.normal());
  const CubeView tv(truth.data(), n, ens.h, ens.w);
  for (auto _ : state) benchmark::DoNotOptimize(rank_histogram(ens, tv, {}, 3));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n * ens.h * ens.w);
}
BENCHMARK(BM_rank_histogram_m10);

}  // namespace
