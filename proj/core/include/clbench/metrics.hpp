#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clbench/grid.hpp"
#include "clbench/tensor.hpp"

namespace clbench {

/// A metric result that is either a finite value or explicitly undefined
/// (all pixels masked, zero variance, zero denominator). Undefined results
/// are reported as flags, never as silent NaN.
struct MetricValue {
  double value = 0.0;
  bool defined = false;

  static MetricValue of(double v) { return {v, true}; }
  static MetricValue undefined() { return {0.0, false}; }
};

/// Per-pixel temporal mean of a field, used as the anomaly reference in ACC
/// and as the climatology baseline forecast.
struct ClimatologyMap {
  std::size_t h = 0, w = 0;
  std::vector<float> v;          // one variable per map
  std::string provenance;        // "train-split" or "test-split"

  float at(std::size_t i, std::size_t j) const { return v[i * w + j]; }
};

/// Per-pixel Gaussian forecast (mu, sigma), sigma > 0 wherever unmasked.
struct GaussianForecast {
  std::size_t n = 0, h = 0, w = 0;
  std::vector<float> mu;
  std::vector<float> sigma;
};

/// M member fields per timestamp, stored member-major: member m of timestep k
/// lives at slab (m * n + k).
struct EnsembleForecast {
  std::size_t m = 0, n = 0, h = 0, w = 0;
  std::vector<float> v;

  CubeView member(std::size_t mi) const {
    return CubeView(v.data() + mi * n * h * w, n, h, w);
  }
  float at(std::size_t mi, std::size_t k, std::size_t i, std::size_t j) const {
    return v[((mi * n + k) * h + i) * w + j];
  }
};

enum class VarianceDivisor { population, sample };  // divide by M, or by M-1

// --- Deterministic metrics ---------------------------------------------------

/// Latitude-weighted RMSE: per timestep, the square root of the weighted
/// spatial mean of squared error, averaged over timesteps. Masked pixels are
/// excluded and the weights renormalized over the unmasked set per timestep;
/// timesteps with an empty unmasked set are skipped, and the result is
/// undefined when every timestep is empty.
MetricValue lat_rmse(CubeView pred, CubeView truth, const LatWeights& weights,
                     MaskView mask = {});

/// Anomaly correlation coefficient over all (k,i,j) jointly, anomalies taken
/// against the supplied climatology map.
MetricValue acc(CubeView pred, CubeView truth, const ClimatologyMap& clim,
                const LatWeights& weights, MaskView mask = {});

/// mean(pred) - mean(truth) over the unmasked set, unweighted.
MetricValue mean_bias(CubeView pred, CubeView truth, MaskView mask = {});

/// Per-pixel time mean of (pred - truth); pixels with no unmasked timestep
/// come back NaN.
std::vector<float> per_pixel_mean_bias(CubeView preds, CubeView truths, MaskView mask = {});

/// Pearson correlation of the flattened unmasked values, unweighted.
MetricValue pearson(CubeView pred, CubeView truth, MaskView mask = {});

ClimatologyMap temporal_mean(CubeView series, const std::string& provenance);

// --- Probabilistic metrics ---------------------------------------------------

MetricValue spread(const EnsembleForecast& ens, const LatWeights& weights,
                   VarianceDivisor divisor = VarianceDivisor::population, MaskView mask = {});

/// spread / lat_rmse(ensemble mean, truth).
MetricValue spread_skill_ratio(const EnsembleForecast& ens, CubeView truth,
                               const LatWeights& weights,
                               VarianceDivisor divisor = VarianceDivisor::population,
                               MaskView mask = {});

std::vector<float> ensemble_mean(const EnsembleForecast& ens);

/// Closed-form CRPS of a Gaussian forecast at one point.
double crps_gaussian_point(double mu, double sigma, double x);

/// Mean CRPS over the unmasked pixels; latitude weighting is available
/// behind the flag for consistency with RMSE (default off: the per-point
/// definition is aggregated by a plain mean).
MetricValue crps_gaussian(const GaussianForecast& fc, CubeView truth, MaskView mask = {},
                          bool lat_weighted = false, const LatWeights* weights = nullptr);

/// Rank of the truth among the M member values per unmasked (k,i,j), ties
/// randomized uniformly under the seed; returns counts over M+1 bins.
std::vector<std::uint64_t> rank_histogram(const EnsembleForecast& ens, CubeView truth,
                                          MaskView mask = {}, std::uint64_t rng_seed = 0);

// --- Projection metrics ------------------------------------------------------

/// Latitude-weighted global mean <A> over one H x W field.
double global_mean(const float* field, std::size_t h, std::size_t w, const LatWeights& weights);

/// Spatial discrepancy between temporal means, normalized by the time mean
/// of the truth's global mean.
MetricValue nrmse_s(CubeView pred, CubeView truth, const LatWeights& weights);

/// RMS discrepancy between per-timestep global means, same normalization.
MetricValue nrmse_g(CubeView pred, CubeView truth, const LatWeights& weights);

/// nrmse_s + alpha * nrmse_g.
MetricValue nrmse_total(CubeView pred, CubeView truth, const LatWeights& weights,
                        double alpha = 5.0);

// --- Masking -----------------------------------------------------------------

struct NanMasked {
  std::vector<float> truth;
  std::vector<float> pred;
  std::vector<std::uint8_t> mask;  // 0 where truth was NaN, 1 elsewhere
};

/// Zeroes NaNs in the truth, multiplies the prediction by the binary
/// validity mask, and returns the mask for metric exclusion.
NanMasked apply_nan_mask(CubeView truth, CubeView pred);

// --- Report ------------------------------------------------------------------

struct ReportRow {
  std::string metric;
  std::string variable;
  int lead_hours = 0;
  std::string split;
  std::string mask_id;
  double value = 0.0;
  bool defined = false;
  std::string protocol;      // optional: direct / continuous / iterative
  bool extrapolated = false; // continuous evaluation outside the training range
  std::string climatology;   // anomaly reference used by acc rows
};

struct ReportMap {
  std::string name;
  std::string variable;
  std::size_t h = 0, w = 0;
  std::vector<float> v;
  Grid grid;
};

struct ReportHistogram {
  std::string name;
  std::string variable;
  std::vector<std::uint64_t> counts;
};

struct MetricReport {
  std::vector<ReportRow> rows;
  std::vector<ReportMap> maps;
  std::vector<ReportHistogram> histograms;
};

/// JSON document with rows/maps/histograms; parseable back via report_from_json.
std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& text);

/// Flat CSV, one row per scalar, columns:
/// metric,variable,lead_hours,split,mask_id,value,defined
std::string report_to_csv(const MetricReport& report);

}  // namespace clbench
