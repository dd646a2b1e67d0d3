#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clbench/extreme.hpp"
#include "clbench/metrics.hpp"
#include "clbench/sampler.hpp"
#include "clbench/store.hpp"

namespace clbench {

/// Predictions aligned to a SampleSet: same N, C_out, H', W' and per-sample
/// leads. Alignment is always verified, never assumed.
struct PredictionSet {
  std::size_t n = 0, c = 0, h = 0, w = 0;
  std::vector<float> preds;
  std::vector<int> lead_hours;
  std::vector<std::int64_t> init_times;
  std::vector<std::string> channels;
  std::string source;   // baseline name or external file path
  std::string task;     // forecasting / downscaling / projection
  std::string protocol; // direct / continuous / iterative

  const float* sample(std::size_t k) const { return preds.data() + k * c * h * w; }
  CubeView channel(std::size_t ci) const {
    return CubeView(preds.data() + ci * h * w, n, h, w, c * h * w);
  }
};

PredictionSet predictions_from_raw(std::vector<float> raw, const SampleSet& aligned_to,
                                   const std::string& source);

/// Throws misaligned-predictions when count, shape, channel names, or lead
/// metadata disagree.
void verify_alignment(const PredictionSet& preds, const SampleSet& truth);

/// Builds the truth targets aligned to a prediction set by looking up each
/// sample's valid time (init time + lead) in the series. Errors when a valid
/// time is missing from the series or a channel is absent.
SampleSet build_truth_samples(const PredictionSet& preds, const FieldSeries& truth_series);

enum class MaskSource { none, nan_derived, extreme_masks };

struct EvalConfig {
  std::vector<std::string> metrics = {"rmse", "acc", "bias", "pearson"};
  /// Climatology for ACC anomalies, one map per variable. Empty means the
  /// default: the test-split temporal mean of the truth. The source tag is
  /// recorded on every acc row.
  std::vector<std::pair<std::string, ClimatologyMap>> climatology;
  std::string climatology_source = "test";
  MaskSource mask_source = MaskSource::none;
  const ExtremeMaskSeries* extreme_masks = nullptr;
  std::string mask_id = "none";
  std::string split = "test";
  /// Lead times to evaluate; empty = every lead present in the predictions.
  std::vector<int> leads;
  /// Divisor for ensemble variance in the probabilistic metrics. The spread
  /// metric itself defaults to the population divisor M; harness evaluation
  /// defaults to the unbiased M-1 so a calibrated ensemble scores a
  /// spread-skill ratio near 1 at small M.
  VarianceDivisor ensemble_divisor = VarianceDivisor::sample;
  bool crps_lat_weighted = false;
  std::uint64_t rng_seed = 0;
  /// Continuous protocol: leads outside this training range are tagged
  /// extrapolated in the report.
  std::optional<std::pair<int, int>> train_lead_range;
  bool emit_mean_bias_maps = true;
};

/// One report row per (variable, lead, metric); pure function of its inputs.
MetricReport evaluate_direct(const PredictionSet& preds, const SampleSet& truth,
                             const LatWeights& weights, const EvalConfig& cfg);

/// Continuous protocol: one aligned (prediction, truth) pair per lead, all
/// produced by a single lead-conditioned model.
MetricReport evaluate_continuous(const std::vector<PredictionSet>& preds_per_lead,
                                 const std::vector<SampleSet>& truth_per_lead,
                                 const LatWeights& weights, const EvalConfig& cfg);

/// Probabilistic evaluation: spread, spread-skill ratio, CRPS (closed form
/// for Gaussian forecasts; per-pixel moment fit for ensembles, reported as
/// crps_gaussian_fit to flag the approximation), and rank-histogram counts.
MetricReport evaluate_probabilistic(const EnsembleForecast& ens, const SampleSet& truth,
                                    const LatWeights& weights, const EvalConfig& cfg);
MetricReport evaluate_probabilistic(const GaussianForecast& fc, const SampleSet& truth,
                                    const LatWeights& weights, const EvalConfig& cfg);

// --- Iterative rollout -------------------------------------------------------

/// A single-step forecast model: maps one input sample (c_in x h x w, laid
/// out per the sampler's channel order) to its output variables at t + base
/// step.
class StepModel {
 public:
  virtual ~StepModel() = default;
  virtual std::vector<std::string> output_vars() const = 0;
  virtual void predict(const float* input, float* output) const = 0;
};

struct RolloutSpec {
  std::vector<std::string> vars;         // non-static input variables, declared order
  std::vector<int> offsets_hours;        // 0, -s, -2s, ... consecutive step multiples
  std::vector<std::string> static_vars;
  int base_step_hours = 6;
  /// Channels re-read from stored truth at each step instead of predicted
  /// (time-dependent forcings); requires `truth`.
  std::vector<std::string> forced_vars;
  const FieldSeries* truth = nullptr;
};

/// Feeds model outputs back as inputs n_steps times; step k of the result
/// holds predictions at lead (k+1) * base step. Static channels are
/// re-attached from the initial sample at every step.
std::vector<PredictionSet> rollout(const StepModel& model, const SampleSet& init,
                                   const RolloutSpec& spec, std::size_t n_steps);

// --- Prediction container and report emission --------------------------------

/// Predictions serialize to CLBT with extra header keys
/// {task, protocol, lead_hours, model_tag}; timestamps are the forecast
/// init times.
void write_predictions(const PredictionSet& preds, const Grid& grid, const std::string& path);
PredictionSet read_predictions(const std::string& path);

/// Ensemble container: CLBT whose T axis holds M member blocks of N samples
/// (member-major), marked by the extra keys {ensemble_members, sample_count,
/// lead_hours, init_times}.
void write_ensemble(const EnsembleForecast& ens, const Grid& grid,
                    const std::string& variable, const std::vector<int>& lead_hours,
                    const std::vector<std::int64_t>& init_times, const std::string& path);
struct EnsemblePredictions {
  EnsembleForecast forecast;
  std::string variable;
  std::vector<int> lead_hours;
  std::vector<std::int64_t> init_times;
};
EnsemblePredictions read_ensemble(const std::string& path);

enum class ReportFormat { json, csv, maps };

/// json: <prefix>.json; csv: <prefix>.csv; maps: one CLBT container and one
/// binary PGM preview (plus a min/max sidecar JSON) per map and histogram.
/// Returns the written paths.
std::vector<std::string> emit_report(const MetricReport& report, ReportFormat format,
                                     const std::string& prefix);

/// Binary (P5) graymap, min-max scaled to 0..255; the scale sidecar records
/// the mapping. NaNs render as 0.
void write_pgm(const std::string& path, const float* v, std::size_t h, std::size_t w);

}  // namespace clbench
