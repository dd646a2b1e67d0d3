#include "clbench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include "clbench/error.hpp"

#include "json.hpp"

namespace clbench {

PredictionSet predictions_from_raw(std::vector<float> raw, const SampleSet& aligned_to,
                                   const std::string& source) {
  PredictionSet out;
  out.n = aligned_to.n;
  out.c = aligned_to.c_out;
  out.h = aligned_to.h_out;
  out.w = aligned_to.w_out;
  require(raw.size() == out.n * out.c * out.h * out.w, errc::dimension_mismatch,
          "raw prediction size does not match the sample set");
  out.preds = std::move(raw);
  out.lead_hours = aligned_to.lead_hours;
  out.init_times = aligned_to.init_times;
  out.channels = aligned_to.target_channels;
  out.source = source;
  out.task = "forecasting";
  out.protocol = "direct";
  return out;
}

SampleSet build_truth_samples(const PredictionSet& preds, const FieldSeries& truth_series) {
  SampleSet out;
  out.n = preds.n;
  out.c_out = preds.c;
  out.h_out = truth_series.data.h;
  out.w_out = truth_series.data.w;
  require(out.h_out == preds.h && out.w_out == preds.w, errc::misaligned_predictions,
          "truth series grid differs from predictions");
  out.c_in = 0;
  out.h_in = out.h_out;
  out.w_in = out.w_out;
  out.target_channels = preds.channels;
  out.lead_hours = preds.lead_hours;
  out.init_times = preds.init_times;

  std::vector<std::size_t> var_idx;
  for (const auto& name : preds.channels) var_idx.push_back(truth_series.var_index(name));

  const std::size_t plane = out.h_out * out.w_out;
  out.targets.resize(out.n * out.c_out * plane);
  for (std::size_t k = 0; k < preds.n; ++k) {
    const std::int64_t valid =
        preds.init_times[k] + static_cast<std::int64_t>(preds.lead_hours[k]) * 3600;
    const std::int64_t rel = valid - truth_series.time_start_unix;
    require(rel >= 0 && rel % truth_series.time_step_seconds == 0 &&
                rel / truth_series.time_step_seconds <
                    static_cast<std::int64_t>(truth_series.n_times()),
            errc::misaligned_predictions,
            "prediction valid time " + std::to_string(valid) + " not in the truth series");
    const std::size_t tk = static_cast<std::size_t>(rel / truth_series.time_step_seconds);
    for (std::size_t c = 0; c < var_idx.size(); ++c)
      std::memcpy(out.targets.data() + (k * out.c_out + c) * plane,
                  truth_series.data.v.data() + (tk * truth_series.data.c + var_idx[c]) * plane,
                  plane * sizeof(float));
  }
  return out;
}

void verify_alignment(const PredictionSet& preds, const SampleSet& truth) {
  require(preds.n == truth.n, errc::misaligned_predictions,
          "sample count mismatch: " + std::to_string(preds.n) + " predictions vs " +
              std::to_string(truth.n) + " targets");
  require(preds.c == truth.c_out && preds.h == truth.h_out && preds.w == truth.w_out,
          errc::misaligned_predictions, "prediction shape differs from targets");
  require(preds.channels == truth.target_channels, errc::misaligned_predictions,
          "prediction channels differ from target channels");
  require(preds.lead_hours == truth.lead_hours, errc::misaligned_predictions,
          "per-sample lead metadata differs");
}

namespace {

struct LeadGroup {
  int lead = 0;
  std::vector<std::size_t> samples;
};

std::vector<LeadGroup> group_by_lead(const std::vector<int>& leads) {
  std::map<int, std::vector<std::size_t>> buckets;
  for (std::size_t k = 0; k < leads.size(); ++k) buckets[leads[k]].push_back(k);
  std::vector<LeadGroup> out;
  for (auto& [lead, idx] : buckets) out.push_back({lead, std::move(idx)});
  return out;
}

// Gathers one variable of the group's samples into contiguous n x h x w
// buffers (plus the aligned mask when present).
struct GatheredCell {
  std::vector<float> pred;
  std::vector<float> truth;
  std::vector<std::uint8_t> mask;
  bool has_mask = false;
  std::size_t n = 0, h = 0, w = 0;

  CubeView pred_view() const { return CubeView(pred.data(), n, h, w); }
  CubeView truth_view() const { return CubeView(truth.data(), n, h, w); }
  MaskView mask_view() const {
    return has_mask ? MaskView(mask.data(), n, h, w) : MaskView();
  }
};

GatheredCell gather_cell(const PredictionSet& preds, const SampleSet& truth, std::size_t ci,
                         const LeadGroup& group, const EvalConfig& cfg) {
  GatheredCell cell;
  cell.n = group.samples.size();
  cell.h = preds.h;
  cell.w = preds.w;
  const std::size_t plane = cell.h * cell.w;
  cell.pred.resize(cell.n * plane);
  cell.truth.resize(cell.n * plane);
  for (std::size_t s = 0; s < group.samples.size(); ++s) {
    const std::size_t k = group.samples[s];
    std::memcpy(cell.pred.data() + s * plane, preds.sample(k) + ci * plane,
                plane * sizeof(float));
    std::memcpy(cell.truth.data() + s * plane, truth.target(k) + ci * plane,
                plane * sizeof(float));
  }

  if (cfg.mask_source == MaskSource::nan_derived) {
    const NanMasked masked =
        apply_nan_mask(CubeView(cell.truth.data(), cell.n, cell.h, cell.w),
                       CubeView(cell.pred.data(), cell.n, cell.h, cell.w));
    cell.truth = masked.truth;
    cell.pred = masked.pred;
    cell.mask = masked.mask;
    cell.has_mask = true;
  } else if (cfg.mask_source == MaskSource::extreme_masks) {
    require(cfg.extreme_masks != nullptr, errc::bad_config, "extreme mask source missing");
    const ExtremeMaskSeries& masks = *cfg.extreme_masks;
    require(masks.h == cell.h && masks.w == cell.w, errc::dimension_mismatch,
            "extreme mask grid differs from predictions");
    cell.mask.resize(cell.n * plane);
    for (std::size_t s = 0; s < group.samples.size(); ++s) {
      const std::size_t k = group.samples[s];
      const std::int64_t valid = truth.valid_time(k);
      require(masks.time_step_seconds > 0, errc::bad_config, "mask series step invalid");
      const std::int64_t rel = valid - masks.time_start_unix;
      require(rel >= 0 && rel % masks.time_step_seconds == 0 &&
                  rel / masks.time_step_seconds < static_cast<std::int64_t>(masks.n),
              errc::misaligned_predictions,
              "prediction valid time has no aligned extreme mask");
      const std::size_t mk = static_cast<std::size_t>(rel / masks.time_step_seconds);
      std::memcpy(cell.mask.data() + s * plane, masks.masks.data() + mk * plane, plane);
    }
    cell.has_mask = true;
  }
  return cell;
}

MetricValue eval_metric(const std::string& name, const GatheredCell& cell,
                        const LatWeights& weights, const ClimatologyMap& clim) {
  if (name == "rmse") return lat_rmse(cell.pred_view(), cell.truth_view(), weights, cell.mask_view());
  if (name == "acc") return acc(cell.pred_view(), cell.truth_view(), clim, weights, cell.mask_view());
  if (name == "bias") return mean_bias(cell.pred_view(), cell.truth_view(), cell.mask_view());
  if (name == "pearson") return pearson(cell.pred_view(), cell.truth_view(), cell.mask_view());
  if (name == "nrmse_s") return nrmse_s(cell.pred_view(), cell.truth_view(), weights);
  if (name == "nrmse_g") return nrmse_g(cell.pred_view(), cell.truth_view(), weights);
  if (name == "nrmse_total") return nrmse_total(cell.pred_view(), cell.truth_view(), weights);
  fail(errc::bad_config, "unknown metric '" + name + "'");
}

}  // namespace

MetricReport evaluate_direct(const PredictionSet& preds, const SampleSet& truth,
                             const LatWeights& weights, const EvalConfig& cfg) {
  verify_alignment(preds, truth);
  require(!cfg.metrics.empty(), errc::bad_config, "metric list is empty");

  MetricReport report;
  auto groups = group_by_lead(preds.lead_hours);
  if (!cfg.leads.empty()) {
    std::erase_if(groups, [&](const LeadGroup& g) {
      return std::find(cfg.leads.begin(), cfg.leads.end(), g.lead) == cfg.leads.end();
    });
    require(!groups.empty(), errc::bad_config,
            "no prediction samples at the requested lead times");
  }
  const std::string protocol = preds.protocol.empty() ? "direct" : preds.protocol;

  for (std::size_t ci = 0; ci < preds.channels.size(); ++ci) {
    const std::string& var = preds.channels[ci];
    for (const auto& group : groups) {
      const GatheredCell cell = gather_cell(preds, truth, ci, group, cfg);

      ClimatologyMap clim;
      if (!cfg.climatology.empty()) {
        bool found = false;
        for (const auto& [name, map] : cfg.climatology)
          if (name == var) {
            clim = map;
            found = true;
            break;
          }
        require(found, errc::bad_config, "no climatology map supplied for '" + var + "'");
      } else {
        // Default anomaly reference: temporal mean of the test-split truth.
        clim = temporal_mean(cell.truth_view(), "test-split");
      }

      for (const auto& metric : cfg.metrics) {
        const MetricValue v = eval_metric(metric, cell, weights, clim);
        ReportRow row;
        row.metric = metric;
        row.variable = var;
        row.lead_hours = group.lead;
        row.split = cfg.split;
        row.mask_id = cfg.mask_id;
        row.value = v.value;
        row.defined = v.defined;
        row.protocol = protocol;
        if (metric == "acc") row.climatology = cfg.climatology_source;
        if (cfg.train_lead_range)
          row.extrapolated = group.lead < cfg.train_lead_range->first ||
                             group.lead > cfg.train_lead_range->second;
        report.rows.push_back(std::move(row));
      }

      if (cfg.emit_mean_bias_maps) {
        ReportMap map;
        map.name = "mean_bias_lead" + std::to_string(group.lead) + "h";
        map.variable = var;
        map.h = cell.h;
        map.w = cell.w;
        map.v = per_pixel_mean_bias(cell.pred_view(), cell.truth_view(), cell.mask_view());
        report.maps.push_back(std::move(map));
      }
    }
  }
  return report;
}

MetricReport evaluate_continuous(const std::vector<PredictionSet>& preds_per_lead,
                                 const std::vector<SampleSet>& truth_per_lead,
                                 const LatWeights& weights, const EvalConfig& cfg) {
  require(preds_per_lead.size() == truth_per_lead.size() && !preds_per_lead.empty(),
          errc::bad_config, "one aligned truth set per prediction set required");
  MetricReport merged;
  for (std::size_t i = 0; i < preds_per_lead.size(); ++i) {
    PredictionSet tagged = preds_per_lead[i];
    tagged.protocol = "continuous";
    MetricReport part = evaluate_direct(tagged, truth_per_lead[i], weights, cfg);
    for (auto& row : part.rows) merged.rows.push_back(std::move(row));
    for (auto& map : part.maps) merged.maps.push_back(std::move(map));
  }
  return merged;
}

namespace {

void probabilistic_rows(MetricReport& report, const std::string& var, int lead,
                        const EvalConfig& cfg, MetricValue spread_v, MetricValue ssr_v,
                        MetricValue crps_v, const char* crps_name) {
  auto push = [&](const std::string& metric, MetricValue v) {
    ReportRow row;
    row.metric = metric;
    row.variable = var;
    row.lead_hours = lead;
    row.split = cfg.split;
    row.mask_id = cfg.mask_id;
    row.value = v.value;
    row.defined = v.defined;
    row.protocol = "probabilistic";
    report.rows.push_back(std::move(row));
  };
  push("spread", spread_v);
  push("spread_skill", ssr_v);
  push(crps_name, crps_v);
}

}  // namespace

MetricReport evaluate_probabilistic(const EnsembleForecast& ens, const SampleSet& truth,
                                    const LatWeights& weights, const EvalConfig& cfg) {
  require(truth.c_out == 1, errc::bad_config,
          "probabilistic evaluation expects a single-variable sample set");
  require(ens.n == truth.n && ens.h == truth.h_out && ens.w == truth.w_out,
          errc::misaligned_predictions, "ensemble shape differs from targets");
  require(ens.m >= 2, errc::insufficient_samples,
          "Gaussian CRPS cannot be fit on fewer than 2 members");
  const CubeView truth_view = truth.target_channel(0);
  const std::string var = truth.target_channels[0];
  const int lead = truth.n > 0 ? truth.lead_hours[0] : 0;

  MetricReport report;
  const MetricValue spread_v = spread(ens, weights, cfg.ensemble_divisor);
  const MetricValue ssr_v = spread_skill_ratio(ens, truth_view, weights, cfg.ensemble_divisor);

  // Ensembles score CRPS through a per-pixel Gaussian moment fit; the metric
  // name flags the approximation.
  GaussianForecast fit;
  fit.n = ens.n;
  fit.h = ens.h;
  fit.w = ens.w;
  const std::size_t slab = ens.n * ens.h * ens.w;
  fit.mu.resize(slab);
  fit.sigma.resize(slab);
  const double div = cfg.ensemble_divisor == VarianceDivisor::population
                         ? static_cast<double>(ens.m)
                         : static_cast<double>(ens.m - 1);
  for (std::size_t x = 0; x < slab; ++x) {
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t mi = 0; mi < ens.m; ++mi) {
      const double v = ens.v[mi * slab + x];
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / static_cast<double>(ens.m);
    double var_est = (sumsq - sum * mean) / div;
    if (var_est < 1e-24) var_est = 1e-24;  // degenerate members: near-deterministic limit
    fit.mu[x] = static_cast<float>(mean);
    fit.sigma[x] = static_cast<float>(std::sqrt(var_est));
  }
  const MetricValue crps_v =
      crps_gaussian(fit, truth_view, {}, cfg.crps_lat_weighted,
                    cfg.crps_lat_weighted ? &weights : nullptr);
  probabilistic_rows(report, var, lead, cfg, spread_v, ssr_v, crps_v, "crps_gaussian_fit");

  ReportHistogram hist;
  hist.name = "rank_histogram";
  hist.variable = var;
  hist.counts = rank_histogram(ens, truth_view, {}, cfg.rng_seed);
  report.histograms.push_back(std::move(hist));
  return report;
}

MetricReport evaluate_probabilistic(const GaussianForecast& fc, const SampleSet& truth,
                                    const LatWeights& weights, const EvalConfig& cfg) {
  require(truth.c_out == 1, errc::bad_config,
          "probabilistic evaluation expects a single-variable sample set");
  require(fc.n == truth.n && fc.h == truth.h_out && fc.w == truth.w_out,
          errc::misaligned_predictions, "forecast shape differs from targets");
  const CubeView truth_view = truth.target_channel(0);
  const std::string var = truth.target_channels[0];
  const int lead = truth.n > 0 ? truth.lead_hours[0] : 0;

  MetricReport report;
  const MetricValue crps_v = crps_gaussian(fc, truth_view, {}, cfg.crps_lat_weighted,
                                           cfg.crps_lat_weighted ? &weights : nullptr);
  // Parametric spread: latitude-weighted spatial mean of sigma^2 per step.
  double total = 0.0;
  const std::size_t plane = fc.h * fc.w;
  double wsum = 0.0;
  for (std::size_t i = 0; i < fc.h; ++i) wsum += weights.w[i] * static_cast<double>(fc.w);
  for (std::size_t k = 0; k < fc.n; ++k) {
    double num = 0.0;
    for (std::size_t i = 0; i < fc.h; ++i)
      for (std::size_t j = 0; j < fc.w; ++j) {
        const double s = fc.sigma[k * plane + i * fc.w + j];
        num += weights.w[i] * s * s;
      }
    total += std::sqrt(num / wsum);
  }
  const MetricValue spread_v = MetricValue::of(total / static_cast<double>(fc.n));

  const MetricValue skill = lat_rmse(CubeView(fc.mu.data(), fc.n, fc.h, fc.w), truth_view, weights);
  const MetricValue ssr_v = (skill.defined && skill.value > 0.0)
                                ? MetricValue::of(spread_v.value / skill.value)
                                : MetricValue::undefined();
  probabilistic_rows(report, var, lead, cfg, spread_v, ssr_v, crps_v, "crps_gaussian");
  return report;
}

// --- Rollout -----------------------------------------------------------------

std::vector<PredictionSet> rollout(const StepModel& model, const SampleSet& init,
                                   const RolloutSpec& spec, std::size_t n_steps) {
  require(n_steps >= 1, errc::bad_config, "rollout needs at least one step");
  require(!spec.vars.empty(), errc::bad_config, "rollout variable list is empty");
  require(spec.base_step_hours > 0, errc::bad_config, "base step must be positive");
  for (std::size_t i = 0; i < spec.offsets_hours.size(); ++i)
    require(spec.offsets_hours[i] == -static_cast<int>(i) * spec.base_step_hours,
            errc::bad_config, "offsets must be consecutive multiples of the base step");

  // The model must produce exactly the non-static inputs it does not get
  // from stored truth.
  std::set<std::string> required(spec.vars.begin(), spec.vars.end());
  for (const auto& fv : spec.forced_vars) {
    require(required.count(fv) == 1, errc::bad_config,
            "forced variable '" + fv + "' is not an input variable");
    required.erase(fv);
    require(spec.truth != nullptr, errc::bad_config,
            "forced variables need a truth series to read from");
  }
  const std::vector<std::string> out_vars = model.output_vars();
  const std::set<std::string> produced(out_vars.begin(), out_vars.end());
  require(produced == required, errc::rollout_incompatible,
          "model output variable set differs from the required input set");

  // Expected input channel layout, per the sampler's convention.
  std::vector<std::string> expected;
  for (int off : spec.offsets_hours)
    for (const auto& v : spec.vars) expected.push_back(offset_channel_name(v, off));
  for (const auto& v : spec.static_vars) expected.push_back(v);
  require(init.input_channels == expected, errc::rollout_incompatible,
          "initial sample channel layout differs from the rollout spec");

  const std::size_t plane = init.h_in * init.w_in;
  const std::size_t n_vars = spec.vars.size();
  const std::size_t n_off = spec.offsets_hours.size();
  const std::size_t c_out = out_vars.size();

  // Positions of each output variable inside the per-offset block.
  std::vector<std::size_t> var_slot(c_out);
  for (std::size_t v = 0; v < c_out; ++v) {
    auto it = std::find(spec.vars.begin(), spec.vars.end(), out_vars[v]);
    var_slot[v] = static_cast<std::size_t>(it - spec.vars.begin());
  }
  std::vector<std::size_t> forced_slot;
  for (const auto& fv : spec.forced_vars) {
    auto it = std::find(spec.vars.begin(), spec.vars.end(), fv);
    forced_slot.push_back(static_cast<std::size_t>(it - spec.vars.begin()));
  }
  std::vector<std::size_t> forced_truth_idx;
  if (spec.truth)
    for (const auto& fv : spec.forced_vars) forced_truth_idx.push_back(spec.truth->var_index(fv));

  std::vector<float> state = init.inputs;  // n * c_in * plane, mutated per step
  std::vector<float> outputs(init.n * c_out * plane);
  std::vector<PredictionSet> trajectory;
  trajectory.reserve(n_steps);

  for (std::size_t step = 1; step <= n_steps; ++step) {
    for (std::size_t s = 0; s < init.n; ++s)
      model.predict(state.data() + s * init.c_in * plane, outputs.data() + s * c_out * plane);

    PredictionSet preds;
    preds.n = init.n;
    preds.c = c_out;
    preds.h = init.h_in;
    preds.w = init.w_in;
    preds.preds = outputs;
    preds.lead_hours.assign(init.n, static_cast<int>(step) * spec.base_step_hours);
    preds.init_times = init.init_times;
    preds.channels = out_vars;
    preds.source = "rollout";
    preds.task = "forecasting";
    preds.protocol = "iterative";
    trajectory.push_back(std::move(preds));

    if (step == n_steps) break;

    // Shift history blocks one base step older, then write the new offset-0
    // block from model outputs (and stored truth for forced channels).
    for (std::size_t s = 0; s < init.n; ++s) {
      float* in = state.data() + s * init.c_in * plane;
      for (std::size_t o = n_off; o-- > 1;)
        std::memcpy(in + o * n_vars * plane, in + (o - 1) * n_vars * plane,
                    n_vars * plane * sizeof(float));
      for (std::size_t v = 0; v < c_out; ++v)
        std::memcpy(in + var_slot[v] * plane, outputs.data() + (s * c_out + v) * plane,
                    plane * sizeof(float));
      for (std::size_t fi = 0; fi < forced_slot.size(); ++fi) {
        const std::int64_t t_new =
            init.init_times[s] + static_cast<std::int64_t>(step) * spec.base_step_hours * 3600;
        const std::int64_t rel = t_new - spec.truth->time_start_unix;
        require(rel >= 0 && rel % spec.truth->time_step_seconds == 0 &&
                    rel / spec.truth->time_step_seconds <
                        static_cast<std::int64_t>(spec.truth->n_times()),
                errc::insufficient_history, "forced channel time outside the truth series");
        const std::size_t tk = static_cast<std::size_t>(rel / spec.truth->time_step_seconds);
        std::memcpy(in + forced_slot[fi] * plane,
                    spec.truth->data.v.data() +
                        (tk * spec.truth->data.c + forced_truth_idx[fi]) * plane,
                    plane * sizeof(float));
      }
      // Static channels stay in place at the tail of the layout.
    }
  }
  return trajectory;
}

// --- Prediction container IO -------------------------------------------------

void write_predictions(const PredictionSet& preds, const Grid& grid, const std::string& path) {
  require(preds.n >= 1, errc::empty_result, "prediction set is empty");
  require(grid.h() == preds.h && grid.w() == preds.w, errc::dimension_mismatch,
          "grid does not match prediction shape");
  FieldSeries series;
  series.grid = grid;
  for (const auto& name : preds.channels) series.vars.push_back({name, "", "surface", false});
  series.time_start_unix = preds.init_times.front();
  series.time_step_seconds =
      preds.n >= 2 ? preds.init_times[1] - preds.init_times[0] : 3600;
  series.data = Tensor4(preds.n, preds.c, preds.h, preds.w);
  std::memcpy(series.data.v.data(), preds.preds.data(), preds.preds.size() * sizeof(float));
  series.extra["task"] = preds.task;
  series.extra["protocol"] = preds.protocol;
  series.extra["lead_hours"] = preds.lead_hours;
  series.extra["model_tag"] = preds.source;
  write_container(series, path);
}

PredictionSet read_predictions(const std::string& path) {
  const FieldSeries series = read_container(path);
  PredictionSet out;
  out.n = series.data.t;
  out.c = series.data.c;
  out.h = series.data.h;
  out.w = series.data.w;
  out.preds = series.data.v;
  for (const auto& v : series.vars) out.channels.push_back(v.name);
  out.init_times.resize(out.n);
  for (std::size_t k = 0; k < out.n; ++k) out.init_times[k] = series.time(k);
  try {
    out.task = series.extra.value("task", "forecasting");
    out.protocol = series.extra.value("protocol", "direct");
    out.source = series.extra.value("model_tag", path);
    if (series.extra.contains("lead_hours")) {
      if (series.extra["lead_hours"].is_array())
        out.lead_hours = series.extra["lead_hours"].get<std::vector<int>>();
      else
        out.lead_hours.assign(out.n, series.extra["lead_hours"].get<int>());
    } else {
      out.lead_hours.assign(out.n, 0);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_config, std::string("malformed prediction header: ") + e.what());
  }
  require(out.lead_hours.size() == out.n, errc::misaligned_predictions,
          "lead_hours length differs from sample count");
  return out;
}

void write_ensemble(const EnsembleForecast& ens, const Grid& grid,
                    const std::string& variable, const std::vector<int>& lead_hours,
                    const std::vector<std::int64_t>& init_times, const std::string& path) {
  require(ens.n >= 1 && ens.m >= 1, errc::empty_result, "ensemble is empty");
  require(grid.h() == ens.h && grid.w() == ens.w, errc::dimension_mismatch,
          "grid does not match ensemble shape");
  require(lead_hours.size() == ens.n && init_times.size() == ens.n,
          errc::misaligned_predictions, "per-sample metadata length mismatch");
  FieldSeries series;
  series.grid = grid;
  series.vars = {{variable, "", "surface", false}};
  series.time_start_unix = init_times.front();
  series.time_step_seconds = ens.n >= 2 ? std::max<std::int64_t>(1, init_times[1] - init_times[0])
                                        : 3600;
  series.data = Tensor4(ens.m * ens.n, 1, ens.h, ens.w);
  std::memcpy(series.data.v.data(), ens.v.data(), ens.v.size() * sizeof(float));
  series.extra["task"] = "forecasting";
  series.extra["protocol"] = "probabilistic";
  series.extra["ensemble_members"] = ens.m;
  series.extra["sample_count"] = ens.n;
  series.extra["lead_hours"] = lead_hours;
  series.extra["init_times"] = init_times;
  write_container(series, path);
}

EnsemblePredictions read_ensemble(const std::string& path) {
  const FieldSeries series = read_container(path);
  require(series.data.c == 1, errc::dimension_mismatch, "ensemble container must be single-variable");
  EnsemblePredictions out;
  try {
    require(series.extra.contains("ensemble_members"), errc::bad_config,
            "'" + path + "' has no ensemble_members key");
    out.forecast.m = series.extra["ensemble_members"].get<std::size_t>();
    out.forecast.n = series.extra.at("sample_count").get<std::size_t>();
    out.lead_hours = series.extra.at("lead_hours").get<std::vector<int>>();
    out.init_times = series.extra.at("init_times").get<std::vector<std::int64_t>>();
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_config, std::string("malformed ensemble header: ") + e.what());
  }
  require(out.forecast.m * out.forecast.n == series.data.t, errc::dimension_mismatch,
          "ensemble dims do not factor the container's T axis");
  out.forecast.h = series.data.h;
  out.forecast.w = series.data.w;
  out.forecast.v = series.data.v;
  out.variable = series.vars[0].name;
  return out;
}

// --- Report emission ---------------------------------------------------------

void write_pgm(const std::string& path, const float* v, std::size_t h, std::size_t w) {
  float lo = std::numeric_limits<float>::infinity();
  float hi = -std::numeric_limits<float>::infinity();
  for (std::size_t x = 0; x < h * w; ++x) {
    if (std::isnan(v[x])) continue;
    lo = std::min(lo, v[x]);
    hi = std::max(hi, v[x]);
  }
  if (!std::isfinite(lo)) {
    lo = 0.0f;
    hi = 0.0f;
  }
  const float span = hi > lo ? hi - lo : 1.0f;

  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_failure, "cannot open '" + path + "' for writing");
  out << "P5\n" << w << " " << h << "\n255\n";
  std::vector<unsigned char> row(w);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const float x = v[i * w + j];
      row[j] = std::isnan(x)
                   ? 0
                   : static_cast<unsigned char>((x - lo) / span * 255.0f + 0.5f);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(w));
  }
  require(out.good(), errc::io_failure, "short write to '" + path + "'");

  nlohmann::json scale = {{"min", lo}, {"max", hi}, {"width", w}, {"height", h}};
  std::ofstream sidecar(path + ".scale.json");
  require(sidecar.good(), errc::io_failure, "cannot write scale sidecar");
  sidecar << scale.dump(2) << "\n";
}

std::vector<std::string> emit_report(const MetricReport& report, ReportFormat format,
                                     const std::string& prefix) {
  require(!report.rows.empty() || !report.maps.empty() || !report.histograms.empty(),
          errc::empty_result, "refusing to emit an empty report");
  std::vector<std::string> written;
  auto write_text = [&](const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), errc::io_failure, "cannot open '" + path + "' for writing");
    out << text;
    require(out.good(), errc::io_failure, "short write to '" + path + "'");
    written.push_back(path);
  };

  switch (format) {
    case ReportFormat::json:
      write_text(prefix + ".json", report_to_json(report));
      break;
    case ReportFormat::csv:
      write_text(prefix + ".csv", report_to_csv(report));
      break;
    case ReportFormat::maps: {
      for (const auto& map : report.maps) {
        const std::string base = prefix + "." + map.variable + "." + map.name;
        Grid grid = map.grid;
        if (grid.lats.empty()) {
          // No geographic metadata recorded: emit on a synthetic index grid.
          for (std::size_t i = 0; i < map.h; ++i)
            grid.lats.push_back(-90.0 + 180.0 * (static_cast<double>(i) + 0.5) /
                                            static_cast<double>(map.h));
          for (std::size_t j = 0; j < map.w; ++j)
            grid.lons.push_back(360.0 * static_cast<double>(j) / static_cast<double>(map.w));
          grid.periodic_lon = false;
        }
        FieldSeries series;
        series.grid = grid;
        series.vars = {{map.name, "", "surface", false}};
        series.time_start_unix = 0;
        series.time_step_seconds = 1;
        series.data = Tensor4(1, 1, map.h, map.w);
        std::copy(map.v.begin(), map.v.end(), series.data.v.begin());
        write_container(series, base + ".clbt");
        written.push_back(base + ".clbt");
        write_pgm(base + ".pgm", map.v.data(), map.h, map.w);
        written.push_back(base + ".pgm");
      }
      for (const auto& hist : report.histograms) {
        const std::string base = prefix + "." + hist.variable + "." + hist.name;
        std::vector<float> counts(hist.counts.begin(), hist.counts.end());
        FieldSeries series;
        series.grid.lats = {0.0};
        series.grid.lons.resize(counts.size());
        for (std::size_t j = 0; j < counts.size(); ++j)
          series.grid.lons[j] = static_cast<double>(j);
        series.grid.periodic_lon = false;
        series.vars = {{hist.name, "count", "surface", false}};
        series.time_start_unix = 0;
        series.time_step_seconds = 1;
        series.data = Tensor4(1, 1, 1, counts.size());
        std::copy(counts.begin(), counts.end(), series.data.v.begin());
        write_container(series, base + ".clbt");
        written.push_back(base + ".clbt");
        write_pgm(base + ".pgm", counts.data(), 1, counts.size());
        written.push_back(base + ".pgm");
      }
      break;
    }
  }
  return written;
}

}  // namespace clbench
