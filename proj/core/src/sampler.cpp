#include "clbench/sampler.hpp"

#include <algorithm>
#include <cstring>
#include <map>

#include "clbench/error.hpp"
#include "clbench/rng.hpp"

namespace clbench {

namespace {

struct ChannelPlan {
  std::vector<std::string> non_static;  // declared order
  std::vector<std::string> statics;
  std::vector<std::size_t> non_static_idx;
  std::vector<std::size_t> static_idx;
};

void check_unique(const std::vector<std::string>& names, const char* what) {
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j)
      require(names[i] != names[j], errc::bad_config,
              std::string(what) + " lists '" + names[i] + "' twice");
}

ChannelPlan plan_channels(const FieldSeries& series, const std::vector<std::string>& in_vars) {
  check_unique(in_vars, "input variables");
  ChannelPlan plan;
  for (const auto& name : in_vars) {
    const std::size_t idx = series.var_index(name);
    if (series.vars[idx].is_static) {
      plan.statics.push_back(name);
      plan.static_idx.push_back(idx);
    } else {
      plan.non_static.push_back(name);
      plan.non_static_idx.push_back(idx);
    }
  }
  return plan;
}

void check_offsets(const std::vector<int>& offsets) {
  require(!offsets.empty() && offsets.front() == 0, errc::bad_config,
          "history offsets must start at 0");
  for (std::size_t i = 1; i < offsets.size(); ++i)
    require(offsets[i] < offsets[i - 1], errc::bad_config,
            "history offsets must be strictly descending from 0");
}

std::int64_t step_hours_of(const FieldSeries& series) {
  require(series.time_step_seconds % 3600 == 0, errc::bad_config,
          "series step is not a whole number of hours");
  return series.time_step_seconds / 3600;
}

}  // namespace

std::string offset_channel_name(const std::string& var, int offset_hours) {
  return var + "@" + std::to_string(offset_hours) + "h";
}

std::size_t SampleSet::input_channel_index(const std::string& name) const {
  for (std::size_t i = 0; i < input_channels.size(); ++i)
    if (input_channels[i] == name) return i;
  fail(errc::missing_variable, "input channel '" + name + "' not present");
}

std::size_t SampleSet::target_channel_index(const std::string& name) const {
  for (std::size_t i = 0; i < target_channels.size(); ++i)
    if (target_channels[i] == name) return i;
  fail(errc::missing_variable, "target channel '" + name + "' not present");
}

namespace {

// Shared assembly for the forecasting and continuous modes. Anchors outside
// the valid window were already dropped by the caller.
SampleSet assemble_forecasting(const FieldSeries& series, const std::vector<int>& offsets,
                               const std::vector<std::size_t>& anchors,
                               const std::vector<int>& leads_per_anchor, const ChannelPlan& plan,
                               const std::vector<std::string>& out_vars,
                               std::optional<double> lead_channel_scale) {
  const std::size_t h = series.data.h, w = series.data.w, plane = h * w;
  const std::int64_t step_h = step_hours_of(series);

  std::vector<std::size_t> out_idx;
  for (const auto& name : out_vars) out_idx.push_back(series.var_index(name));

  SampleSet out;
  out.h_in = h;
  out.w_in = w;
  out.h_out = h;
  out.w_out = w;
  out.c_in = plan.non_static.size() * offsets.size() + plan.statics.size() +
             (lead_channel_scale ? 1 : 0);
  out.c_out = out_vars.size();
  for (int off : offsets)
    for (const auto& v : plan.non_static) out.input_channels.push_back(offset_channel_name(v, off));
  for (const auto& v : plan.statics) out.input_channels.push_back(v);
  if (lead_channel_scale) out.input_channels.push_back("lead_time");
  out.target_channels = out_vars;

  out.n = anchors.size();
  out.inputs.resize(out.n * out.c_in * plane);
  out.targets.resize(out.n * out.c_out * plane);
  out.lead_hours.resize(out.n);
  out.init_times.resize(out.n);

  for (std::size_t s = 0; s < anchors.size(); ++s) {
    const std::size_t t = anchors[s];
    const int lead = leads_per_anchor[s];
    out.lead_hours[s] = lead;
    out.init_times[s] = series.time(t);

    float* in = out.inputs.data() + s * out.c_in * plane;
    std::size_t ch = 0;
    for (int off : offsets) {
      const std::int64_t rel = off / step_h;  // non-positive multiple of the step
      const std::size_t src_t =
          static_cast<std::size_t>(static_cast<std::int64_t>(t) + rel);
      for (std::size_t v = 0; v < plan.non_static_idx.size(); ++v, ++ch)
        std::memcpy(in + ch * plane,
                    series.data.v.data() + (src_t * series.data.c + plan.non_static_idx[v]) * plane,
                    plane * sizeof(float));
    }
    for (std::size_t v = 0; v < plan.static_idx.size(); ++v, ++ch)
      std::memcpy(in + ch * plane,
                  series.data.v.data() + (t * series.data.c + plan.static_idx[v]) * plane,
                  plane * sizeof(float));
    if (lead_channel_scale) {
      const float value = static_cast<float>(lead / *lead_channel_scale);
      std::fill(in + ch * plane, in + (ch + 1) * plane, value);
      ++ch;
    }

    const std::size_t tgt_t = t + static_cast<std::size_t>(lead / step_h);
    float* tgt = out.targets.data() + s * out.c_out * plane;
    for (std::size_t v = 0; v < out_idx.size(); ++v)
      std::memcpy(tgt + v * plane,
                  series.data.v.data() + (tgt_t * series.data.c + out_idx[v]) * plane,
                  plane * sizeof(float));
  }
  return out;
}

std::size_t history_steps_needed(const std::vector<int>& offsets, std::int64_t step_h) {
  std::size_t needed = 0;
  for (int off : offsets) {
    require(off % step_h == 0, errc::bad_config, "offset not a multiple of the series step");
    needed = std::max<std::size_t>(needed, static_cast<std::size_t>(-off / step_h));
  }
  return needed;
}

}  // namespace

SampleSet forecasting_samples(const FieldSeries& series, const std::vector<int>& history_offsets_hours,
                              LeadTime lead, const std::vector<std::string>& in_vars,
                              const std::vector<std::string>& out_vars,
                              std::optional<AnchorRange> anchor_range) {
  check_offsets(history_offsets_hours);
  require(lead.hours > 0, errc::bad_config, "lead must be positive");
  const std::int64_t step_h = step_hours_of(series);
  require(lead.hours % step_h == 0, errc::bad_config, "lead not a multiple of the series step");
  const ChannelPlan plan = plan_channels(series, in_vars);
  check_unique(out_vars, "output variables");
  for (const auto& v : out_vars) series.var_index(v);

  const std::size_t history = history_steps_needed(history_offsets_hours, step_h);
  const std::size_t lead_steps = static_cast<std::size_t>(lead.hours / step_h);

  std::vector<std::size_t> anchors;
  std::vector<int> leads;
  for (std::size_t t = history; t + lead_steps < series.n_times(); ++t) {
    if (anchor_range &&
        (series.time(t) < anchor_range->first || series.time(t) > anchor_range->last))
      continue;
    anchors.push_back(t);
    leads.push_back(lead.hours);
  }
  require(!anchors.empty(), errc::empty_result, "no sample fits inside the series");
  return assemble_forecasting(series, history_offsets_hours, anchors, leads, plan, out_vars,
                              std::nullopt);
}

SampleSet continuous_samples(const FieldSeries& series, const std::vector<int>& history_offsets_hours,
                             int lead_lo_hours, int lead_hi_hours,
                             const std::vector<std::string>& in_vars,
                             const std::vector<std::string>& out_vars, std::uint64_t rng_seed,
                             std::optional<int> fixed_lead_hours,
                             std::optional<AnchorRange> anchor_range) {
  check_offsets(history_offsets_hours);
  const std::int64_t step_h = step_hours_of(series);
  require(lead_lo_hours >= step_h && lead_hi_hours >= lead_lo_hours, errc::empty_lead_range,
          "lead range must satisfy base step <= lo <= hi");
  const ChannelPlan plan = plan_channels(series, in_vars);
  check_unique(out_vars, "output variables");
  for (const auto& v : out_vars) series.var_index(v);

  // Leads are drawn from multiples of the base step inside [lo, hi]; data
  // exists only at step multiples.
  std::vector<int> choices;
  for (int lh = lead_lo_hours; lh <= lead_hi_hours; ++lh)
    if (lh % step_h == 0) choices.push_back(lh);
  require(!choices.empty(), errc::empty_lead_range, "no step multiple inside the lead range");

  if (fixed_lead_hours) {
    require(*fixed_lead_hours % step_h == 0, errc::bad_config,
            "fixed lead not a multiple of the series step");
  }

  const std::size_t history = history_steps_needed(history_offsets_hours, step_h);
  const int max_lead = fixed_lead_hours ? *fixed_lead_hours : choices.back();
  const std::size_t max_lead_steps = static_cast<std::size_t>(max_lead / step_h);

  Rng rng = Rng(rng_seed).stream("continuous-leads");
  std::vector<std::size_t> anchors;
  std::vector<int> leads;
  for (std::size_t t = history; t + max_lead_steps < series.n_times(); ++t) {
    if (anchor_range &&
        (series.time(t) < anchor_range->first || series.time(t) > anchor_range->last))
      continue;
    anchors.push_back(t);
    leads.push_back(fixed_lead_hours
                        ? *fixed_lead_hours
                        : choices[static_cast<std::size_t>(rng.uniform_index(choices.size()))]);
  }
  require(!anchors.empty(), errc::empty_result, "no sample fits inside the series");
  return assemble_forecasting(series, history_offsets_hours, anchors, leads, plan, out_vars,
                              100.0);
}

SampleSet downscaling_pairs(const FieldSeries& low, const FieldSeries& high,
                            const std::vector<std::string>& in_vars,
                            const std::vector<std::string>& out_vars) {
  std::vector<std::size_t> in_idx, out_idx;
  for (const auto& v : in_vars) in_idx.push_back(low.var_index(v));
  for (const auto& v : out_vars) out_idx.push_back(high.var_index(v));

  // Timestamp intersection.
  std::map<std::int64_t, std::size_t> high_times;
  for (std::size_t k = 0; k < high.n_times(); ++k) high_times[high.time(k)] = k;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t k = 0; k < low.n_times(); ++k) {
    auto it = high_times.find(low.time(k));
    if (it != high_times.end()) pairs.emplace_back(k, it->second);
  }
  require(!pairs.empty(), errc::empty_result, "low/high series share no timestamps");

  const std::size_t plane_in = low.data.h * low.data.w;
  const std::size_t plane_out = high.data.h * high.data.w;

  SampleSet out;
  out.n = pairs.size();
  out.c_in = in_vars.size();
  out.h_in = low.data.h;
  out.w_in = low.data.w;
  out.c_out = out_vars.size();
  out.h_out = high.data.h;
  out.w_out = high.data.w;
  out.input_channels = in_vars;
  out.target_channels = out_vars;
  out.inputs.resize(out.n * out.c_in * plane_in);
  out.targets.resize(out.n * out.c_out * plane_out);
  out.lead_hours.assign(out.n, 0);
  out.init_times.resize(out.n);

  for (std::size_t s = 0; s < pairs.size(); ++s) {
    const auto [lk, hk] = pairs[s];
    out.init_times[s] = low.time(lk);
    for (std::size_t v = 0; v < in_idx.size(); ++v)
      std::memcpy(out.inputs.data() + (s * out.c_in + v) * plane_in,
                  low.data.v.data() + (lk * low.data.c + in_idx[v]) * plane_in,
                  plane_in * sizeof(float));
    for (std::size_t v = 0; v < out_idx.size(); ++v)
      std::memcpy(out.targets.data() + (s * out.c_out + v) * plane_out,
                  high.data.v.data() + (hk * high.data.c + out_idx[v]) * plane_out,
                  plane_out * sizeof(float));
  }
  return out;
}

SampleSet projection_samples(const FieldSeries& forcings, const FieldSeries& targets,
                             std::size_t window_years) {
  require(window_years >= 1, errc::bad_config, "window must cover at least one year");
  // Annual cadence: at least ~360 days between steps.
  constexpr std::int64_t kAnnualFloor = 360ll * 86400;
  require(forcings.time_step_seconds >= kAnnualFloor && targets.time_step_seconds >= kAnnualFloor,
          errc::bad_config, "projection sampling expects annual series");

  std::map<int, std::size_t> forcing_year_idx;
  for (std::size_t k = 0; k < forcings.n_times(); ++k)
    forcing_year_idx[year_of_unix(forcings.time(k))] = k;

  const std::size_t plane_in = forcings.data.h * forcings.data.w;
  const std::size_t plane_out = targets.data.h * targets.data.w;
  const std::size_t n_forcings = forcings.vars.size();

  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> rows;  // (target idx, window idxs)
  for (std::size_t k = 0; k < targets.n_times(); ++k) {
    const int target_year = year_of_unix(targets.time(k));
    std::vector<std::size_t> window;
    bool complete = true;
    for (std::size_t o = 0; o < window_years; ++o) {
      const int y = target_year - static_cast<int>(window_years - 1 - o);  // oldest first
      auto it = forcing_year_idx.find(y);
      if (it == forcing_year_idx.end()) {
        complete = false;
        break;
      }
      window.push_back(it->second);
    }
    if (complete) rows.emplace_back(k, std::move(window));
  }
  require(!rows.empty(), errc::insufficient_history,
          "no target year has a full forcing window behind it");

  SampleSet out;
  out.n = rows.size();
  out.c_in = n_forcings * window_years;
  out.h_in = forcings.data.h;
  out.w_in = forcings.data.w;
  out.c_out = targets.vars.size();
  out.h_out = targets.data.h;
  out.w_out = targets.data.w;
  for (std::size_t o = 0; o < window_years; ++o) {
    const int rel = -static_cast<int>(window_years - 1 - o);
    for (const auto& v : forcings.vars)
      out.input_channels.push_back(v.name + "@y" + std::to_string(rel));
  }
  for (const auto& v : targets.vars) out.target_channels.push_back(v.name);
  out.inputs.resize(out.n * out.c_in * plane_in);
  out.targets.resize(out.n * out.c_out * plane_out);
  out.lead_hours.assign(out.n, 0);
  out.init_times.resize(out.n);

  for (std::size_t s = 0; s < rows.size(); ++s) {
    const auto& [tk, window] = rows[s];
    out.init_times[s] = targets.time(tk);
    std::size_t ch = 0;
    for (std::size_t o = 0; o < window_years; ++o)
      for (std::size_t v = 0; v < n_forcings; ++v, ++ch)
        std::memcpy(out.inputs.data() + (s * out.c_in + ch) * plane_in,
                    forcings.data.v.data() + (window[o] * forcings.data.c + v) * plane_in,
                    plane_in * sizeof(float));
    for (std::size_t v = 0; v < targets.vars.size(); ++v)
      std::memcpy(out.targets.data() + (s * out.c_out + v) * plane_out,
                  targets.data.v.data() + (tk * targets.data.c + v) * plane_out,
                  plane_out * sizeof(float));
  }
  return out;
}

FieldSeries samples_to_series(const SampleSet& samples, const Grid& grid, bool targets_side) {
  FieldSeries out;
  out.grid = grid;
  const auto& names = targets_side ? samples.target_channels : samples.input_channels;
  for (const auto& name : names) out.vars.push_back({name, "", "surface", false});
  require(samples.n >= 1, errc::empty_result, "sample set is empty");
  out.time_start_unix = samples.init_times.front();
  out.time_step_seconds =
      samples.n >= 2 ? samples.init_times[1] - samples.init_times[0] : 3600;
  const std::size_t c = targets_side ? samples.c_out : samples.c_in;
  const std::size_t h = targets_side ? samples.h_out : samples.h_in;
  const std::size_t w = targets_side ? samples.w_out : samples.w_in;
  out.data = Tensor4(samples.n, c, h, w);
  std::memcpy(out.data.v.data(), (targets_side ? samples.targets : samples.inputs).data(),
              out.data.size() * sizeof(float));
  return out;
}

}  // namespace clbench
