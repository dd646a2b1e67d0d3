#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "clbench/store.hpp"
#include "clbench/tensor.hpp"

namespace clbench {

struct LeadTime {
  int hours = 0;  // > 0
};

/// Paired (input tensor, target tensor, lead time) records for one task
/// configuration. Input channels follow a fixed declared order: for each
/// history offset (0, -s, -2s, ... as given), every non-static variable in
/// order, then the static variables, then any appended extras (the
/// continuous-lead channel). Construction is pure given (series, config,
/// seed).
struct SampleSet {
  std::size_t n = 0;
  std::size_t c_in = 0, h_in = 0, w_in = 0;
  std::size_t c_out = 0, h_out = 0, w_out = 0;
  std::vector<float> inputs;   // n * c_in * h_in * w_in
  std::vector<float> targets;  // n * c_out * h_out * w_out
  std::vector<int> lead_hours;           // per sample
  std::vector<std::int64_t> init_times;  // forecast issuance time t, per sample
  std::vector<std::string> input_channels;
  std::vector<std::string> target_channels;

  std::int64_t valid_time(std::size_t k) const {
    return init_times[k] + static_cast<std::int64_t>(lead_hours[k]) * 3600;
  }
  const float* input(std::size_t k) const { return inputs.data() + k * c_in * h_in * w_in; }
  const float* target(std::size_t k) const { return targets.data() + k * c_out * h_out * w_out; }

  /// n x h x w view of one target channel across all samples.
  CubeView target_channel(std::size_t c) const {
    return CubeView(targets.data() + c * h_out * w_out, n, h_out, w_out, c_out * h_out * w_out);
  }
  CubeView input_channel(std::size_t c) const {
    return CubeView(inputs.data() + c * h_in * w_in, n, h_in, w_in, c_in * h_in * w_in);
  }
  std::size_t input_channel_index(const std::string& name) const;
  std::size_t target_channel_index(const std::string& name) const;
};

/// Channel name for a variable observed at a history offset, e.g.
/// "t2m@0h", "t2m@-6h". Static variables keep their bare name.
std::string offset_channel_name(const std::string& var, int offset_hours);

/// Restricts sample anchor (issuance) times to [first, last]. Passing a
/// split's boundaries together with the full series lets history windows
/// consume context from the preceding split; the default -- sampling a
/// sliced split with no range -- keeps splits strictly isolated.
struct AnchorRange {
  std::int64_t first = std::numeric_limits<std::int64_t>::min();
  std::int64_t last = std::numeric_limits<std::int64_t>::max();
};

/// Sliding-window forecasting pairs: inputs gather in_vars at each history
/// offset plus static variables; targets are out_vars at t + lead. Samples
/// whose window or target leaves the series are dropped, never padded.
SampleSet forecasting_samples(const FieldSeries& series, const std::vector<int>& history_offsets_hours,
                              LeadTime lead, const std::vector<std::string>& in_vars,
                              const std::vector<std::string>& out_vars,
                              std::optional<AnchorRange> anchors = std::nullopt);

/// Lead-conditioned sampling: each sample draws its lead uniformly from
/// multiples of the base step within [lo, hi] (or uses fixed_lead when set)
/// and appends one constant input channel equal to lead_hours / 100.
SampleSet continuous_samples(const FieldSeries& series, const std::vector<int>& history_offsets_hours,
                             int lead_lo_hours, int lead_hi_hours,
                             const std::vector<std::string>& in_vars,
                             const std::vector<std::string>& out_vars, std::uint64_t rng_seed,
                             std::optional<int> fixed_lead_hours = std::nullopt,
                             std::optional<AnchorRange> anchors = std::nullopt);

/// Same-timestamp (low, high) pairs over the intersection of the two time
/// axes. Inputs come from the low-resolution series, targets from the high.
SampleSet downscaling_pairs(const FieldSeries& low, const FieldSeries& high,
                            const std::vector<std::string>& in_vars,
                            const std::vector<std::string>& out_vars);

/// Projection stacks: inputs are the forcing variables over a trailing
/// window of years (year-offset major, forcing minor: oldest year first),
/// targets the target variables of the final window year.
SampleSet projection_samples(const FieldSeries& forcings, const FieldSeries& targets,
                             std::size_t window_years = 10);

/// Exports a sample set to a CLBT container (inputs or targets side) for
/// external model training.
FieldSeries samples_to_series(const SampleSet& samples, const Grid& grid, bool targets_side);

}  // namespace clbench
