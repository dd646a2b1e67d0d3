// clbench: benchmarking engine for gridded weather and climate data.
// Subcommands cover synthetic data generation, ingestion, normalization
// stats, chronological splits, regridding, cropping, extreme-event masks,
// traditional baselines, prediction-file scoring, iterative rollout, and
// report emission.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "clbench/baselines.hpp"
#include "clbench/error.hpp"
#include "clbench/extreme.hpp"
#include "clbench/harness.hpp"
#include "clbench/metrics.hpp"
#include "clbench/parallel.hpp"
#include "clbench/regrid.hpp"
#include "clbench/rng.hpp"
#include "clbench/sampler.hpp"
#include "clbench/store.hpp"
#include "clbench/synthetic.hpp"

#include "CLI11.hpp"
#include "json.hpp"

using namespace clbench;

namespace {

// --- small parsing helpers ---------------------------------------------------

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& tok : split_list(text)) {
    try {
      out.push_back(std::stoi(tok));
    } catch (...) {
      fail(errc::bad_config, std::string(what) + ": '" + tok + "' is not an integer");
    }
  }
  return out;
}

YearRange parse_year_range(const std::string& text, const char* what) {
  const auto colon = text.find(':');
  require(colon != std::string::npos, errc::bad_config,
          std::string(what) + ": expected FIRST:LAST, got '" + text + "'");
  try {
    YearRange r{std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
    require(r.first <= r.last, errc::bad_config,
            std::string(what) + ": range '" + text + "' is reversed");
    return r;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(errc::bad_config, std::string(what) + ": cannot parse '" + text + "'");
  }
}

std::string join(const std::vector<std::string>& items, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(sep);
    out += items[i];
  }
  return out;
}

// Echoes the effective configuration of the invoked subcommand: every option
// with its final value (config file and CLI flags already merged).
class ConfigEcho {
 public:
  explicit ConfigEcho(std::string command) : command_(std::move(command)) {}
  template <typename T>
  void add(const std::string& key, const T& value) {
    std::ostringstream out;
    out << value;
    lines_.push_back(key + "=" + out.str());
  }
  void add(const std::string& key, bool value) {
    lines_.push_back(key + (value ? "=true" : "=false"));
  }
  void print() const {
    std::cout << "# effective-config\n" << "command=" << command_ << "\n";
    for (const auto& line : lines_) std::cout << line << "\n";
    std::cout << "# end-config\n";
  }

 private:
  std::string command_;
  std::vector<std::string> lines_;
};

FieldSeries select_variable(const FieldSeries& series, const std::string& var) {
  const std::size_t idx = series.var_index(var);
  FieldSeries out;
  out.grid = series.grid;
  out.vars = {series.vars[idx]};
  out.time_start_unix = series.time_start_unix;
  out.time_step_seconds = series.time_step_seconds;
  out.data = Tensor4(series.data.t, 1, series.data.h, series.data.w);
  const std::size_t plane = series.data.h * series.data.w;
  for (std::size_t k = 0; k < series.data.t; ++k)
    std::memcpy(out.data.v.data() + k * plane,
                series.data.v.data() + (k * series.data.c + idx) * plane,
                plane * sizeof(float));
  return out;
}

// --- gen-synthetic -----------------------------------------------------------

struct GenArgs {
  std::string out;
  std::size_t steps = 128;
  double resolution = 5.625;
  std::string vars = "t2m";
  std::string static_vars;
  double ar1 = 0.9;
  double stddev = 1.0;
  double mean = 0.0;
  std::size_t smooth = 1;
  std::int64_t start_unix = 283996800;  // 1979-01-01
  int step_hours = 6;
};

int run_gen(const GenArgs& a, std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.n_steps = a.steps;
  cfg.resolution_deg = a.resolution;
  cfg.vars = split_list(a.vars);
  cfg.static_vars = split_list(a.static_vars);
  cfg.ar1 = a.ar1;
  cfg.stddev = a.stddev;
  cfg.mean = a.mean;
  cfg.smooth_radius = a.smooth;
  cfg.start_unix = a.start_unix;
  cfg.step_seconds = static_cast<std::int64_t>(a.step_hours) * 3600;
  cfg.seed = seed;
  const FieldSeries series = gen_synthetic(cfg);
  write_container(series, a.out);

  nlohmann::json manifest;
  manifest["dims"] = {series.data.t, series.data.c, series.data.h, series.data.w};
  manifest["seed"] = seed;
  manifest["ar1"] = cfg.ar1;
  manifest["stddev"] = cfg.stddev;
  manifest["mean"] = cfg.mean;
  manifest["smooth_radius"] = cfg.smooth_radius;
  manifest["resolution_deg"] = cfg.resolution_deg;
  manifest["step_seconds"] = cfg.step_seconds;
  manifest["time_start_unix"] = cfg.start_unix;
  manifest["vars"] = cfg.vars;
  manifest["static_vars"] = cfg.static_vars;
  std::ofstream mf(a.out + ".manifest.json");
  require(mf.good(), errc::io_failure, "cannot write manifest");
  mf << manifest.dump(2) << "\n";

  std::cout << "wrote " << a.out << " (" << series.data.t << "x" << series.data.c << "x"
            << series.data.h << "x" << series.data.w << ")\n";
  return 0;
}

// --- ingest ------------------------------------------------------------------

struct IngestArgs {
  std::string format = "csv";
  std::string in, out;
  std::string var = "t2m";
  std::string vars;  // raw format: comma list
  double resolution = 5.625;
  std::int64_t start_unix = 283996800;
  std::int64_t step_seconds = 6 * 3600;
  std::size_t stride = 1;  // keep every Nth input timestep
};

FieldSeries subsample_time(const FieldSeries& series, std::size_t stride) {
  if (stride <= 1) return series;
  FieldSeries out;
  out.grid = series.grid;
  out.vars = series.vars;
  out.extra = series.extra;
  out.time_start_unix = series.time_start_unix;
  out.time_step_seconds = series.time_step_seconds * static_cast<std::int64_t>(stride);
  const std::size_t t_out = (series.data.t + stride - 1) / stride;
  out.data = Tensor4(t_out, series.data.c, series.data.h, series.data.w);
  const std::size_t slab = series.data.c * series.data.h * series.data.w;
  for (std::size_t k = 0; k < t_out; ++k)
    std::memcpy(out.data.v.data() + k * slab, series.data.v.data() + k * stride * slab,
                slab * sizeof(float));
  return out;
}

int run_ingest(const IngestArgs& a) {
  const Grid grid = grid_from_resolution(a.resolution);
  const std::size_t plane = grid.h() * grid.w();
  FieldSeries series;
  series.grid = grid;
  series.time_step_seconds = a.step_seconds;

  if (a.format == "csv") {
    // One row per timestep: unix_time followed by H*W row-major values.
    std::ifstream in(a.in);
    require(in.good(), errc::io_failure, "cannot open '" + a.in + "'");
    std::vector<float> data;
    std::vector<std::int64_t> times;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream row(line);
      std::string tok;
      require(static_cast<bool>(std::getline(row, tok, ',')), errc::bad_config,
              "line " + std::to_string(lineno) + ": missing timestamp");
      times.push_back(std::stoll(tok));
      std::size_t count = 0;
      while (std::getline(row, tok, ',')) {
        data.push_back(tok == "nan" || tok == "NaN"
                           ? std::numeric_limits<float>::quiet_NaN()
                           : std::stof(tok));
        ++count;
      }
      require(count == plane, errc::dimension_mismatch,
              "line " + std::to_string(lineno) + ": expected " + std::to_string(plane) +
                  " values, got " + std::to_string(count));
    }
    require(!times.empty(), errc::empty_result, "no data rows in '" + a.in + "'");
    for (std::size_t k = 1; k < times.size(); ++k)
      require(times[k] - times[k - 1] == times[1] - times[0], errc::bad_config,
              "timestamps must be uniformly spaced");
    series.vars = {{a.var, "", "surface", false}};
    series.time_start_unix = times.front();
    if (times.size() >= 2) series.time_step_seconds = times[1] - times[0];
    series.data = Tensor4(times.size(), 1, grid.h(), grid.w());
    std::copy(data.begin(), data.end(), series.data.v.begin());
  } else if (a.format == "raw") {
    // Raw little-endian f32, row-major T x C x H x W; T inferred from size.
    const auto names = split_list(a.vars.empty() ? a.var : a.vars);
    require(!names.empty(), errc::bad_config, "raw ingest needs --vars");
    std::ifstream in(a.in, std::ios::binary | std::ios::ate);
    require(in.good(), errc::io_failure, "cannot open '" + a.in + "'");
    const std::size_t bytes = static_cast<std::size_t>(in.tellg());
    const std::size_t slab = names.size() * plane * sizeof(float);
    require(bytes % slab == 0 && bytes > 0, errc::dimension_mismatch,
            "file size is not a positive multiple of C*H*W*4");
    const std::size_t t = bytes / slab;
    for (const auto& name : names) series.vars.push_back({name, "", "surface", false});
    series.time_start_unix = a.start_unix;
    series.data = Tensor4(t, names.size(), grid.h(), grid.w());
    in.seekg(0);
    in.read(reinterpret_cast<char*>(series.data.v.data()), static_cast<std::streamsize>(bytes));
    require(in.good(), errc::io_failure, "short read from '" + a.in + "'");
  } else {
    fail(errc::bad_config, "unknown ingest format '" + a.format + "'");
  }

  require(a.stride >= 1, errc::bad_config, "stride must be at least 1");
  series = subsample_time(series, a.stride);
  write_container(series, a.out);
  std::cout << "wrote " << a.out << " (" << series.data.t << " steps)\n";
  return 0;
}

// --- stats -------------------------------------------------------------------

struct StatsArgs {
  std::string in, out;
  std::string train = "1979:2015";
};

int run_stats(const StatsArgs& a) {
  const FieldSeries series = read_container(a.in);
  SplitSpec spec;
  spec.train = parse_year_range(a.train, "train");
  // Stats only touch the training range; park val/test after it.
  spec.val = {spec.train.last + 1, spec.train.last + 1};
  spec.test = {spec.train.last + 2, spec.train.last + 2};
  const NormStats stats = compute_norm_stats(series, spec);

  nlohmann::json doc;
  doc["channels"] = nlohmann::json::array();
  for (std::size_t c = 0; c < stats.channels.size(); ++c)
    doc["channels"].push_back({{"name", stats.channels[c]},
                               {"mean", stats.mean[c]},
                               {"std", stats.stddev[c]}});
  const std::string text = doc.dump(2);
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    require(out.good(), errc::io_failure, "cannot write '" + a.out + "'");
    out << text << "\n";
  }
  std::cout << text << "\n";
  return 0;
}

// --- split -------------------------------------------------------------------

struct SplitArgs {
  std::string in, out_prefix;
  std::string train = "1979:2015", val = "2016:2016", test = "2017:2018";
};

int run_split(const SplitArgs& a) {
  const FieldSeries series = read_container(a.in);
  SplitSpec spec;
  spec.train = parse_year_range(a.train, "train");
  spec.val = parse_year_range(a.val, "val");
  spec.test = parse_year_range(a.test, "test");
  const SplitSeries parts = split_by_years(series, spec);
  write_container(parts.train, a.out_prefix + ".train.clbt");
  write_container(parts.val, a.out_prefix + ".val.clbt");
  write_container(parts.test, a.out_prefix + ".test.clbt");
  std::cout << "train: " << parts.train.n_times() << " steps\n"
            << "val:   " << parts.val.n_times() << " steps\n"
            << "test:  " << parts.test.n_times() << " steps\n";
  return 0;
}

// --- regrid / crop -----------------------------------------------------------

struct RegridArgs {
  std::string in, out;
  std::string scheme = "bilinear";
  double to = 2.8125;
};

InterpScheme parse_scheme(const std::string& scheme) {
  if (scheme == "nearest") return InterpScheme::nearest;
  if (scheme == "bilinear") return InterpScheme::bilinear;
  fail(errc::bad_config, "scheme must be nearest or bilinear, got '" + scheme + "'");
}

int run_regrid(const RegridArgs& a) {
  const FieldSeries series = read_container(a.in);
  const Grid target = grid_from_resolution(a.to);
  write_container(regrid_series(series, target, parse_scheme(a.scheme)), a.out);
  std::cout << "wrote " << a.out << " at " << a.to << " deg\n";
  return 0;
}

struct CropArgs {
  std::string in, out;
  std::string region;
  double lat_min = -90, lat_max = 90, lon_min = 0, lon_max = 360;
};

int run_crop(const CropArgs& a) {
  const FieldSeries series = read_container(a.in);
  RegionBox box{a.lat_min, a.lat_max, a.lon_min, a.lon_max};
  if (a.region == "conus")
    box = conus_box();
  else
    require(a.region.empty(), errc::bad_config, "unknown region '" + a.region + "'");
  const FieldSeries cropped = crop_series(series, box);
  write_container(cropped, a.out);
  std::cout << "wrote " << a.out << " (" << cropped.data.h << "x" << cropped.data.w << ")\n";
  return 0;
}

// --- extreme -----------------------------------------------------------------

struct ThresholdArgs {
  std::string in, out;
  std::string var = "t2m";
  int window_days = 7;
  std::size_t min_samples = 100;
  bool renormalize = false;
};

int run_thresholds(const ThresholdArgs& a) {
  const FieldSeries series = select_variable(read_container(a.in), a.var);
  ExtremeConfig cfg;
  cfg.window_days = a.window_days;
  cfg.min_samples = a.min_samples;
  cfg.renormalize_stencil = a.renormalize;
  const ThresholdField th = compute_thresholds(series, cfg);
  write_container(thresholds_to_series(th, series.grid), a.out);
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

struct MaskArgs {
  std::string in, thresholds, out;
  std::string var = "t2m";
  std::string test_years;  // optional FIRST:LAST restriction
  int window_days = 7;
  bool renormalize = false;
  bool inclusive = false;
};

int run_masks(const MaskArgs& a) {
  const FieldSeries series = select_variable(read_container(a.in), a.var);
  const ThresholdField th = thresholds_from_series(read_container(a.thresholds));
  ExtremeConfig cfg;
  cfg.window_days = a.window_days;
  cfg.renormalize_stencil = a.renormalize;
  cfg.inclusive_bounds = a.inclusive;
  const FieldSeries localized = localized_rolling_mean(series, cfg);
  ExtremeMaskSeries masks = build_masks(localized, th, cfg);

  if (!a.test_years.empty()) {
    // Keep only mask timestamps inside the test years; the trailing window
    // already consumed context from the preceding split.
    const YearRange r = parse_year_range(a.test_years, "test-years");
    std::size_t first = masks.n, last = 0;
    bool any = false;
    for (std::size_t k = 0; k < masks.n; ++k) {
      if (!r.contains(year_of_unix(masks.time(k)))) continue;
      if (!any) first = k;
      last = k;
      any = true;
    }
    require(any, errc::empty_split, "no mask timestamps inside the test years");
    ExtremeMaskSeries cut;
    cut.grid = masks.grid;
    cut.time_step_seconds = masks.time_step_seconds;
    cut.time_start_unix = masks.time(first);
    cut.n = last - first + 1;
    cut.h = masks.h;
    cut.w = masks.w;
    cut.masks.assign(
        masks.masks.begin() + static_cast<std::ptrdiff_t>(first * masks.h * masks.w),
        masks.masks.begin() + static_cast<std::ptrdiff_t>((last + 1) * masks.h * masks.w));
    masks = std::move(cut);
  }

  write_container(masks_to_series(masks), a.out);
  const double fraction =
      static_cast<double>(masks.true_count()) / static_cast<double>(masks.masks.size());
  std::cout << "wrote " << a.out << " (" << masks.n << " steps, masked fraction " << fraction
            << ")\n";
  return 0;
}

// --- baseline ----------------------------------------------------------------

struct BaselineArgs {
  std::string model;  // climatology | persistence | linreg | interp
  std::string train, in, out, model_file;
  std::string in_vars, out_vars = "t2m";
  std::string offsets = "0";
  std::string anchor_years;  // optional FIRST:LAST; history may precede it
  int lead = 6;
  std::size_t stencil = 3;
  bool global_mode = false;
  double ridge = 0.0;
  std::string scheme = "bilinear";
  double to = 2.8125;
};

SampleSet build_samples(const FieldSeries& series, const BaselineArgs& a) {
  const auto out_vars = split_list(a.out_vars);
  const auto in_vars = a.in_vars.empty() ? out_vars : split_list(a.in_vars);
  std::optional<AnchorRange> anchors;
  if (!a.anchor_years.empty()) {
    const YearRange r = parse_year_range(a.anchor_years, "anchor-years");
    anchors = AnchorRange{unix_from_ymd(r.first, 1, 1), unix_from_ymd(r.last + 1, 1, 1) - 1};
  }
  return forecasting_samples(series, parse_int_list(a.offsets, "offsets"), LeadTime{a.lead},
                             in_vars, out_vars, anchors);
}

int run_baseline_fit(const BaselineArgs& a) {
  require(!a.train.empty(), errc::bad_config, "fit needs --train");
  const FieldSeries train = read_container(a.train);
  if (a.model == "climatology") {
    const auto out_vars = split_list(a.out_vars);
    const ClimatologyModel model = climatology_forecast(train, out_vars);
    FieldSeries packed;
    packed.grid = model.grid;
    packed.time_start_unix = 0;
    packed.time_step_seconds = 1;
    packed.data = Tensor4(1, out_vars.size(), model.grid.h(), model.grid.w());
    for (std::size_t c = 0; c < out_vars.size(); ++c) {
      packed.vars.push_back({out_vars[c], "", "surface", false});
      std::copy(model.maps[c].v.begin(), model.maps[c].v.end(),
                packed.data.v.begin() + static_cast<std::ptrdiff_t>(c * model.maps[c].v.size()));
    }
    packed.extra["model"] = "climatology";
    write_container(packed, a.out);
  } else if (a.model == "linreg") {
    const SampleSet samples = build_samples(train, a);
    LinregConfig cfg;
    cfg.mode = a.global_mode ? LinregConfig::Mode::global : LinregConfig::Mode::local_stencil;
    cfg.stencil = a.stencil;
    cfg.ridge_lambda = a.ridge;
    const LinearModel model = linreg_fit(samples, make_lat_weights(train.grid), cfg);
    save_linear_model(model, a.out);
  } else {
    fail(errc::bad_config, "fit supports climatology or linreg, got '" + a.model + "'");
  }
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

int run_baseline_predict(const BaselineArgs& a) {
  require(!a.in.empty(), errc::bad_config, "predict needs --in");
  const FieldSeries test = read_container(a.in);

  PredictionSet preds;
  if (a.model == "climatology") {
    require(!a.model_file.empty(), errc::bad_config, "climatology predict needs --model-file");
    const FieldSeries packed = read_container(a.model_file);
    ClimatologyModel model;
    model.grid = packed.grid;
    const std::size_t plane = packed.data.h * packed.data.w;
    for (std::size_t c = 0; c < packed.vars.size(); ++c) {
      model.vars.push_back(packed.vars[c].name);
      ClimatologyMap map;
      map.h = packed.data.h;
      map.w = packed.data.w;
      map.provenance = "train-split";
      map.v.assign(packed.data.v.begin() + static_cast<std::ptrdiff_t>(c * plane),
                   packed.data.v.begin() + static_cast<std::ptrdiff_t>((c + 1) * plane));
      model.maps.push_back(std::move(map));
    }
    BaselineArgs forced = a;
    forced.out_vars = join(model.vars);
    const SampleSet samples = build_samples(test, forced);
    preds = predictions_from_raw(climatology_predict(model, samples.n), samples, "climatology");
  } else if (a.model == "persistence") {
    const SampleSet samples = build_samples(test, a);
    preds = predictions_from_raw(persistence_forecast(samples, split_list(a.out_vars)), samples,
                                 "persistence");
  } else if (a.model == "linreg") {
    require(!a.model_file.empty(), errc::bad_config, "linreg predict needs --model-file");
    const LinearModel model = load_linear_model(a.model_file);
    BaselineArgs forced = a;
    forced.out_vars = join(model.target_channels);
    // The sampling flags must reproduce the channel layout the model was
    // fitted on; verified below.
    const SampleSet samples = build_samples(test, forced);
    require(samples.input_channels == model.input_channels, errc::channel_mismatch,
            "sampling flags reproduce different input channels than the model was fit on");
    preds = predictions_from_raw(linreg_predict(model, samples), samples, "linreg");
  } else if (a.model == "interp") {
    const Grid target = grid_from_resolution(a.to);
    const auto vars = split_list(a.out_vars);
    const SampleSet samples = downscaling_pairs(test, test, vars, vars);
    std::vector<float> raw = interp_downscale(samples, test.grid, target, parse_scheme(a.scheme));
    preds.n = samples.n;
    preds.c = vars.size();
    preds.h = target.h();
    preds.w = target.w();
    preds.preds = std::move(raw);
    preds.lead_hours = samples.lead_hours;
    preds.init_times = samples.init_times;
    preds.channels = vars;
    preds.source = "interp-" + a.scheme;
    preds.task = "downscaling";
    preds.protocol = "direct";
    write_predictions(preds, target, a.out);
    std::cout << "wrote " << a.out << "\n";
    return 0;
  } else {
    fail(errc::bad_config, "unknown baseline '" + a.model + "'");
  }

  preds.source = a.model;
  preds.task = "forecasting";
  preds.protocol = "direct";
  write_predictions(preds, test.grid, a.out);
  std::cout << "wrote " << a.out << " (" << preds.n << " samples at lead " << a.lead << "h)\n";
  return 0;
}

// --- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
  std::string protocol = "direct";
  std::string preds;  // comma-separated prediction containers
  std::string ensemble;
  std::string truth;
  std::string metrics = "rmse,acc,bias,pearson";
  std::string mask = "none";  // none | nan | extreme
  std::string extreme_masks;
  std::string climatology = "test";
  std::string train;  // train series for --climatology train
  std::string train_lead_range;
  std::string leads;  // optional comma list restricting evaluated leads
  std::string out = "report";
};

int run_evaluate(const EvaluateArgs& a, std::uint64_t seed) {
  require(!a.truth.empty(), errc::bad_config, "evaluate needs --truth");
  const FieldSeries truth_series = read_container(a.truth);
  const LatWeights weights = make_lat_weights(truth_series.grid);

  EvalConfig cfg;
  cfg.metrics = split_list(a.metrics);
  cfg.rng_seed = seed;
  cfg.split = "test";
  if (!a.leads.empty()) cfg.leads = parse_int_list(a.leads, "leads");

  ExtremeMaskSeries masks;
  if (a.mask == "extreme") {
    require(!a.extreme_masks.empty(), errc::bad_config,
            "--mask extreme needs --extreme-masks FILE");
    masks = masks_from_series(read_container(a.extreme_masks));
    cfg.mask_source = MaskSource::extreme_masks;
    cfg.extreme_masks = &masks;
    cfg.mask_id = "extreme";
  } else if (a.mask == "nan") {
    cfg.mask_source = MaskSource::nan_derived;
    cfg.mask_id = "nan";
  } else {
    require(a.mask == "none", errc::bad_config, "mask must be none, nan, or extreme");
  }

  if (a.climatology == "train") {
    require(!a.train.empty(), errc::bad_config, "--climatology train needs --train FILE");
    const FieldSeries train_series = read_container(a.train);
    for (std::size_t c = 0; c < train_series.vars.size(); ++c)
      cfg.climatology.emplace_back(train_series.vars[c].name,
                                   temporal_mean(train_series.channel(c), "train-split"));
    cfg.climatology_source = "train";
  } else {
    require(a.climatology == "test", errc::bad_config, "climatology must be test or train");
  }

  MetricReport report;
  if (!a.ensemble.empty()) {
    const EnsemblePredictions ens = read_ensemble(a.ensemble);
    PredictionSet mean_preds;
    mean_preds.n = ens.forecast.n;
    mean_preds.c = 1;
    mean_preds.h = ens.forecast.h;
    mean_preds.w = ens.forecast.w;
    mean_preds.preds = ensemble_mean(ens.forecast);
    mean_preds.lead_hours = ens.lead_hours;
    mean_preds.init_times = ens.init_times;
    mean_preds.channels = {ens.variable};
    const SampleSet truth = build_truth_samples(mean_preds, truth_series);
    report = evaluate_probabilistic(ens.forecast, truth, weights, cfg);
  } else {
    require(!a.preds.empty(), errc::bad_config, "evaluate needs --preds or --ensemble");
    const auto files = split_list(a.preds);
    if (a.protocol == "direct") {
      require(files.size() == 1, errc::bad_config, "direct protocol takes one prediction file");
      const PredictionSet preds = read_predictions(files[0]);
      const SampleSet truth = build_truth_samples(preds, truth_series);
      report = evaluate_direct(preds, truth, weights, cfg);
    } else if (a.protocol == "continuous") {
      if (!a.train_lead_range.empty()) {
        const YearRange r = parse_year_range(a.train_lead_range, "train-lead-range");
        cfg.train_lead_range = {{r.first, r.last}};
      }
      std::vector<PredictionSet> preds;
      std::vector<SampleSet> truths;
      for (const auto& file : files) {
        PredictionSet p = read_predictions(file);
        truths.push_back(build_truth_samples(p, truth_series));
        preds.push_back(std::move(p));
      }
      report = evaluate_continuous(preds, truths, weights, cfg);
    } else {
      fail(errc::bad_config, "protocol must be direct or continuous");
    }
  }

  const auto written = emit_report(report, ReportFormat::json, a.out);
  for (const auto& row : report.rows) {
    std::cout << row.metric << " " << row.variable << " lead=" << row.lead_hours << "h ";
    if (row.defined)
      std::cout << row.value;
    else
      std::cout << "undefined";
    std::cout << "\n";
  }
  std::cout << "wrote " << written[0] << "\n";
  return 0;
}

// --- rollout -----------------------------------------------------------------

struct RolloutArgs {
  std::string model = "persistence";
  std::string model_file;
  std::string init;
  std::string out_prefix = "rollout";
  std::string vars = "t2m";
  std::string static_vars;
  std::string forced_vars;
  std::string offsets = "0";
  int base_hours = 6;
  std::size_t steps = 1;
};

class PersistenceStep : public StepModel {
 public:
  PersistenceStep(std::vector<std::string> vars, std::size_t block)
      : vars_(std::move(vars)), block_(block) {}
  std::vector<std::string> output_vars() const override { return vars_; }
  void predict(const float* input, float* output) const override {
    std::copy(input, input + block_, output);
  }

 private:
  std::vector<std::string> vars_;
  std::size_t block_;
};

class LinregStep : public StepModel {
 public:
  explicit LinregStep(LinearModel model) : model_(std::move(model)) {}
  std::vector<std::string> output_vars() const override { return model_.target_channels; }
  void predict(const float* input, float* output) const override {
    const auto out = linreg_predict_raw(model_, input, 1);
    std::copy(out.begin(), out.end(), output);
  }

 private:
  LinearModel model_;
};

int run_rollout(const RolloutArgs& a) {
  require(!a.init.empty(), errc::bad_config, "rollout needs --init");
  const FieldSeries series = read_container(a.init);
  const auto vars = split_list(a.vars);
  std::vector<std::string> in_vars = vars;
  for (const auto& sv : split_list(a.static_vars)) in_vars.push_back(sv);

  RolloutSpec spec;
  spec.vars = vars;
  spec.offsets_hours = parse_int_list(a.offsets, "offsets");
  spec.static_vars = split_list(a.static_vars);
  spec.base_step_hours = a.base_hours;
  spec.forced_vars = split_list(a.forced_vars);
  spec.truth = &series;

  // Anchors keep stored truth available through the final step (needed when
  // channels are forced from truth).
  const int total_lead = static_cast<int>(a.steps) * a.base_hours;
  const SampleSet init = forecasting_samples(series, spec.offsets_hours, LeadTime{total_lead},
                                             in_vars, vars);

  std::unique_ptr<StepModel> model;
  const std::size_t plane = series.data.h * series.data.w;
  if (a.model == "persistence") {
    std::vector<std::string> required = vars;
    for (const auto& fv : spec.forced_vars) std::erase(required, fv);
    model = std::make_unique<PersistenceStep>(required, required.size() * plane);
  } else if (a.model == "linreg") {
    require(!a.model_file.empty(), errc::bad_config, "linreg rollout needs --model-file");
    model = std::make_unique<LinregStep>(load_linear_model(a.model_file));
  } else {
    fail(errc::bad_config, "rollout model must be persistence or linreg");
  }

  const auto trajectory = rollout(*model, init, spec, a.steps);
  for (std::size_t s = 0; s < trajectory.size(); ++s) {
    const std::string path = a.out_prefix + ".step" + std::to_string(s + 1) + ".clbt";
    write_predictions(trajectory[s], series.grid, path);
    std::cout << "wrote " << path << " (lead " << trajectory[s].lead_hours[0] << "h)\n";
  }
  return 0;
}

// --- report ------------------------------------------------------------------

struct ReportArgs {
  std::string in;
  std::string format = "csv";
  std::string out_prefix = "report";
};

int run_report(const ReportArgs& a) {
  std::ifstream in(a.in);
  require(in.good(), errc::io_failure, "cannot open '" + a.in + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const MetricReport report = report_from_json(text);
  ReportFormat format;
  if (a.format == "json")
    format = ReportFormat::json;
  else if (a.format == "csv")
    format = ReportFormat::csv;
  else if (a.format == "maps")
    format = ReportFormat::maps;
  else
    fail(errc::bad_config, "format must be json, csv, or maps");
  const auto written = emit_report(report, format, a.out_prefix);
  for (const auto& f : written) std::cout << "wrote " << f << "\n";
  return 0;
}

// --- config file injection ---------------------------------------------------

// Flat key=value lines with # comments; keys match long option names without
// the leading dashes. Flags given on the command line override the file.
std::vector<std::string> load_config_args(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io_failure, "cannot open config '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    require(eq != std::string::npos && eq > 0, errc::bad_config,
            path + ":" + std::to_string(lineno) + ": expected key=value");
    args.push_back("--" + line.substr(0, eq) + "=" + line.substr(eq + 1));
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clbench: benchmarking engine for gridded weather and climate data"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string config_path;
  app.add_option("--seed", seed, "Root RNG seed; all randomness derives from it");
  app.add_option("--threads", threads, "Worker thread cap (0 = all cores)");
  app.add_option("--config", config_path, "key=value config file; CLI flags override");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Seeded AR(1)-in-time synthetic data");
  gen_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  gen_cmd->add_option("--out", gen.out, "Output container")->required();
  gen_cmd->add_option("--steps", gen.steps, "Timesteps");
  gen_cmd->add_option("--resolution", gen.resolution, "Grid resolution in degrees");
  gen_cmd->add_option("--vars", gen.vars, "Comma-separated variable names");
  gen_cmd->add_option("--static-vars", gen.static_vars, "Comma-separated static fields");
  gen_cmd->add_option("--ar1", gen.ar1, "Per-step autocorrelation");
  gen_cmd->add_option("--std", gen.stddev, "Stationary per-pixel stddev");
  gen_cmd->add_option("--mean", gen.mean, "Stationary mean");
  gen_cmd->add_option("--smooth", gen.smooth, "Spatial smoothing radius (0 = white)");
  gen_cmd->add_option("--start-unix", gen.start_unix, "First timestamp (unix seconds)");
  gen_cmd->add_option("--step-hours", gen.step_hours, "Step between timestamps");

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert CSV-grid or raw f32 to CLBT");
  ingest_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  ingest_cmd->add_option("--format", ingest.format, "csv | raw");
  ingest_cmd->add_option("--in", ingest.in, "Input file")->required();
  ingest_cmd->add_option("--out", ingest.out, "Output container")->required();
  ingest_cmd->add_option("--var", ingest.var, "Variable name (csv)");
  ingest_cmd->add_option("--vars", ingest.vars, "Comma-separated names (raw)");
  ingest_cmd->add_option("--resolution", ingest.resolution, "Grid resolution in degrees");
  ingest_cmd->add_option("--start-unix", ingest.start_unix, "First timestamp (raw)");
  ingest_cmd->add_option("--step-seconds", ingest.step_seconds, "Step (raw)");
  ingest_cmd->add_option("--stride", ingest.stride,
                         "Temporal subsampling: keep every Nth timestep");

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Training-split normalization statistics");
  stats_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  stats_cmd->add_option("--in", stats.in, "Input container")->required();
  stats_cmd->add_option("--train", stats.train, "Training years FIRST:LAST");
  stats_cmd->add_option("--out", stats.out, "Optional stats JSON path");

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "Chronological train/val/test split");
  split_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  split_cmd->add_option("--in", split.in, "Input container")->required();
  split_cmd->add_option("--out-prefix", split.out_prefix, "Output prefix")->required();
  split_cmd->add_option("--train", split.train, "Years FIRST:LAST");
  split_cmd->add_option("--val", split.val, "Years FIRST:LAST");
  split_cmd->add_option("--test", split.test, "Years FIRST:LAST");

  RegridArgs regrid_args;
  auto* regrid_cmd = app.add_subcommand("regrid", "Spatial resampling");
  regrid_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  regrid_cmd->add_option("--in", regrid_args.in, "Input container")->required();
  regrid_cmd->add_option("--out", regrid_args.out, "Output container")->required();
  regrid_cmd->add_option("--scheme", regrid_args.scheme, "nearest | bilinear");
  regrid_cmd->add_option("--to", regrid_args.to, "Target resolution in degrees");

  CropArgs crop_args;
  auto* crop_cmd = app.add_subcommand("crop", "Geographic crop");
  crop_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  crop_cmd->add_option("--in", crop_args.in, "Input container")->required();
  crop_cmd->add_option("--out", crop_args.out, "Output container")->required();
  crop_cmd->add_option("--region", crop_args.region, "Named region (conus)");
  crop_cmd->add_option("--lat-min", crop_args.lat_min, "Degrees");
  crop_cmd->add_option("--lat-max", crop_args.lat_max, "Degrees");
  crop_cmd->add_option("--lon-min", crop_args.lon_min, "Degrees");
  crop_cmd->add_option("--lon-max", crop_args.lon_max, "Degrees");

  ThresholdArgs th_args;
  auto* th_cmd = app.add_subcommand("extreme-thresholds",
                                    "Per-pixel percentile thresholds of the localized mean");
  th_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  th_cmd->add_option("--in", th_args.in, "Training-split container")->required();
  th_cmd->add_option("--out", th_args.out, "Threshold container")->required();
  th_cmd->add_option("--var", th_args.var, "Variable");
  th_cmd->add_option("--window-days", th_args.window_days, "Trailing window");
  th_cmd->add_option("--min-samples", th_args.min_samples, "Per-pixel sample floor");
  th_cmd->add_flag("--renormalize-stencil", th_args.renormalize,
                   "Divide blend weights by their 0.988 sum");

  MaskArgs mask_args;
  auto* mask_cmd = app.add_subcommand("extreme-masks", "Boolean evaluation masks");
  mask_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  mask_cmd->add_option("--in", mask_args.in, "Series incl. trailing context")->required();
  mask_cmd->add_option("--thresholds", mask_args.thresholds, "Threshold container")->required();
  mask_cmd->add_option("--out", mask_args.out, "Mask container")->required();
  mask_cmd->add_option("--var", mask_args.var, "Variable");
  mask_cmd->add_option("--test-years", mask_args.test_years, "Restrict masks to FIRST:LAST");
  mask_cmd->add_option("--window-days", mask_args.window_days, "Trailing window");
  mask_cmd->add_flag("--renormalize-stencil", mask_args.renormalize,
                     "Divide blend weights by their 0.988 sum");
  mask_cmd->add_flag("--inclusive-bounds", mask_args.inclusive,
                     "Treat threshold-equal values as extreme");

  BaselineArgs base_args;
  auto* base_cmd = app.add_subcommand("baseline", "Traditional baselines");
  base_cmd->require_subcommand(1);
  auto add_baseline_opts = [&](CLI::App* cmd) {
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--model", base_args.model, "climatology | persistence | linreg | interp")
        ->required();
    cmd->add_option("--train", base_args.train, "Training container (fit)");
    cmd->add_option("--in", base_args.in, "Evaluation container (predict)");
    cmd->add_option("--out", base_args.out, "Output path")->required();
    cmd->add_option("--model-file", base_args.model_file, "Fitted model path");
    cmd->add_option("--in-vars", base_args.in_vars, "Input variables (default: out-vars)");
    cmd->add_option("--out-vars", base_args.out_vars, "Output variables");
    cmd->add_option("--offsets", base_args.offsets, "History offsets in hours, e.g. 0,-6,-12");
    cmd->add_option("--anchor-years", base_args.anchor_years,
                    "Restrict sample anchors to FIRST:LAST; history windows may "
                    "consume context before the range");
    cmd->add_option("--lead", base_args.lead, "Lead time in hours");
    cmd->add_option("--stencil", base_args.stencil, "linreg local stencil size (odd)");
    cmd->add_flag("--global", base_args.global_mode, "linreg global flattened mode");
    cmd->add_option("--ridge", base_args.ridge, "linreg ridge strength");
    cmd->add_option("--scheme", base_args.scheme, "interp: nearest | bilinear");
    cmd->add_option("--to", base_args.to, "interp: target resolution in degrees");
  };
  auto* fit_cmd = base_cmd->add_subcommand("fit", "Fit a baseline model");
  add_baseline_opts(fit_cmd);
  auto* predict_cmd = base_cmd->add_subcommand("predict", "Write a prediction container");
  add_baseline_opts(predict_cmd);

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score prediction files against truth");
  eval_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  eval_cmd->add_option("--protocol", eval_args.protocol, "direct | continuous");
  eval_cmd->add_option("--preds", eval_args.preds, "Prediction container(s), comma-separated");
  eval_cmd->add_option("--ensemble", eval_args.ensemble, "Ensemble container (probabilistic)");
  eval_cmd->add_option("--truth", eval_args.truth, "Truth series container")->required();
  eval_cmd->add_option("--metrics", eval_args.metrics, "Comma list: rmse,acc,bias,pearson,...");
  eval_cmd->add_option("--mask", eval_args.mask, "none | nan | extreme");
  eval_cmd->add_option("--extreme-masks", eval_args.extreme_masks, "Mask container");
  eval_cmd->add_option("--climatology", eval_args.climatology, "ACC reference: test | train");
  eval_cmd->add_option("--train", eval_args.train, "Train series for --climatology train");
  eval_cmd->add_option("--train-lead-range", eval_args.train_lead_range,
                       "Continuous training range LO:HI hours");
  eval_cmd->add_option("--leads", eval_args.leads,
                       "Evaluate only these lead hours (comma list)");
  eval_cmd->add_option("--out", eval_args.out, "Report path prefix");

  RolloutArgs roll_args;
  auto* roll_cmd = app.add_subcommand("rollout", "Iterative forecasting");
  roll_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  roll_cmd->add_option("--model", roll_args.model, "persistence | linreg");
  roll_cmd->add_option("--model-file", roll_args.model_file, "Fitted model (linreg)");
  roll_cmd->add_option("--init", roll_args.init, "Series providing initial conditions")
      ->required();
  roll_cmd->add_option("--steps", roll_args.steps, "Rollout steps")->required();
  roll_cmd->add_option("--out-prefix", roll_args.out_prefix, "Per-step output prefix");
  roll_cmd->add_option("--vars", roll_args.vars, "Predicted variables");
  roll_cmd->add_option("--static-vars", roll_args.static_vars, "Static channels");
  roll_cmd->add_option("--forced-vars", roll_args.forced_vars,
                       "Channels re-read from truth each step");
  roll_cmd->add_option("--offsets", roll_args.offsets, "History offsets in hours");
  roll_cmd->add_option("--base-hours", roll_args.base_hours, "Base step in hours");

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Re-emit a report as json, csv, or maps");
  report_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  report_cmd->add_option("--in", report_args.in, "Report JSON")->required();
  report_cmd->add_option("--format", report_args.format, "json | csv | maps");
  report_cmd->add_option("--out-prefix", report_args.out_prefix, "Output prefix");

  // Global flags (--seed, --threads, --config) are accepted after the
  // subcommand as well.
  for (CLI::App* sub : app.get_subcommands({})) {
    sub->fallthrough();
    for (CLI::App* nested : sub->get_subcommands({})) nested->fallthrough();
  }

  // Inject config-file arguments before the command-line ones so explicit
  // flags win under the take-last policy.
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string value;
      if (args[i] == "--config" && i + 1 < args.size())
        value = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0)
        value = args[i].substr(9);
      else
        continue;
      const auto injected = load_config_args(value);
      // Insert right after the leading subcommand tokens.
      std::size_t insert_at = 0;
      while (insert_at < args.size() && !args[insert_at].empty() && args[insert_at][0] != '-')
        ++insert_at;
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), injected.begin(),
                  injected.end());
      break;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    std::vector<const char*> argv2;
    argv2.push_back(argc > 0 ? argv[0] : "clbench");
    for (const auto& s : args) argv2.push_back(s.c_str());
    app.parse(static_cast<int>(argv2.size()), const_cast<char**>(argv2.data()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (threads == 0) {
    if (const char* env = std::getenv("CLBENCH_THREADS"))
      threads = std::strtoull(env, nullptr, 10);
  }
  set_max_threads(threads);

  try {
    if (gen_cmd->parsed()) {
      ConfigEcho echo("gen-synthetic");
      echo.add("out", gen.out);
      echo.add("steps", gen.steps);
      echo.add("resolution", gen.resolution);
      echo.add("vars", gen.vars);
      echo.add("static-vars", gen.static_vars);
      echo.add("ar1", gen.ar1);
      echo.add("std", gen.stddev);
      echo.add("mean", gen.mean);
      echo.add("smooth", gen.smooth);
      echo.add("start-unix", gen.start_unix);
      echo.add("step-hours", gen.step_hours);
      echo.add("seed", seed);
      echo.add("threads", threads);
      echo.print();
      return run_gen(gen, seed);
    }
    if (ingest_cmd->parsed()) {
      ConfigEcho echo("ingest");
      echo.add("format", ingest.format);
      echo.add("in", ingest.in);
      echo.add("out", ingest.out);
      echo.add("var", ingest.var);
      echo.add("vars", ingest.vars);
      echo.add("resolution", ingest.resolution);
      echo.add("start-unix", ingest.start_unix);
      echo.add("step-seconds", ingest.step_seconds);
      echo.add("stride", ingest.stride);
      echo.print();
      return run_ingest(ingest);
    }
    if (stats_cmd->parsed()) {
      ConfigEcho echo("stats");
      echo.add("in", stats.in);
      echo.add("train", stats.train);
      echo.add("out", stats.out);
      echo.print();
      return run_stats(stats);
    }
    if (split_cmd->parsed()) {
      ConfigEcho echo("split");
      echo.add("in", split.in);
      echo.add("out-prefix", split.out_prefix);
      echo.add("train", split.train);
      echo.add("val", split.val);
      echo.add("test", split.test);
      echo.print();
      return run_split(split);
    }
    if (regrid_cmd->parsed()) {
      ConfigEcho echo("regrid");
      echo.add("in", regrid_args.in);
      echo.add("out", regrid_args.out);
      echo.add("scheme", regrid_args.scheme);
      echo.add("to", regrid_args.to);
      echo.add("threads", threads);
      echo.print();
      return run_regrid(regrid_args);
    }
    if (crop_cmd->parsed()) {
      ConfigEcho echo("crop");
      echo.add("in", crop_args.in);
      echo.add("out", crop_args.out);
      echo.add("region", crop_args.region);
      echo.add("lat-min", crop_args.lat_min);
      echo.add("lat-max", crop_args.lat_max);
      echo.add("lon-min", crop_args.lon_min);
      echo.add("lon-max", crop_args.lon_max);
      echo.print();
      return run_crop(crop_args);
    }
    if (th_cmd->parsed()) {
      ConfigEcho echo("extreme-thresholds");
      echo.add("in", th_args.in);
      echo.add("out", th_args.out);
      echo.add("var", th_args.var);
      echo.add("window-days", th_args.window_days);
      echo.add("min-samples", th_args.min_samples);
      echo.add("renormalize-stencil", th_args.renormalize);
      echo.add("threads", threads);
      echo.print();
      return run_thresholds(th_args);
    }
    if (mask_cmd->parsed()) {
      ConfigEcho echo("extreme-masks");
      echo.add("in", mask_args.in);
      echo.add("thresholds", mask_args.thresholds);
      echo.add("out", mask_args.out);
      echo.add("var", mask_args.var);
      echo.add("test-years", mask_args.test_years);
      echo.add("window-days", mask_args.window_days);
      echo.add("renormalize-stencil", mask_args.renormalize);
      echo.add("inclusive-bounds", mask_args.inclusive);
      echo.print();
      return run_masks(mask_args);
    }
    if (base_cmd->parsed()) {
      const bool fitting = fit_cmd->parsed();
      ConfigEcho echo(fitting ? "baseline fit" : "baseline predict");
      echo.add("model", base_args.model);
      echo.add("train", base_args.train);
      echo.add("in", base_args.in);
      echo.add("out", base_args.out);
      echo.add("model-file", base_args.model_file);
      echo.add("in-vars", base_args.in_vars);
      echo.add("out-vars", base_args.out_vars);
      echo.add("offsets", base_args.offsets);
      echo.add("anchor-years", base_args.anchor_years);
      echo.add("lead", base_args.lead);
      echo.add("stencil", base_args.stencil);
      echo.add("global", base_args.global_mode);
      echo.add("ridge", base_args.ridge);
      echo.add("scheme", base_args.scheme);
      echo.add("to", base_args.to);
      echo.add("threads", threads);
      echo.print();
      return fitting ? run_baseline_fit(base_args) : run_baseline_predict(base_args);
    }
    if (eval_cmd->parsed()) {
      ConfigEcho echo("evaluate");
      echo.add("protocol", eval_args.protocol);
      echo.add("preds", eval_args.preds);
      echo.add("ensemble", eval_args.ensemble);
      echo.add("truth", eval_args.truth);
      echo.add("metrics", eval_args.metrics);
      echo.add("mask", eval_args.mask);
      echo.add("extreme-masks", eval_args.extreme_masks);
      echo.add("climatology", eval_args.climatology);
      echo.add("train", eval_args.train);
      echo.add("train-lead-range", eval_args.train_lead_range);
      echo.add("leads", eval_args.leads);
      echo.add("out", eval_args.out);
      echo.add("seed", seed);
      echo.print();
      return run_evaluate(eval_args, seed);
    }
    if (roll_cmd->parsed()) {
      ConfigEcho echo("rollout");
      echo.add("model", roll_args.model);
      echo.add("model-file", roll_args.model_file);
      echo.add("init", roll_args.init);
      echo.add("steps", roll_args.steps);
      echo.add("out-prefix", roll_args.out_prefix);
      echo.add("vars", roll_args.vars);
      echo.add("static-vars", roll_args.static_vars);
      echo.add("forced-vars", roll_args.forced_vars);
      echo.add("offsets", roll_args.offsets);
      echo.add("base-hours", roll_args.base_hours);
      echo.print();
      return run_rollout(roll_args);
    }
    if (report_cmd->parsed()) {
      ConfigEcho echo("report");
      echo.add("in", report_args.in);
      echo.add("format", report_args.format);
      echo.add("out-prefix", report_args.out_prefix);
      echo.print();
      return run_report(report_args);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
