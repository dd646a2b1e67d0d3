#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clbench/grid.hpp"
#include "clbench/metrics.hpp"
#include "clbench/regrid.hpp"
#include "clbench/sampler.hpp"
#include "clbench/store.hpp"

namespace clbench {

/// Climatology baseline: per-pixel temporal mean over the entire training
/// set, one map per output variable. Predictions ignore the inputs.
struct ClimatologyModel {
  Grid grid;
  std::vector<std::string> vars;
  std::vector<ClimatologyMap> maps;
};

ClimatologyModel climatology_forecast(const FieldSeries& train_series,
                                      const std::vector<std::string>& out_vars);

/// Repeats the climatology maps for n timestamps: n * |vars| * h * w.
std::vector<float> climatology_predict(const ClimatologyModel& model, std::size_t n);

/// Persistence baseline: each output variable copies its offset-0 input
/// channel ("var@0h", falling back to a bare "var" channel).
std::vector<float> persistence_forecast(const SampleSet& samples,
                                        const std::vector<std::string>& out_vars);

// --- Linear regression -------------------------------------------------------

struct LinregConfig {
  enum class Mode { local_stencil, global };
  Mode mode = Mode::local_stencil;
  std::size_t stencil = 3;  // odd k: features are all input channels over k x k
  double ridge_lambda = 0.0;
  /// Latitude-weighted squared-error loss; for a fixed output pixel the
  /// weight rescales the effective ridge strength to lambda / L(i).
  bool lat_weighted_loss = true;
  double cg_tol = 1e-8;        // relative normal-equation residual, global mode
  std::size_t cg_max_iters = 50000;
};

struct LinearModel {
  LinregConfig config;
  std::size_t c_in = 0, h = 0, w = 0, c_out = 0;
  bool periodic_lon = true;
  std::vector<std::string> input_channels;
  std::vector<std::string> target_channels;
  /// local mode: coef[(pixel * c_out + co) * F + f], F = c_in*k*k + 1;
  /// global mode: coef[dim * F + f], dim over c_out*h*w, F = c_in*h*w + 1.
  /// The last feature is an explicit constant (intercept), left out of the
  /// ridge penalty so the large-lambda limit predicts the fitted intercept.
  std::vector<double> coef;

  std::size_t features() const {
    return config.mode == LinregConfig::Mode::local_stencil
               ? c_in * config.stencil * config.stencil + 1
               : c_in * h * w + 1;
  }
};

/// Fits one ridge regression per output pixel (local-stencil mode, normal
/// equations) or one flattened regression per output dimension solved by
/// conjugate gradient (global mode). Requires square input/target grids of
/// identical shape.
LinearModel linreg_fit(const SampleSet& samples, const LatWeights& weights,
                       const LinregConfig& config = {});

std::vector<float> linreg_predict(const LinearModel& model, const SampleSet& samples);
std::vector<float> linreg_predict_raw(const LinearModel& model, const float* inputs,
                                      std::size_t n);

// Versioned binary record (magic "CLLM", binary64 coefficients).
void save_linear_model(const LinearModel& model, const std::string& path);
LinearModel load_linear_model(const std::string& path);

/// Interpolation downscaling baseline; also the pre-processing step applied
/// before learned downscalers. Returns n * c * target_h * target_w.
std::vector<float> interp_downscale(const SampleSet& samples, const Grid& src_grid,
                                    const Grid& target, InterpScheme scheme);

}  // namespace clbench
