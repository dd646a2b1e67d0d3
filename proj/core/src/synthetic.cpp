#include "clbench/synthetic.hpp"

#include <cmath>

#include "clbench/error.hpp"
#include "clbench/rng.hpp"

namespace clbench {

namespace {

// Torus convolution of white noise with a kernel of unit sum-of-squares:
// smooth in space, exactly unit variance per pixel.
struct Smoother {
  std::size_t radius;
  std::vector<double> kernel;  // (2r+1)^2

  explicit Smoother(std::size_t r) : radius(r) {
    const std::size_t k = 2 * r + 1;
    kernel.resize(k * k);
    const double sigma = r == 0 ? 1.0 : static_cast<double>(r) / 1.5;
    double sumsq = 0.0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        const double di = static_cast<double>(a) - static_cast<double>(r);
        const double dj = static_cast<double>(b) - static_cast<double>(r);
        const double g = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
        kernel[a * k + b] = g;
        sumsq += g * g;
      }
    const double norm = std::sqrt(sumsq);
    for (double& g : kernel) g /= norm;
  }

  void apply(const std::vector<double>& white, std::size_t h, std::size_t w,
             std::vector<double>& out) const {
    if (radius == 0) {
      out = white;
      return;
    }
    const std::size_t k = 2 * radius + 1;
    out.assign(h * w, 0.0);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j) {
        double acc = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
          const std::size_t ii = (i + h + a - radius) % h;
          for (std::size_t b = 0; b < k; ++b) {
            const std::size_t jj = (j + w + b - radius) % w;
            acc += kernel[a * k + b] * white[ii * w + jj];
          }
        }
        out[i * w + j] = acc;
      }
  }
};

}  // namespace

FieldSeries gen_synthetic(const SyntheticConfig& cfg) {
  require(cfg.n_steps >= 1, errc::bad_config, "need at least one timestep");
  require(std::abs(cfg.ar1) < 1.0, errc::bad_config, "ar1 must lie in (-1, 1)");
  require(cfg.stddev > 0.0, errc::bad_config, "stddev must be positive");
  require(!cfg.vars.empty(), errc::bad_config, "need at least one variable");

  FieldSeries out;
  out.grid = grid_from_resolution(cfg.resolution_deg);
  const std::size_t h = out.grid.h(), w = out.grid.w(), plane = h * w;

  for (const auto& v : cfg.vars) out.vars.push_back({v, "", "surface", false});
  for (const auto& v : cfg.static_vars) out.vars.push_back({v, "", "static", true});
  out.time_start_unix = cfg.start_unix;
  out.time_step_seconds = cfg.step_seconds;
  const std::size_t c_total = out.vars.size();
  out.data = Tensor4(cfg.n_steps, c_total, h, w);

  const Smoother smoother(cfg.smooth_radius);
  const double innovation_sd = cfg.stddev * std::sqrt(1.0 - cfg.ar1 * cfg.ar1);

  Rng root(cfg.seed);
  std::vector<double> white(plane), smooth(plane), state(plane);

  for (std::size_t v = 0; v < cfg.vars.size(); ++v) {
    Rng rng = root.stream("var/" + cfg.vars[v]);
    // Stationary init, then the AR(1) recursion.
    for (std::size_t p = 0; p < plane; ++p) white[p] = rng.normal();
    smoother.apply(white, h, w, smooth);
    for (std::size_t p = 0; p < plane; ++p) state[p] = cfg.mean + cfg.stddev * smooth[p];
    for (std::size_t k = 0; k < cfg.n_steps; ++k) {
      if (k > 0) {
        for (std::size_t p = 0; p < plane; ++p) white[p] = rng.normal();
        smoother.apply(white, h, w, smooth);
        for (std::size_t p = 0; p < plane; ++p)
          state[p] = cfg.mean + cfg.ar1 * (state[p] - cfg.mean) + innovation_sd * smooth[p];
      }
      float* slab = out.data.v.data() + (k * c_total + v) * plane;
      for (std::size_t p = 0; p < plane; ++p) slab[p] = static_cast<float>(state[p]);
    }
  }

  for (std::size_t v = 0; v < cfg.static_vars.size(); ++v) {
    Rng rng = root.stream("static/" + cfg.static_vars[v]);
    for (std::size_t p = 0; p < plane; ++p) white[p] = rng.normal();
    smoother.apply(white, h, w, smooth);
    const std::size_t c = cfg.vars.size() + v;
    for (std::size_t k = 0; k < cfg.n_steps; ++k) {
      float* slab = out.data.v.data() + (k * c_total + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) slab[p] = static_cast<float>(smooth[p]);
    }
  }
  return out;
}

}  // namespace clbench
