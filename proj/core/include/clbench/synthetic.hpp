#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clbench/store.hpp"

namespace clbench {

/// Seeded synthetic weather-like data: per pixel an exact AR(1) process in
/// time, spatially smoothed innovations on the (lat, lon) torus. The
/// smoothing kernel is normalized to unit sum of squares, so every pixel
/// keeps the exact stationary marginal N(mean, stddev^2) and the persistence
/// error closed form sqrt(2 (1 - ar1^k)) * stddev holds per construction.
struct SyntheticConfig {
  std::size_t n_steps = 128;
  double resolution_deg = 5.625;
  std::vector<std::string> vars = {"t2m"};
  std::vector<std::string> static_vars;  // fixed smooth fields (e.g. orography stand-ins)
  double ar1 = 0.9;       // per-step autocorrelation in (-1, 1)
  double stddev = 1.0;    // stationary per-pixel standard deviation
  double mean = 0.0;
  std::size_t smooth_radius = 1;  // 0 = spatially white
  std::int64_t start_unix = 283996800;  // 1979-01-01T00:00:00Z
  std::int64_t step_seconds = 6 * 3600;
  std::uint64_t seed = 0;
};

FieldSeries gen_synthetic(const SyntheticConfig& cfg);

}  // namespace clbench
