#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clbench/grid.hpp"
#include "clbench/tensor.hpp"

#include "json.hpp"

namespace clbench {

struct VariableMeta {
  std::string name;
  std::string units;
  std::string level;  // pressure level in hPa, or "surface" / "static"
  bool is_static = false;

  bool operator==(const VariableMeta&) const = default;
};

/// Time-indexed stack of named gridded variables, shape T x C x H x W.
/// Timestamps are uniform: time(i) = time_start_unix + i * time_step_seconds.
/// Static variables are replicated across every time slice; the is_static
/// flag lets consumers skip re-reading them. Immutable after load.
struct FieldSeries {
  Grid grid;
  std::vector<VariableMeta> vars;
  std::int64_t time_start_unix = 0;
  std::int64_t time_step_seconds = 1;
  Tensor4 data;  // t = |times|, c = |vars|
  nlohmann::json extra = nlohmann::json::object();  // extra header keys, preserved verbatim

  std::size_t n_times() const { return data.t; }
  std::int64_t time(std::size_t i) const {
    return time_start_unix + static_cast<std::int64_t>(i) * time_step_seconds;
  }
  CubeView channel(std::size_t c) const { return data.channel(c); }

  /// Index of the named variable; throws missing-variable if absent.
  std::size_t var_index(const std::string& name) const;
  bool has_var(const std::string& name) const;

  /// Checks type invariants (dims consistent, times uniform by construction,
  /// static slices identical across time). Throws Error on violation.
  void validate() const;
};

/// Per-channel normalization statistics, computed from the training split
/// only and applied to every split.
struct NormStats {
  std::vector<std::string> channels;
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct YearRange {
  int first = 0, last = 0;  // inclusive civil years (UTC)
  bool contains(int y) const { return y >= first && y <= last; }
};

struct SplitSpec {
  YearRange train, val, test;
};

struct SplitSeries {
  FieldSeries train, val, test;
};

// --- CLBT v1 container ------------------------------------------------------
//
// Little-endian layout:
//   magic  0x43 0x4C 0x42 0x54 ("CLBT")
//   u16    version (= 1)
//   u32    header_len
//   bytes  UTF-8 JSON header: {dims:[T,C,H,W], vars:[{name,units,level,static}],
//          lats:[...], lons:[...], periodic_lon:bool, time_start_unix:int,
//          time_step_seconds:int, dtype:"f32"} plus any extra keys
//   bytes  row-major T*C*H*W IEEE-754 binary32 payload (NaN permitted)
//   u32    CRC32 of the payload

FieldSeries read_container(const std::string& path);
void write_container(const FieldSeries& series, const std::string& path);

NormStats compute_norm_stats(const FieldSeries& series, const SplitSpec& split);
FieldSeries normalize(const FieldSeries& series, const NormStats& stats);
FieldSeries denormalize(const FieldSeries& series, const NormStats& stats);

SplitSeries split_by_years(const FieldSeries& series, const SplitSpec& spec);

/// Contiguous [first, last] time-index slice of a series.
FieldSeries slice_time(const FieldSeries& series, std::size_t first, std::size_t last);

// Civil-calendar helpers (proleptic Gregorian, UTC).
int year_of_unix(std::int64_t t);
std::int64_t unix_from_ymd(int year, int month, int day);

std::uint32_t crc32(const void* data, std::size_t len);

}  // namespace clbench
