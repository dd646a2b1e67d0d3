#include "clbench/store.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "clbench/error.hpp"

namespace clbench {

namespace {

constexpr std::array<unsigned char, 4> kMagic = {0x43, 0x4C, 0x42, 0x54};  // "CLBT"
constexpr std::uint16_t kVersion = 1;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

const char* const kOwnKeys[] = {"dims",         "vars",           "lats",
                                "lons",         "periodic_lon",   "time_start_unix",
                                "time_step_seconds", "dtype"};

bool is_own_key(const std::string& k) {
  for (const char* key : kOwnKeys)
    if (k == key) return true;
  return false;
}

}  // namespace

std::uint32_t crc32(const void* data, std::size_t len) {
  // CRC-32 (IEEE 802.3), reflected, poly 0xEDB88320.
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

// Days-based civil calendar conversion (Howard Hinnant's algorithms).
static std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                       static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

static int year_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return y + (m <= 2);
}

int year_of_unix(std::int64_t t) {
  std::int64_t days = t / 86400;
  if (t < 0 && t % 86400 != 0) --days;
  return year_from_days(days);
}

std::int64_t unix_from_ymd(int year, int month, int day) {
  return days_from_civil(year, month, day) * 86400;
}

std::size_t FieldSeries::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return i;
  fail(errc::missing_variable, "variable '" + name + "' not in series");
}

bool FieldSeries::has_var(const std::string& name) const {
  for (const auto& v : vars)
    if (v.name == name) return true;
  return false;
}

void FieldSeries::validate() const {
  grid.validate();
  require(!vars.empty(), errc::invariant_violation, "series has no variables");
  require(data.c == vars.size() && data.h == grid.h() && data.w == grid.w(),
          errc::dimension_mismatch, "data dims inconsistent with grid/variable count");
  require(data.t >= 1, errc::invariant_violation, "series has no timestamps");
  require(time_step_seconds > 0, errc::invariant_violation, "time step must be positive");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::size_t j = i + 1;
    for (; j < vars.size(); ++j)
      require(vars[i].name != vars[j].name, errc::invariant_violation,
              "duplicate variable '" + vars[i].name + "'");
  }
  const std::size_t plane = data.h * data.w;
  for (std::size_t c = 0; c < vars.size(); ++c) {
    if (!vars[c].is_static) continue;
    const float* first = data.v.data() + c * plane;
    for (std::size_t k = 1; k < data.t; ++k) {
      const float* slab = data.v.data() + (k * data.c + c) * plane;
      require(std::memcmp(first, slab, plane * sizeof(float)) == 0, errc::invariant_violation,
              "static variable '" + vars[c].name + "' varies over time");
    }
  }
}

void write_container(const FieldSeries& series, const std::string& path) {
  series.validate();

  nlohmann::json header;
  header["dims"] = {series.data.t, series.data.c, series.data.h, series.data.w};
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : series.vars)
    vars.push_back({{"name", v.name}, {"units", v.units}, {"level", v.level}, {"static", v.is_static}});
  header["vars"] = std::move(vars);
  header["lats"] = series.grid.lats;
  header["lons"] = series.grid.lons;
  header["periodic_lon"] = series.grid.periodic_lon;
  header["time_start_unix"] = series.time_start_unix;
  header["time_step_seconds"] = series.time_step_seconds;
  header["dtype"] = "f32";
  for (auto it = series.extra.begin(); it != series.extra.end(); ++it)
    header[it.key()] = it.value();

  const std::string header_str = header.dump();

  std::string prefix;
  prefix.append(reinterpret_cast<const char*>(kMagic.data()), kMagic.size());
  put_u16(prefix, kVersion);
  put_u32(prefix, static_cast<std::uint32_t>(header_str.size()));

  const std::size_t payload_bytes = series.data.size() * sizeof(float);
  const std::uint32_t crc = crc32(series.data.v.data(), payload_bytes);
  std::string suffix;
  put_u32(suffix, crc);

  FilePtr f(std::fopen(path.c_str(), "wb"));
  require(f != nullptr, errc::io_failure, "cannot open '" + path + "' for writing");
  auto write_all = [&](const void* p, std::size_t n) {
    require(std::fwrite(p, 1, n, f.get()) == n, errc::io_failure, "short write to '" + path + "'");
  };
  write_all(prefix.data(), prefix.size());
  write_all(header_str.data(), header_str.size());
  write_all(series.data.v.data(), payload_bytes);
  write_all(suffix.data(), suffix.size());
  require(std::fflush(f.get()) == 0, errc::io_failure, "flush failed for '" + path + "'");
}

FieldSeries read_container(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  require(f != nullptr, errc::io_failure, "cannot open '" + path + "'");

  std::array<unsigned char, 10> head{};
  require(std::fread(head.data(), 1, head.size(), f.get()) == head.size(),
          errc::truncated_payload, "file shorter than fixed header");
  require(std::memcmp(head.data(), kMagic.data(), 4) == 0, errc::bad_magic,
          "'" + path + "' is not a CLBT container");
  const std::uint16_t version = get_u16(head.data() + 4);
  require(version == kVersion, errc::unsupported_version,
          "container version " + std::to_string(version));
  const std::uint32_t header_len = get_u32(head.data() + 6);
  require(header_len <= (64u << 20), errc::truncated_payload,
          "header length " + std::to_string(header_len) + " is implausible");

  std::string header_str(header_len, '\0');
  require(std::fread(header_str.data(), 1, header_len, f.get()) == header_len,
          errc::truncated_payload, "header shorter than header_len");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_str);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::truncated_payload, std::string("header JSON parse failed: ") + e.what());
  }

  FieldSeries out;
  try {
    const auto& dims = header.at("dims");
    require(dims.is_array() && dims.size() == 4, errc::dimension_mismatch,
            "dims must have 4 entries");
    out.data.t = dims[0].get<std::size_t>();
    out.data.c = dims[1].get<std::size_t>();
    out.data.h = dims[2].get<std::size_t>();
    out.data.w = dims[3].get<std::size_t>();
    for (const auto& v : header.at("vars")) {
      VariableMeta m;
      m.name = v.at("name").get<std::string>();
      m.units = v.value("units", "");
      m.level = v.value("level", "surface");
      m.is_static = v.value("static", false);
      out.vars.push_back(std::move(m));
    }
    out.grid.lats = header.at("lats").get<std::vector<double>>();
    out.grid.lons = header.at("lons").get<std::vector<double>>();
    out.grid.periodic_lon = header.at("periodic_lon").get<bool>();
    out.time_start_unix = header.at("time_start_unix").get<std::int64_t>();
    out.time_step_seconds = header.at("time_step_seconds").get<std::int64_t>();
    require(header.at("dtype").get<std::string>() == "f32", errc::unsupported_version,
            "unsupported dtype");
  } catch (const nlohmann::json::exception& e) {
    fail(errc::dimension_mismatch, std::string("malformed header: ") + e.what());
  }
  for (auto it = header.begin(); it != header.end(); ++it)
    if (!is_own_key(it.key())) out.extra[it.key()] = it.value();

  require(out.data.c == out.vars.size(), errc::dimension_mismatch,
          "dims channel count disagrees with vars list");
  require(out.data.h == out.grid.h() && out.data.w == out.grid.w(), errc::dimension_mismatch,
          "dims disagree with coordinate lengths");

  const std::size_t count = out.data.t * out.data.c * out.data.h * out.data.w;
  out.data.v.resize(count);
  const std::size_t payload_bytes = count * sizeof(float);
  require(std::fread(out.data.v.data(), 1, payload_bytes, f.get()) == payload_bytes,
          errc::truncated_payload, "payload shorter than dims require");

  std::array<unsigned char, 4> tail{};
  require(std::fread(tail.data(), 1, 4, f.get()) == 4, errc::truncated_payload,
          "missing payload checksum");
  const std::uint32_t stored = get_u32(tail.data());
  const std::uint32_t actual = crc32(out.data.v.data(), payload_bytes);
  require(stored == actual, errc::checksum_mismatch, "payload CRC32 mismatch");

  // Exactly at EOF: trailing bytes mean the dims undercount the payload.
  unsigned char extra_byte;
  require(std::fread(&extra_byte, 1, 1, f.get()) == 0, errc::dimension_mismatch,
          "trailing bytes after checksum");
  return out;
}

NormStats compute_norm_stats(const FieldSeries& series, const SplitSpec& split) {
  // Training-selection indices.
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < series.n_times(); ++k)
    if (split.train.contains(year_of_unix(series.time(k)))) idx.push_back(k);
  require(!idx.empty(), errc::empty_split, "training split selects no timestamps");

  const std::size_t plane = series.data.h * series.data.w;
  NormStats stats;
  for (std::size_t c = 0; c < series.vars.size(); ++c) {
    double sum = 0.0, sumsq = 0.0;
    std::size_t n = 0;
    for (std::size_t k : idx) {
      const float* slab = series.data.v.data() + (k * series.data.c + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) {
        const double x = slab[p];
        if (!std::isfinite(x)) continue;  // observational gaps stay out of the stats
        sum += x;
        sumsq += x * x;
        ++n;
      }
    }
    require(n > 0, errc::degenerate_channel,
            "channel '" + series.vars[c].name + "' has no finite training values");
    const double mean = sum / static_cast<double>(n);
    double var = sumsq / static_cast<double>(n) - mean * mean;
    if (var < 0) var = 0;
    const double sd = std::sqrt(var);
    require(sd > 0, errc::degenerate_channel,
            "channel '" + series.vars[c].name + "' has zero variance in the training split");
    stats.channels.push_back(series.vars[c].name);
    stats.mean.push_back(mean);
    stats.stddev.push_back(sd);
  }
  return stats;
}

static FieldSeries apply_affine(const FieldSeries& series, const NormStats& stats, bool forward) {
  require(stats.channels.size() == series.vars.size(), errc::channel_mismatch,
          "stats channel count differs from series");
  for (std::size_t c = 0; c < series.vars.size(); ++c)
    require(stats.channels[c] == series.vars[c].name, errc::channel_mismatch,
            "stats channel '" + stats.channels[c] + "' does not match series '" +
                series.vars[c].name + "'");

  FieldSeries out = series;
  const std::size_t plane = series.data.h * series.data.w;
  for (std::size_t k = 0; k < series.data.t; ++k) {
    for (std::size_t c = 0; c < series.data.c; ++c) {
      float* slab = out.data.v.data() + (k * series.data.c + c) * plane;
      const double mu = stats.mean[c];
      const double sd = stats.stddev[c];
      for (std::size_t p = 0; p < plane; ++p) {
        const double x = slab[p];
        slab[p] = static_cast<float>(forward ? (x - mu) / sd : x * sd + mu);
      }
    }
  }
  return out;
}

FieldSeries normalize(const FieldSeries& series, const NormStats& stats) {
  return apply_affine(series, stats, true);
}

FieldSeries denormalize(const FieldSeries& series, const NormStats& stats) {
  return apply_affine(series, stats, false);
}

FieldSeries slice_time(const FieldSeries& series, std::size_t first, std::size_t last) {
  require(first <= last && last < series.n_times(), errc::dimension_mismatch,
          "time slice out of range");
  FieldSeries out;
  out.grid = series.grid;
  out.vars = series.vars;
  out.extra = series.extra;
  out.time_step_seconds = series.time_step_seconds;
  out.time_start_unix = series.time(first);
  const std::size_t nt = last - first + 1;
  out.data = Tensor4(nt, series.data.c, series.data.h, series.data.w);
  const std::size_t slab = series.data.c * series.data.h * series.data.w;
  std::memcpy(out.data.v.data(), series.data.v.data() + first * slab, nt * slab * sizeof(float));
  return out;
}

SplitSeries split_by_years(const FieldSeries& series, const SplitSpec& spec) {
  const YearRange ranges[3] = {spec.train, spec.val, spec.test};
  for (int a = 0; a < 3; ++a) {
    require(ranges[a].first <= ranges[a].last, errc::bad_config, "year range reversed");
    for (int b = a + 1; b < 3; ++b)
      require(ranges[a].last < ranges[b].first || ranges[b].last < ranges[a].first,
              errc::overlapping_ranges, "split year ranges overlap");
  }

  auto select = [&](const YearRange& r, const char* which) {
    std::size_t first = series.n_times(), last = 0;
    bool any = false;
    for (std::size_t k = 0; k < series.n_times(); ++k) {
      if (!r.contains(year_of_unix(series.time(k)))) continue;
      if (!any) first = k;
      last = k;
      any = true;
    }
    require(any, errc::empty_split, std::string(which) + " split selects no timestamps");
    return slice_time(series, first, last);
  };

  SplitSeries out{select(spec.train, "train"), select(spec.val, "val"), select(spec.test, "test")};
  return out;
}

}  // namespace clbench
