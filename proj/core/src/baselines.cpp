#include "clbench/baselines.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "clbench/error.hpp"
#include "clbench/parallel.hpp"

#include "json.hpp"

namespace clbench {

ClimatologyModel climatology_forecast(const FieldSeries& train_series,
                                      const std::vector<std::string>& out_vars) {
  require(train_series.n_times() >= 1, errc::empty_split, "training series is empty");
  ClimatologyModel model;
  model.grid = train_series.grid;
  model.vars = out_vars;
  for (const auto& name : out_vars) {
    const std::size_t idx = train_series.var_index(name);
    model.maps.push_back(temporal_mean(train_series.channel(idx), "train-split"));
  }
  return model;
}

std::vector<float> climatology_predict(const ClimatologyModel& model, std::size_t n) {
  const std::size_t h = model.grid.h(), w = model.grid.w(), plane = h * w;
  std::vector<float> out(n * model.maps.size() * plane);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t c = 0; c < model.maps.size(); ++c)
      std::memcpy(out.data() + (k * model.maps.size() + c) * plane, model.maps[c].v.data(),
                  plane * sizeof(float));
  return out;
}

std::vector<float> persistence_forecast(const SampleSet& samples,
                                        const std::vector<std::string>& out_vars) {
  require(samples.h_in == samples.h_out && samples.w_in == samples.w_out,
          errc::dimension_mismatch, "persistence needs matching input/target grids");
  std::vector<std::size_t> src;
  for (const auto& name : out_vars) {
    const std::string at_zero = offset_channel_name(name, 0);
    bool found = false;
    for (std::size_t i = 0; i < samples.input_channels.size(); ++i) {
      if (samples.input_channels[i] == at_zero || samples.input_channels[i] == name) {
        src.push_back(i);
        found = true;
        break;
      }
    }
    require(found, errc::missing_variable,
            "output variable '" + name + "' has no offset-0 input channel");
  }
  const std::size_t plane = samples.h_in * samples.w_in;
  std::vector<float> out(samples.n * out_vars.size() * plane);
  for (std::size_t k = 0; k < samples.n; ++k)
    for (std::size_t c = 0; c < src.size(); ++c)
      std::memcpy(out.data() + (k * out_vars.size() + c) * plane,
                  samples.input(k) + src[c] * plane, plane * sizeof(float));
  return out;
}

// --- Linear regression -------------------------------------------------------

namespace {

// Dense SPD solve, in-place Cholesky. Returns false when the matrix is not
// positive definite.
bool cholesky_solve(std::vector<double>& a, std::size_t n, std::vector<double>& rhs,
                    std::size_t n_rhs) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (d <= 0.0 || !std::isfinite(d)) return false;
    const double root = std::sqrt(d);
    a[j * n + j] = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / root;
    }
  }
  for (std::size_t r = 0; r < n_rhs; ++r) {
    double* b = rhs.data() + r * n;
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
      b[i] = s / a[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
      b[ii] = s / a[ii * n + ii];
    }
  }
  return true;
}

// Stencil features for pixel (i, j) of one sample: all input channels over
// the k x k neighborhood, then the constant. Longitude wraps on periodic
// grids; stencil cells that fall off the grid (latitude rows always,
// longitude columns when not periodic) are zeroed and their coefficients
// pinned at zero, mirroring how missing neighbors are omitted elsewhere.
void gather_features(const float* input, std::size_t c_in, std::size_t h, std::size_t w,
                     std::size_t i, std::size_t j, std::size_t k, bool periodic,
                     double* out) {
  const std::int64_t r = static_cast<std::int64_t>(k) / 2;
  std::size_t f = 0;
  for (std::int64_t di = -r; di <= r; ++di)
    for (std::int64_t dj = -r; dj <= r; ++dj) {
      const std::int64_t ii = static_cast<std::int64_t>(i) + di;
      std::int64_t jj = static_cast<std::int64_t>(j) + dj;
      bool valid = ii >= 0 && ii < static_cast<std::int64_t>(h);
      if (periodic) {
        const std::int64_t m = static_cast<std::int64_t>(w);
        jj = ((jj % m) + m) % m;
      } else if (jj < 0 || jj >= static_cast<std::int64_t>(w)) {
        valid = false;
      }
      for (std::size_t c = 0; c < c_in; ++c, ++f)
        out[f] = valid ? input[c * h * w + static_cast<std::size_t>(ii) * w +
                               static_cast<std::size_t>(jj)]
                       : 0.0;
    }
  out[f] = 1.0;
}

// Feature indices usable at pixel (i, j): the off-grid stencil cells above.
std::vector<std::size_t> valid_features(std::size_t c_in, std::size_t h, std::size_t w,
                                        std::size_t i, std::size_t j, std::size_t k,
                                        bool periodic) {
  const std::int64_t r = static_cast<std::int64_t>(k) / 2;
  std::vector<std::size_t> idx;
  std::size_t f = 0;
  for (std::int64_t di = -r; di <= r; ++di)
    for (std::int64_t dj = -r; dj <= r; ++dj) {
      const std::int64_t ii = static_cast<std::int64_t>(i) + di;
      const std::int64_t jj = static_cast<std::int64_t>(j) + dj;
      bool valid = ii >= 0 && ii < static_cast<std::int64_t>(h);
      if (!periodic && (jj < 0 || jj >= static_cast<std::int64_t>(w))) valid = false;
      for (std::size_t c = 0; c < c_in; ++c, ++f)
        if (valid) idx.push_back(f);
    }
  idx.push_back(f);  // intercept
  return idx;
}

void fit_local(const SampleSet& samples, const LatWeights& weights, const LinregConfig& cfg,
               LinearModel& model) {
  const std::size_t h = samples.h_in, w = samples.w_in, c_in = samples.c_in;
  const std::size_t c_out = samples.c_out, n = samples.n;
  const std::size_t F = c_in * cfg.stencil * cfg.stencil + 1;
  require(cfg.ridge_lambda > 0.0 || n > F, errc::insufficient_samples,
          "need more samples than features, or a positive ridge");

  model.coef.assign(h * w * c_out * F, 0.0);

  std::vector<std::string> failures(h * w);
  parallel_for(h * w, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(F);
    for (std::size_t p = begin; p < end; ++p) {
      const std::size_t i = p / w, j = p % w;
      const std::vector<std::size_t> live =
          valid_features(c_in, h, w, i, j, cfg.stencil, model.periodic_lon);
      const std::size_t Fv = live.size();
      std::vector<double> gram(Fv * Fv, 0.0);
      std::vector<double> rhs(c_out * Fv, 0.0);
      for (std::size_t s = 0; s < n; ++s) {
        gather_features(samples.input(s), c_in, h, w, i, j, cfg.stencil, model.periodic_lon,
                        x.data());
        for (std::size_t a = 0; a < Fv; ++a) {
          const double xa = x[live[a]];
          for (std::size_t b = a; b < Fv; ++b) gram[a * Fv + b] += xa * x[live[b]];
          for (std::size_t co = 0; co < c_out; ++co)
            rhs[co * Fv + a] += xa * samples.target(s)[co * h * w + p];
        }
      }
      for (std::size_t a = 0; a < Fv; ++a)
        for (std::size_t b = 0; b < a; ++b) gram[a * Fv + b] = gram[b * Fv + a];
      const double lam = cfg.lat_weighted_loss && cfg.ridge_lambda > 0.0
                             ? cfg.ridge_lambda / weights.w[i]
                             : cfg.ridge_lambda;
      // Intercept (last live feature) stays unpenalized.
      for (std::size_t a = 0; a + 1 < Fv; ++a) gram[a * Fv + a] += lam;
      if (!cholesky_solve(gram, Fv, rhs, c_out)) {
        failures[p] = "singular normal matrix at pixel " + std::to_string(p) +
                      " (add a ridge term)";
        continue;
      }
      for (std::size_t co = 0; co < c_out; ++co)
        for (std::size_t a = 0; a < Fv; ++a)
          model.coef[(p * c_out + co) * F + live[a]] = rhs[co * Fv + a];
    }
  });
  for (const auto& msg : failures)
    require(msg.empty(), errc::singular_system, msg);
}

void fit_global(const SampleSet& samples, const LatWeights& weights, const LinregConfig& cfg,
                LinearModel& model) {
  const std::size_t h = samples.h_in, w = samples.w_in;
  const std::size_t n = samples.n;
  const std::size_t F = samples.c_in * h * w + 1;
  const std::size_t dims = samples.c_out * h * w;
  model.coef.assign(dims * F, 0.0);

  // Feature matrix rows are the flattened inputs plus a trailing 1.
  auto feature = [&](std::size_t s, std::size_t f) -> double {
    return f + 1 == F ? 1.0 : samples.input(s)[f];
  };
  auto apply_normal = [&](const std::vector<double>& beta, double lam,
                          std::vector<double>& out) {
    // out = (X^T X + lam P) beta with P zero on the intercept row,
    // via t = X beta then X^T t.
    std::vector<double> t(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      double acc = beta[F - 1];
      const float* in = samples.input(s);
      for (std::size_t f = 0; f + 1 < F; ++f) acc += in[f] * beta[f];
      t[s] = acc;
    }
    for (std::size_t f = 0; f < F; ++f) {
      double acc = 0.0;
      for (std::size_t s = 0; s < n; ++s) acc += feature(s, f) * t[s];
      out[f] = acc + (f + 1 < F ? lam * beta[f] : 0.0);
    }
  };

  parallel_for(dims, [&](std::size_t begin, std::size_t end) {
    std::vector<double> b(F), r(F), p(F), ap(F), beta(F);
    for (std::size_t d = begin; d < end; ++d) {
      const std::size_t pixel = d % (h * w);
      const std::size_t row = pixel / w;
      const double lam = cfg.lat_weighted_loss && cfg.ridge_lambda > 0.0
                             ? cfg.ridge_lambda / weights.w[row]
                             : cfg.ridge_lambda;
      for (std::size_t f = 0; f < F; ++f) {
        double acc = 0.0;
        for (std::size_t s = 0; s < n; ++s) acc += feature(s, f) * samples.target(s)[d];
        b[f] = acc;
      }
      double bnorm = 0.0;
      for (double v : b) bnorm += v * v;
      bnorm = std::sqrt(bnorm);
      if (bnorm == 0.0) {
        std::fill(beta.begin(), beta.end(), 0.0);
      } else {
        std::fill(beta.begin(), beta.end(), 0.0);
        r = b;
        p = r;
        double rs = 0.0;
        for (double v : r) rs += v * v;
        for (std::size_t it = 0; it < cfg.cg_max_iters && std::sqrt(rs) > cfg.cg_tol * bnorm;
             ++it) {
          apply_normal(p, lam, ap);
          double pap = 0.0;
          for (std::size_t f = 0; f < F; ++f) pap += p[f] * ap[f];
          if (pap <= 0.0) break;
          const double alpha = rs / pap;
          for (std::size_t f = 0; f < F; ++f) {
            beta[f] += alpha * p[f];
            r[f] -= alpha * ap[f];
          }
          double rs_new = 0.0;
          for (double v : r) rs_new += v * v;
          const double ratio = rs_new / rs;
          rs = rs_new;
          for (std::size_t f = 0; f < F; ++f) p[f] = r[f] + ratio * p[f];
        }
      }
      std::memcpy(model.coef.data() + d * F, beta.data(), F * sizeof(double));
    }
  });
}

}  // namespace

LinearModel linreg_fit(const SampleSet& samples, const LatWeights& weights,
                       const LinregConfig& config) {
  require(samples.h_in == samples.h_out && samples.w_in == samples.w_out,
          errc::dimension_mismatch, "linreg needs matching input/target grids");
  require(config.stencil % 2 == 1 && config.stencil >= 1, errc::bad_config,
          "stencil size must be odd");
  require(weights.w.size() == samples.h_in, errc::dimension_mismatch,
          "latitude weights do not match grid height");
  require(samples.n >= 1, errc::empty_result, "no samples to fit");

  LinearModel model;
  model.config = config;
  model.c_in = samples.c_in;
  model.h = samples.h_in;
  model.w = samples.w_in;
  model.c_out = samples.c_out;
  model.input_channels = samples.input_channels;
  model.target_channels = samples.target_channels;

  if (config.mode == LinregConfig::Mode::local_stencil)
    fit_local(samples, weights, config, model);
  else
    fit_global(samples, weights, config, model);
  return model;
}

std::vector<float> linreg_predict_raw(const LinearModel& model, const float* inputs,
                                      std::size_t n) {
  const std::size_t h = model.h, w = model.w, plane = h * w;
  const std::size_t F = model.features();
  std::vector<float> out(n * model.c_out * plane);

  if (model.config.mode == LinregConfig::Mode::local_stencil) {
    const std::size_t k = model.config.stencil;
    parallel_for(plane, [&](std::size_t begin, std::size_t end) {
      std::vector<double> x(F);
      for (std::size_t p = begin; p < end; ++p) {
        const std::size_t i = p / w, j = p % w;
        for (std::size_t s = 0; s < n; ++s) {
          gather_features(inputs + s * model.c_in * plane, model.c_in, h, w, i, j, k,
                          model.periodic_lon, x.data());
          for (std::size_t co = 0; co < model.c_out; ++co) {
            const double* beta = model.coef.data() + (p * model.c_out + co) * F;
            double acc = 0.0;
            for (std::size_t f = 0; f < F; ++f) acc += beta[f] * x[f];
            out[(s * model.c_out + co) * plane + p] = static_cast<float>(acc);
          }
        }
      }
    });
  } else {
    const std::size_t dims = model.c_out * plane;
    parallel_for(dims, [&](std::size_t begin, std::size_t end) {
      for (std::size_t d = begin; d < end; ++d) {
        const double* beta = model.coef.data() + d * F;
        for (std::size_t s = 0; s < n; ++s) {
          const float* in = inputs + s * model.c_in * plane;
          double acc = beta[F - 1];
          for (std::size_t f = 0; f + 1 < F; ++f) acc += beta[f] * in[f];
          out[s * dims + d] = static_cast<float>(acc);
        }
      }
    });
  }
  return out;
}

std::vector<float> linreg_predict(const LinearModel& model, const SampleSet& samples) {
  require(samples.c_in == model.c_in && samples.h_in == model.h && samples.w_in == model.w,
          errc::dimension_mismatch, "sample input shape differs from the fitted model");
  require(samples.input_channels == model.input_channels, errc::channel_mismatch,
          "sample input channels differ from the fitted model");
  return linreg_predict_raw(model, samples.inputs.data(), samples.n);
}

// --- Model persistence -------------------------------------------------------

namespace {

constexpr std::array<unsigned char, 4> kModelMagic = {0x43, 0x4C, 0x4C, 0x4D};  // "CLLM"
constexpr std::uint16_t kModelVersion = 1;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void save_linear_model(const LinearModel& model, const std::string& path) {
  nlohmann::json header;
  header["mode"] =
      model.config.mode == LinregConfig::Mode::local_stencil ? "local-stencil" : "global";
  header["stencil"] = model.config.stencil;
  header["ridge_lambda"] = model.config.ridge_lambda;
  header["lat_weighted_loss"] = model.config.lat_weighted_loss;
  header["dims"] = {model.c_in, model.h, model.w, model.c_out};
  header["periodic_lon"] = model.periodic_lon;
  header["input_channels"] = model.input_channels;
  header["target_channels"] = model.target_channels;
  header["coef_count"] = model.coef.size();
  const std::string hs = header.dump();

  FilePtr f(std::fopen(path.c_str(), "wb"));
  require(f != nullptr, errc::io_failure, "cannot open '" + path + "' for writing");
  auto write_all = [&](const void* p, std::size_t nbytes) {
    require(std::fwrite(p, 1, nbytes, f.get()) == nbytes, errc::io_failure,
            "short write to '" + path + "'");
  };
  write_all(kModelMagic.data(), 4);
  const std::uint16_t ver = kModelVersion;
  unsigned char ver_le[2] = {static_cast<unsigned char>(ver & 0xFF),
                             static_cast<unsigned char>(ver >> 8)};
  write_all(ver_le, 2);
  const std::uint32_t hl = static_cast<std::uint32_t>(hs.size());
  unsigned char hl_le[4] = {static_cast<unsigned char>(hl & 0xFF),
                            static_cast<unsigned char>((hl >> 8) & 0xFF),
                            static_cast<unsigned char>((hl >> 16) & 0xFF),
                            static_cast<unsigned char>((hl >> 24) & 0xFF)};
  write_all(hl_le, 4);
  write_all(hs.data(), hs.size());
  write_all(model.coef.data(), model.coef.size() * sizeof(double));
  const std::uint32_t crc = crc32(model.coef.data(), model.coef.size() * sizeof(double));
  unsigned char crc_le[4] = {static_cast<unsigned char>(crc & 0xFF),
                             static_cast<unsigned char>((crc >> 8) & 0xFF),
                             static_cast<unsigned char>((crc >> 16) & 0xFF),
                             static_cast<unsigned char>((crc >> 24) & 0xFF)};
  write_all(crc_le, 4);
}

LinearModel load_linear_model(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  require(f != nullptr, errc::io_failure, "cannot open '" + path + "'");
  std::array<unsigned char, 10> head{};
  require(std::fread(head.data(), 1, head.size(), f.get()) == head.size(),
          errc::truncated_payload, "model file shorter than fixed header");
  require(std::memcmp(head.data(), kModelMagic.data(), 4) == 0, errc::bad_magic,
          "'" + path + "' is not a CLLM model file");
  const std::uint16_t ver = static_cast<std::uint16_t>(head[4] | (head[5] << 8));
  require(ver == kModelVersion, errc::unsupported_version,
          "model version " + std::to_string(ver));
  const std::uint32_t hl = static_cast<std::uint32_t>(head[6]) | (head[7] << 8) |
                           (head[8] << 16) |
                           (static_cast<std::uint32_t>(head[9]) << 24);
  std::string hs(hl, '\0');
  require(std::fread(hs.data(), 1, hl, f.get()) == hl, errc::truncated_payload,
          "model header shorter than header_len");

  LinearModel model;
  try {
    const nlohmann::json header = nlohmann::json::parse(hs);
    model.config.mode = header.at("mode").get<std::string>() == "global"
                            ? LinregConfig::Mode::global
                            : LinregConfig::Mode::local_stencil;
    model.config.stencil = header.at("stencil").get<std::size_t>();
    model.config.ridge_lambda = header.at("ridge_lambda").get<double>();
    model.config.lat_weighted_loss = header.at("lat_weighted_loss").get<bool>();
    const auto& dims = header.at("dims");
    model.c_in = dims[0].get<std::size_t>();
    model.h = dims[1].get<std::size_t>();
    model.w = dims[2].get<std::size_t>();
    model.c_out = dims[3].get<std::size_t>();
    model.periodic_lon = header.at("periodic_lon").get<bool>();
    model.input_channels = header.at("input_channels").get<std::vector<std::string>>();
    model.target_channels = header.at("target_channels").get<std::vector<std::string>>();
    model.coef.resize(header.at("coef_count").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    fail(errc::dimension_mismatch, std::string("malformed model header: ") + e.what());
  }
  const std::size_t bytes = model.coef.size() * sizeof(double);
  require(std::fread(model.coef.data(), 1, bytes, f.get()) == bytes, errc::truncated_payload,
          "model payload shorter than coef_count requires");
  std::array<unsigned char, 4> tail{};
  require(std::fread(tail.data(), 1, 4, f.get()) == 4, errc::truncated_payload,
          "missing model checksum");
  const std::uint32_t stored = static_cast<std::uint32_t>(tail[0]) | (tail[1] << 8) |
                               (tail[2] << 16) |
                               (static_cast<std::uint32_t>(tail[3]) << 24);
  require(stored == crc32(model.coef.data(), bytes), errc::checksum_mismatch,
          "model payload CRC32 mismatch");
  return model;
}

std::vector<float> interp_downscale(const SampleSet& samples, const Grid& src_grid,
                                    const Grid& target, InterpScheme scheme) {
  require(src_grid.h() == samples.h_in && src_grid.w() == samples.w_in,
          errc::dimension_mismatch, "source grid does not match sample inputs");
  const std::size_t plane_in = samples.h_in * samples.w_in;
  const std::size_t plane_out = target.h() * target.w();
  std::vector<float> out(samples.n * samples.c_in * plane_out);
  GridField field;
  field.grid = src_grid;
  field.v.resize(plane_in);
  for (std::size_t s = 0; s < samples.n; ++s)
    for (std::size_t c = 0; c < samples.c_in; ++c) {
      std::memcpy(field.v.data(), samples.input(s) + c * plane_in, plane_in * sizeof(float));
      const GridField res = regrid(field, target, scheme);
      std::memcpy(out.data() + (s * samples.c_in + c) * plane_out, res.v.data(),
                  plane_out * sizeof(float));
    }
  return out;
}

}  // namespace clbench
