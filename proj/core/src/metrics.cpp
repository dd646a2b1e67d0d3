#include "clbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "clbench/error.hpp"
#include "clbench/rng.hpp"

#include "json.hpp"

namespace clbench {

namespace {

void check_shapes(CubeView a, CubeView b) {
  require(a.n == b.n && a.h == b.h && a.w == b.w, errc::dimension_mismatch,
          "prediction/truth shapes differ");
}

void check_mask(CubeView a, MaskView mask) {
  if (mask.empty()) return;
  require(mask.h == a.h && mask.w == a.w && (mask.n == 1 || mask.n == a.n),
          errc::dimension_mismatch, "mask shape must be HxW or TxHxW");
}

void check_weights(CubeView a, const LatWeights& weights) {
  require(weights.w.size() == a.h, errc::dimension_mismatch,
          "latitude weights do not match field height");
}

constexpr double kInvSqrtPi = 0.5641895835477562869;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kInvSqrt2 = 0.7071067811865475244;

}  // namespace

MetricValue lat_rmse(CubeView pred, CubeView truth, const LatWeights& weights, MaskView mask) {
  check_shapes(pred, truth);
  check_mask(pred, mask);
  check_weights(pred, weights);

  double acc_rmse = 0.0;
  std::size_t defined_steps = 0;
  for (std::size_t k = 0; k < pred.n; ++k) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pred.h; ++i) {
      const double wl = weights.w[i];
      for (std::size_t j = 0; j < pred.w; ++j) {
        if (!mask.at(k, i, j)) continue;
        const double d = static_cast<double>(pred(k, i, j)) - truth(k, i, j);
        num += wl * d * d;
        den += wl;
      }
    }
    if (den <= 0.0) continue;  // fully masked timestep
    acc_rmse += std::sqrt(num / den);
    ++defined_steps;
  }
  if (defined_steps == 0) return MetricValue::undefined();
  return MetricValue::of(acc_rmse / static_cast<double>(defined_steps));
}

MetricValue acc(CubeView pred, CubeView truth, const ClimatologyMap& clim,
                const LatWeights& weights, MaskView mask) {
  check_shapes(pred, truth);
  check_mask(pred, mask);
  check_weights(pred, weights);
  require(clim.h == pred.h && clim.w == pred.w, errc::dimension_mismatch,
          "climatology map shape differs from fields");

  double cross = 0.0, pp = 0.0, tt = 0.0;
  for (std::size_t k = 0; k < pred.n; ++k)
    for (std::size_t i = 0; i < pred.h; ++i) {
      const double wl = weights.w[i];
      for (std::size_t j = 0; j < pred.w; ++j) {
        if (!mask.at(k, i, j)) continue;
        const double c = clim.at(i, j);
        const double a = static_cast<double>(pred(k, i, j)) - c;
        const double b = static_cast<double>(truth(k, i, j)) - c;
        cross += wl * a * b;
        pp += wl * a * a;
        tt += wl * b * b;
      }
    }
  if (pp <= 0.0 || tt <= 0.0) return MetricValue::undefined();
  return MetricValue::of(cross / std::sqrt(pp * tt));
}

MetricValue mean_bias(CubeView pred, CubeView truth, MaskView mask) {
  check_shapes(pred, truth);
  check_mask(pred, mask);
  double sp = 0.0, st = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < pred.n; ++k)
    for (std::size_t i = 0; i < pred.h; ++i)
      for (std::size_t j = 0; j < pred.w; ++j) {
        if (!mask.at(k, i, j)) continue;
        sp += pred(k, i, j);
        st += truth(k, i, j);
        ++count;
      }
  if (count == 0) return MetricValue::undefined();
  return MetricValue::of(sp / static_cast<double>(count) - st / static_cast<double>(count));
}

std::vector<float> per_pixel_mean_bias(CubeView preds, CubeView truths, MaskView mask) {
  check_shapes(preds, truths);
  check_mask(preds, mask);
  std::vector<float> out(preds.h * preds.w, std::numeric_limits<float>::quiet_NaN());
  for (std::size_t i = 0; i < preds.h; ++i)
    for (std::size_t j = 0; j < preds.w; ++j) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t k = 0; k < preds.n; ++k) {
        if (!mask.at(k, i, j)) continue;
        sum += static_cast<double>(preds(k, i, j)) - truths(k, i, j);
        ++count;
      }
      if (count > 0) out[i * preds.w + j] = static_cast<float>(sum / count);
    }
  return out;
}

MetricValue pearson(CubeView pred, CubeView truth, MaskView mask) {
  check_shapes(pred, truth);
  check_mask(pred, mask);
  double sp = 0.0, st = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < pred.n; ++k)
    for (std::size_t i = 0; i < pred.h; ++i)
      for (std::size_t j = 0; j < pred.w; ++j) {
        if (!mask.at(k, i, j)) continue;
        sp += pred(k, i, j);
        st += truth(k, i, j);
        ++count;
      }
  if (count < 2) return MetricValue::undefined();
  const double mp = sp / static_cast<double>(count);
  const double mt = st / static_cast<double>(count);
  double cov = 0.0, vp = 0.0, vt = 0.0;
  for (std::size_t k = 0; k < pred.n; ++k)
    for (std::size_t i = 0; i < pred.h; ++i)
      for (std::size_t j = 0; j < pred.w; ++j) {
        if (!mask.at(k, i, j)) continue;
        const double a = pred(k, i, j) - mp;
        const double b = truth(k, i, j) - mt;
        cov += a * b;
        vp += a * a;
        vt += b * b;
      }
  if (vp <= 0.0 || vt <= 0.0) return MetricValue::undefined();
  return MetricValue::of(cov / std::sqrt(vp * vt));
}

ClimatologyMap temporal_mean(CubeView series, const std::string& provenance) {
  require(series.n >= 1, errc::empty_result, "temporal mean of an empty series");
  ClimatologyMap out;
  out.h = series.h;
  out.w = series.w;
  out.provenance = provenance;
  out.v.resize(series.h * series.w);
  for (std::size_t i = 0; i < series.h; ++i)
    for (std::size_t j = 0; j < series.w; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < series.n; ++k) sum += series(k, i, j);
      out.v[i * series.w + j] = static_cast<float>(sum / static_cast<double>(series.n));
    }
  return out;
}

MetricValue spread(const EnsembleForecast& ens, const LatWeights& weights,
                   VarianceDivisor divisor, MaskView mask) {
  require(ens.m >= 2, errc::insufficient_samples, "spread needs at least 2 members");
  require(weights.w.size() == ens.h, errc::dimension_mismatch,
          "latitude weights do not match ensemble height");
  const double div = divisor == VarianceDivisor::population ? static_cast<double>(ens.m)
                                                            : static_cast<double>(ens.m - 1);
  double total = 0.0;
  std::size_t defined_steps = 0;
  for (std::size_t k = 0; k < ens.n; ++k) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ens.h; ++i) {
      const double wl = weights.w[i];
      for (std::size_t j = 0; j < ens.w; ++j) {
        if (!mask.empty() && !mask.at(k, i, j)) continue;
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t mi = 0; mi < ens.m; ++mi) {
          const double x = ens.at(mi, k, i, j);
          sum += x;
          sumsq += x * x;
        }
        const double mean = sum / static_cast<double>(ens.m);
        double var = (sumsq - sum * mean) / div;
        if (var < 0) var = 0;
        num += wl * var;
        den += wl;
      }
    }
    if (den <= 0.0) continue;
    total += std::sqrt(num / den);
    ++defined_steps;
  }
  if (defined_steps == 0) return MetricValue::undefined();
  return MetricValue::of(total / static_cast<double>(defined_steps));
}

std::vector<float> ensemble_mean(const EnsembleForecast& ens) {
  std::vector<float> out(ens.n * ens.h * ens.w);
  const std::size_t slab = ens.n * ens.h * ens.w;
  for (std::size_t x = 0; x < slab; ++x) {
    double sum = 0.0;
    for (std::size_t mi = 0; mi < ens.m; ++mi) sum += ens.v[mi * slab + x];
    out[x] = static_cast<float>(sum / static_cast<double>(ens.m));
  }
  return out;
}

MetricValue spread_skill_ratio(const EnsembleForecast& ens, CubeView truth,
                               const LatWeights& weights, VarianceDivisor divisor,
                               MaskView mask) {
  const MetricValue s = spread(ens, weights, divisor, mask);
  const std::vector<float> mean = ensemble_mean(ens);
  const MetricValue skill = lat_rmse(CubeView(mean.data(), ens.n, ens.h, ens.w), truth,
                                     weights, mask);
  if (!s.defined || !skill.defined || skill.value <= 0.0) return MetricValue::undefined();
  return MetricValue::of(s.value / skill.value);
}

double crps_gaussian_point(double mu, double sigma, double x) {
  const double z = (x - mu) / sigma;
  const double cdf = 0.5 * (1.0 + std::erf(z * kInvSqrt2));
  const double pdf = kInvSqrt2Pi * std::exp(-0.5 * z * z);
  return sigma * (z * (2.0 * cdf - 1.0) + 2.0 * pdf - kInvSqrtPi);
}

MetricValue crps_gaussian(const GaussianForecast& fc, CubeView truth, MaskView mask,
                          bool lat_weighted, const LatWeights* weights) {
  require(fc.n == truth.n && fc.h == truth.h && fc.w == truth.w, errc::dimension_mismatch,
          "forecast/truth shapes differ");
  check_mask(truth, mask);
  if (lat_weighted)
    require(weights != nullptr && weights->w.size() == fc.h, errc::dimension_mismatch,
            "latitude weights required for the weighted aggregate");
  double num = 0.0, den = 0.0;
  const std::size_t plane = fc.h * fc.w;
  for (std::size_t k = 0; k < fc.n; ++k)
    for (std::size_t i = 0; i < fc.h; ++i) {
      const double wl = lat_weighted ? weights->w[i] : 1.0;
      for (std::size_t j = 0; j < fc.w; ++j) {
        if (!mask.at(k, i, j)) continue;
        const double sigma = fc.sigma[k * plane + i * fc.w + j];
        require(sigma > 0.0, errc::invariant_violation, "sigma must be positive");
        num += wl * crps_gaussian_point(fc.mu[k * plane + i * fc.w + j], sigma, truth(k, i, j));
        den += wl;
      }
    }
  if (den <= 0.0) return MetricValue::undefined();
  return MetricValue::of(num / den);
}

std::vector<std::uint64_t> rank_histogram(const EnsembleForecast& ens, CubeView truth,
                                          MaskView mask, std::uint64_t rng_seed) {
  require(ens.m >= 1, errc::insufficient_samples, "rank histogram needs at least 1 member");
  require(ens.n == truth.n && ens.h == truth.h && ens.w == truth.w, errc::dimension_mismatch,
          "ensemble/truth shapes differ");
  check_mask(truth, mask);
  std::vector<std::uint64_t> counts(ens.m + 1, 0);
  Rng rng = Rng(rng_seed).stream("rank-ties");
  for (std::size_t k = 0; k < ens.n; ++k)
    for (std::size_t i = 0; i < ens.h; ++i)
      for (std::size_t j = 0; j < ens.w; ++j) {
        if (!mask.at(k, i, j)) continue;
        const double x = truth(k, i, j);
        std::size_t below = 0, ties = 0;
        for (std::size_t mi = 0; mi < ens.m; ++mi) {
          const double v = ens.at(mi, k, i, j);
          if (v < x)
            ++below;
          else if (v == x)
            ++ties;
        }
        std::size_t rank = below;
        if (ties > 0) rank += static_cast<std::size_t>(rng.uniform_index(ties + 1));
        ++counts[rank];
      }
  return counts;
}

double global_mean(const float* field, std::size_t h, std::size_t w, const LatWeights& weights) {
  double sum = 0.0;
  for (std::size_t i = 0; i < h; ++i) {
    const double wl = weights.w[i];
    for (std::size_t j = 0; j < w; ++j) sum += wl * field[i * w + j];
  }
  return sum / static_cast<double>(h * w);
}

namespace {

double truth_global_mean_over_time(CubeView truth, const LatWeights& weights) {
  double s = 0.0;
  for (std::size_t k = 0; k < truth.n; ++k) s += global_mean(truth.slab(k), truth.h, truth.w, weights);
  return s / static_cast<double>(truth.n);
}

}  // namespace

MetricValue nrmse_s(CubeView pred, CubeView truth, const LatWeights& weights) {
  check_shapes(pred, truth);
  check_weights(pred, weights);
  const double denom = truth_global_mean_over_time(truth, weights);
  if (denom == 0.0) return MetricValue::undefined();

  std::vector<double> diff(pred.h * pred.w, 0.0);
  for (std::size_t k = 0; k < pred.n; ++k)
    for (std::size_t i = 0; i < pred.h; ++i)
      for (std::size_t j = 0; j < pred.w; ++j)
        diff[i * pred.w + j] += static_cast<double>(pred(k, i, j)) - truth(k, i, j);

  double wsum = 0.0;
  for (std::size_t i = 0; i < pred.h; ++i) {
    const double wl = weights.w[i];
    for (std::size_t j = 0; j < pred.w; ++j) {
      const double d = diff[i * pred.w + j] / static_cast<double>(pred.n);
      wsum += wl * d * d;
    }
  }
  const double spatial = std::sqrt(wsum / static_cast<double>(pred.h * pred.w));
  return MetricValue::of(spatial / denom);
}

MetricValue nrmse_g(CubeView pred, CubeView truth, const LatWeights& weights) {
  check_shapes(pred, truth);
  check_weights(pred, weights);
  const double denom = truth_global_mean_over_time(truth, weights);
  if (denom == 0.0) return MetricValue::undefined();
  double sum = 0.0;
  for (std::size_t k = 0; k < pred.n; ++k) {
    const double d = global_mean(pred.slab(k), pred.h, pred.w, weights) -
                     global_mean(truth.slab(k), truth.h, truth.w, weights);
    sum += d * d;
  }
  return MetricValue::of(std::sqrt(sum / static_cast<double>(pred.n)) / denom);
}

MetricValue nrmse_total(CubeView pred, CubeView truth, const LatWeights& weights, double alpha) {
  const MetricValue s = nrmse_s(pred, truth, weights);
  const MetricValue g = nrmse_g(pred, truth, weights);
  if (!s.defined || !g.defined) return MetricValue::undefined();
  return MetricValue::of(s.value + alpha * g.value);
}

NanMasked apply_nan_mask(CubeView truth, CubeView pred) {
  check_shapes(pred, truth);
  NanMasked out;
  const std::size_t total = truth.n * truth.h * truth.w;
  out.truth.resize(total);
  out.pred.resize(total);
  out.mask.resize(total);
  std::size_t x = 0;
  for (std::size_t k = 0; k < truth.n; ++k)
    for (std::size_t i = 0; i < truth.h; ++i)
      for (std::size_t j = 0; j < truth.w; ++j, ++x) {
        const float t = truth(k, i, j);
        const bool valid = !std::isnan(t);
        out.mask[x] = valid ? 1 : 0;
        out.truth[x] = valid ? t : 0.0f;
        out.pred[x] = valid ? pred(k, i, j) : 0.0f;
      }
  return out;
}

// --- Report serialization ----------------------------------------------------

std::string report_to_json(const MetricReport& report) {
  nlohmann::json doc;
  doc["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json row = {{"metric", r.metric},       {"variable", r.variable},
                          {"lead_hours", r.lead_hours}, {"split", r.split},
                          {"mask_id", r.mask_id},     {"value", r.value},
                          {"defined", r.defined}};
    if (!r.protocol.empty()) row["protocol"] = r.protocol;
    if (r.extrapolated) row["extrapolated"] = true;
    if (!r.climatology.empty()) row["climatology"] = r.climatology;
    doc["rows"].push_back(std::move(row));
  }
  doc["maps"] = nlohmann::json::array();
  for (const auto& m : report.maps) {
    doc["maps"].push_back({{"name", m.name},
                           {"variable", m.variable},
                           {"h", m.h},
                           {"w", m.w},
                           {"values", m.v},
                           {"lats", m.grid.lats},
                           {"lons", m.grid.lons},
                           {"periodic_lon", m.grid.periodic_lon}});
  }
  doc["histograms"] = nlohmann::json::array();
  for (const auto& hgram : report.histograms)
    doc["histograms"].push_back(
        {{"name", hgram.name}, {"variable", hgram.variable}, {"counts", hgram.counts}});
  return doc.dump(2);
}

MetricReport report_from_json(const std::string& text) {
  MetricReport out;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    for (const auto& row : doc.at("rows")) {
      ReportRow r;
      r.metric = row.at("metric").get<std::string>();
      r.variable = row.at("variable").get<std::string>();
      r.lead_hours = row.at("lead_hours").get<int>();
      r.split = row.at("split").get<std::string>();
      r.mask_id = row.at("mask_id").get<std::string>();
      r.value = row.at("value").get<double>();
      r.defined = row.at("defined").get<bool>();
      r.protocol = row.value("protocol", "");
      r.extrapolated = row.value("extrapolated", false);
      r.climatology = row.value("climatology", "");
      out.rows.push_back(std::move(r));
    }
    for (const auto& m : doc.value("maps", nlohmann::json::array())) {
      ReportMap rm;
      rm.name = m.at("name").get<std::string>();
      rm.variable = m.at("variable").get<std::string>();
      rm.h = m.at("h").get<std::size_t>();
      rm.w = m.at("w").get<std::size_t>();
      rm.v = m.at("values").get<std::vector<float>>();
      rm.grid.lats = m.value("lats", std::vector<double>{});
      rm.grid.lons = m.value("lons", std::vector<double>{});
      rm.grid.periodic_lon = m.value("periodic_lon", false);
      out.maps.push_back(std::move(rm));
    }
    for (const auto& hg : doc.value("histograms", nlohmann::json::array())) {
      ReportHistogram rh;
      rh.name = hg.at("name").get<std::string>();
      rh.variable = hg.at("variable").get<std::string>();
      rh.counts = hg.at("counts").get<std::vector<std::uint64_t>>();
      out.histograms.push_back(std::move(rh));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_config, std::string("malformed report JSON: ") + e.what());
  }
  return out;
}

std::string report_to_csv(const MetricReport& report) {
  std::ostringstream out;
  out << "metric,variable,lead_hours,split,mask_id,value,defined\n";
  out.setf(std::ios::fmtflags(0), std::ios::floatfield);
  out.precision(17);
  for (const auto& r : report.rows) {
    out << r.metric << ',' << r.variable << ',' << r.lead_hours << ',' << r.split << ','
        << r.mask_id << ',' << r.value << ',' << (r.defined ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace clbench
