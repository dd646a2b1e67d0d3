#include "clbench/regrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "clbench/error.hpp"
#include "clbench/parallel.hpp"

namespace clbench {

namespace {

double wrap360(double lon) {
  double r = std::fmod(lon, 360.0);
  if (r < 0) r += 360.0;
  return r;
}

double lon_distance(double a, double b, bool periodic) {
  if (!periodic) return std::abs(a - b);
  double d = std::abs(wrap360(a) - wrap360(b));
  return std::min(d, 360.0 - d);
}

// Ascending-order view over latitudes that may be stored descending.
struct AxisView {
  const std::vector<double>& c;
  bool reversed;
  std::size_t size() const { return c.size(); }
  double operator[](std::size_t i) const { return reversed ? c[c.size() - 1 - i] : c[i]; }
  std::size_t source_index(std::size_t i) const { return reversed ? c.size() - 1 - i : i; }
};

AxisView lat_view(const Grid& g) {
  const bool rev = g.lats.size() >= 2 && g.lats[1] < g.lats[0];
  return AxisView{g.lats, rev};
}

// Nearest index along a sorted ascending axis, ties to the smaller value
// of the *source* index.
std::size_t nearest_on_axis(const AxisView& axis, double x) {
  std::size_t best = 0;
  double best_d = std::abs(axis[0] - x);
  for (std::size_t i = 1; i < axis.size(); ++i) {
    const double d = std::abs(axis[i] - x);
    const std::size_t si = axis.source_index(i);
    const std::size_t sb = axis.source_index(best);
    if (d < best_d || (d == best_d && si < sb)) {
      best = i;
      best_d = d;
    }
  }
  return axis.source_index(best);
}

std::size_t nearest_lon(const Grid& g, double lon) {
  std::size_t best = 0;
  double best_d = lon_distance(g.lons[0], lon, g.periodic_lon);
  for (std::size_t j = 1; j < g.lons.size(); ++j) {
    const double d = lon_distance(g.lons[j], lon, g.periodic_lon);
    if (d < best_d) {
      best = j;
      best_d = d;
    }
  }
  return best;
}

// Bracketing pair (i0, i1, frac) along ascending latitudes, clamped at the
// edges.
struct Bracket {
  std::size_t lo, hi;
  double frac;
};

Bracket bracket_lat(const AxisView& axis, double x) {
  const std::size_t n = axis.size();
  if (x <= axis[0]) return {axis.source_index(0), axis.source_index(0), 0.0};
  if (x >= axis[n - 1]) return {axis.source_index(n - 1), axis.source_index(n - 1), 0.0};
  std::size_t i = 0;
  while (i + 1 < n && axis[i + 1] < x) ++i;
  const double span = axis[i + 1] - axis[i];
  const double f = (x - axis[i]) / span;
  return {axis.source_index(i), axis.source_index(i + 1), f};
}

Bracket bracket_lon(const Grid& g, double x) {
  const auto& lons = g.lons;
  const std::size_t n = lons.size();
  if (g.periodic_lon) {
    const double step = n >= 2 ? lons[1] - lons[0] : 360.0;
    double delta = wrap360(x - lons[0]);
    double pos = delta / step;
    std::size_t j0 = static_cast<std::size_t>(std::floor(pos)) % n;
    double f = pos - std::floor(pos);
    std::size_t j1 = (j0 + 1) % n;
    return {j0, j1, f};
  }
  if (x <= lons[0]) return {0, 0, 0.0};
  if (x >= lons[n - 1]) return {n - 1, n - 1, 0.0};
  std::size_t j = 0;
  while (j + 1 < n && lons[j + 1] < x) ++j;
  const double f = (x - lons[j]) / (lons[j + 1] - lons[j]);
  return {j, j + 1, f};
}

}  // namespace

GridField regrid_nearest(const GridField& src, const Grid& target) {
  src.grid.validate();
  target.validate();
  require(src.v.size() == src.grid.h() * src.grid.w(), errc::dimension_mismatch,
          "field size does not match its grid");

  const std::size_t ht = target.h(), wt = target.w(), ws = src.grid.w();
  GridField out;
  out.grid = target;
  out.v.resize(ht * wt);

  const AxisView lats = lat_view(src.grid);
  std::vector<std::size_t> col_of(wt);
  for (std::size_t j = 0; j < wt; ++j) col_of[j] = nearest_lon(src.grid, target.lons[j]);

  parallel_for(ht, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t si = nearest_on_axis(lats, target.lats[i]);
      for (std::size_t j = 0; j < wt; ++j) out.v[i * wt + j] = src.v[si * ws + col_of[j]];
    }
  });
  return out;
}

GridField regrid_bilinear(const GridField& src, const Grid& target) {
  src.grid.validate();
  target.validate();
  require(src.grid.h() >= 2 && src.grid.w() >= 2, errc::source_too_small,
          "bilinear needs a source of at least 2 x 2");
  require(src.v.size() == src.grid.h() * src.grid.w(), errc::dimension_mismatch,
          "field size does not match its grid");

  const std::size_t ht = target.h(), wt = target.w(), ws = src.grid.w();
  GridField out;
  out.grid = target;
  out.v.resize(ht * wt);

  const AxisView lats = lat_view(src.grid);
  std::vector<Bracket> col_br(wt);
  for (std::size_t j = 0; j < wt; ++j) col_br[j] = bracket_lon(src.grid, target.lons[j]);

  parallel_for(ht, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Bracket row = bracket_lat(lats, target.lats[i]);
      for (std::size_t j = 0; j < wt; ++j) {
        const Bracket& col = col_br[j];
        const double v00 = src.v[row.lo * ws + col.lo];
        const double v01 = src.v[row.lo * ws + col.hi];
        const double v10 = src.v[row.hi * ws + col.lo];
        const double v11 = src.v[row.hi * ws + col.hi];
        const double top = v00 * (1.0 - col.frac) + v01 * col.frac;
        const double bot = v10 * (1.0 - col.frac) + v11 * col.frac;
        out.v[i * wt + j] = static_cast<float>(top * (1.0 - row.frac) + bot * row.frac);
      }
    }
  });
  return out;
}

GridField regrid(const GridField& src, const Grid& target, InterpScheme scheme) {
  return scheme == InterpScheme::nearest ? regrid_nearest(src, target)
                                         : regrid_bilinear(src, target);
}

FieldSeries regrid_series(const FieldSeries& src, const Grid& target, InterpScheme scheme) {
  FieldSeries out;
  out.grid = target;
  out.vars = src.vars;
  out.extra = src.extra;
  out.time_start_unix = src.time_start_unix;
  out.time_step_seconds = src.time_step_seconds;
  out.data = Tensor4(src.data.t, src.data.c, target.h(), target.w());

  const std::size_t plane_in = src.data.h * src.data.w;
  const std::size_t plane_out = target.h() * target.w();
  GridField tmp;
  tmp.grid = src.grid;
  tmp.v.resize(plane_in);
  for (std::size_t k = 0; k < src.data.t; ++k) {
    for (std::size_t c = 0; c < src.data.c; ++c) {
      std::memcpy(tmp.v.data(), src.data.v.data() + (k * src.data.c + c) * plane_in,
                  plane_in * sizeof(float));
      GridField res = regrid(tmp, target, scheme);
      std::memcpy(out.data.v.data() + (k * src.data.c + c) * plane_out, res.v.data(),
                  plane_out * sizeof(float));
    }
  }
  return out;
}

namespace {

Grid cropped_grid(const Grid& src, const SubgridIndices& sel) {
  Grid g;
  g.lats.reserve(sel.rows.size());
  for (std::size_t i : sel.rows) g.lats.push_back(src.lats[i]);
  g.lons.reserve(sel.cols.size());
  // A wrapped selection is re-expressed with the leading (eastern-hemisphere
  // tail) columns shifted down by 360 so lons stay strictly increasing.
  bool wrapped = false;
  for (std::size_t j = 1; j < sel.cols.size(); ++j)
    if (sel.cols[j] < sel.cols[j - 1]) wrapped = true;
  if (!wrapped) {
    for (std::size_t j : sel.cols) g.lons.push_back(src.lons[j]);
  } else {
    bool past_seam = false;
    for (std::size_t j = 0; j < sel.cols.size(); ++j) {
      if (j > 0 && sel.cols[j] < sel.cols[j - 1]) past_seam = true;
      g.lons.push_back(past_seam ? src.lons[sel.cols[j]] : src.lons[sel.cols[j]] - 360.0);
    }
  }
  g.periodic_lon = sel.cols.size() == src.lons.size() && src.periodic_lon;
  return g;
}

}  // namespace

GridField crop(const GridField& src, const RegionBox& box) {
  const SubgridIndices sel = subgrid_indices(src.grid, box);
  GridField out;
  out.grid = cropped_grid(src.grid, sel);
  out.v.reserve(sel.rows.size() * sel.cols.size());
  const std::size_t ws = src.grid.w();
  for (std::size_t i : sel.rows)
    for (std::size_t j : sel.cols) out.v.push_back(src.v[i * ws + j]);
  return out;
}

FieldSeries crop_series(const FieldSeries& src, const RegionBox& box) {
  const SubgridIndices sel = subgrid_indices(src.grid, box);
  FieldSeries out;
  out.grid = cropped_grid(src.grid, sel);
  out.vars = src.vars;
  out.extra = src.extra;
  out.time_start_unix = src.time_start_unix;
  out.time_step_seconds = src.time_step_seconds;
  out.data = Tensor4(src.data.t, src.data.c, sel.rows.size(), sel.cols.size());
  const std::size_t ws = src.data.w;
  std::size_t dst = 0;
  for (std::size_t k = 0; k < src.data.t; ++k)
    for (std::size_t c = 0; c < src.data.c; ++c) {
      const float* slab = src.data.v.data() + (k * src.data.c + c) * src.data.h * ws;
      for (std::size_t i : sel.rows)
        for (std::size_t j : sel.cols) out.data.v[dst++] = slab[i * ws + j];
    }
  return out;
}

PaddedField pad_to(const std::vector<float>& field, std::size_t h, std::size_t w,
                   std::size_t h_out, std::size_t w_out, float fill, std::size_t row0,
                   std::size_t col0) {
  require(field.size() == h * w, errc::dimension_mismatch, "field size does not match h*w");
  require(h_out >= h && w_out >= w, errc::pad_too_small, "pad target smaller than source");
  require(row0 + h <= h_out && col0 + w <= w_out, errc::pad_too_small,
          "anchored block exceeds pad target");
  PaddedField out;
  out.h = h_out;
  out.w = w_out;
  out.v.assign(h_out * w_out, fill);
  out.mask.assign(h_out * w_out, 0);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      out.v[(row0 + i) * w_out + (col0 + j)] = field[i * w + j];
      out.mask[(row0 + i) * w_out + (col0 + j)] = 1;
    }
  return out;
}

}  // namespace clbench
