#include "clbench/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clbench/error.hpp"

namespace clbench {

namespace {
constexpr double kDegToRad = 0.017453292519943295;

double wrap360(double lon) {
  double r = std::fmod(lon, 360.0);
  if (r < 0) r += 360.0;
  return r;
}
}  // namespace

void Grid::validate() const {
  require(!lats.empty() && !lons.empty(), errc::invariant_violation, "grid must be non-empty");
  for (double lat : lats)
    require(std::abs(lat) <= 90.0, errc::invalid_coordinate,
            "latitude " + std::to_string(lat) + " outside [-90, 90]");
  const bool ascending = lats.size() < 2 || lats[1] > lats[0];
  for (std::size_t i = 1; i < lats.size(); ++i) {
    const bool ok = ascending ? lats[i] > lats[i - 1] : lats[i] < lats[i - 1];
    require(ok, errc::invariant_violation, "latitudes must be strictly monotonic");
  }
  for (std::size_t j = 1; j < lons.size(); ++j)
    require(lons[j] > lons[j - 1], errc::invariant_violation,
            "longitudes must be strictly increasing");
  if (periodic_lon && lons.size() >= 2) {
    const double step = lons[1] - lons[0];
    for (std::size_t j = 1; j < lons.size(); ++j)
      require(std::abs((lons[j] - lons[j - 1]) - step) <= 1e-9, errc::invariant_violation,
              "periodic grid requires uniform longitude spacing");
    require(std::abs(step * static_cast<double>(lons.size()) - 360.0) <= 1e-6,
            errc::invariant_violation, "periodic longitudes must tile 360 degrees");
  }
}

LatWeights make_lat_weights(const Grid& grid) {
  require(!grid.lats.empty(), errc::invariant_violation, "grid has no latitudes");
  std::vector<double> cosines;
  cosines.reserve(grid.lats.size());
  for (double lat : grid.lats) {
    require(std::abs(lat) <= 90.0, errc::invalid_coordinate,
            "latitude " + std::to_string(lat) + " outside [-90, 90]");
    cosines.push_back(std::cos(lat * kDegToRad));
  }
  // Sum in a value-canonical order so reversing the latitude list reverses
  // the weights bit-for-bit.
  std::vector<double> sorted = cosines;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double c : sorted) sum += c;
  const double mean = sum / static_cast<double>(grid.lats.size());
  LatWeights out;
  out.w.reserve(grid.lats.size());
  for (double c : cosines) out.w.push_back(c / mean);
  return out;
}

Grid grid_from_resolution(double deg) {
  require(deg > 0, errc::invalid_resolution, "resolution must be positive");
  const double hF = 180.0 / deg;
  const double wF = 360.0 / deg;
  const double hR = std::round(hF);
  const double wR = std::round(wF);
  require(std::abs(hF - hR) < 1e-9 && std::abs(wF - wR) < 1e-9 && hR >= 1 && wR >= 1,
          errc::invalid_resolution,
          std::to_string(deg) + " does not divide 180 and 360 evenly");
  Grid g;
  const std::size_t h = static_cast<std::size_t>(hR);
  const std::size_t w = static_cast<std::size_t>(wR);
  g.lats.reserve(h);
  g.lons.reserve(w);
  for (std::size_t i = 0; i < h; ++i)
    g.lats.push_back(-90.0 + deg / 2.0 + static_cast<double>(i) * deg);
  for (std::size_t j = 0; j < w; ++j) g.lons.push_back(static_cast<double>(j) * deg);
  g.periodic_lon = true;
  return g;
}

SubgridIndices subgrid_indices(const Grid& grid, const RegionBox& box) {
  require(box.lat_min < box.lat_max, errc::empty_region, "lat_min must be below lat_max");
  SubgridIndices out;
  for (std::size_t i = 0; i < grid.lats.size(); ++i)
    if (grid.lats[i] >= box.lat_min && grid.lats[i] <= box.lat_max) out.rows.push_back(i);

  if (grid.periodic_lon) {
    const double lo = wrap360(box.lon_min);
    const double hi = wrap360(box.lon_max);
    // Full-circle request: a span of 360 degrees or more selects every column.
    const bool full = box.lon_max - box.lon_min >= 360.0;
    if (full) {
      for (std::size_t j = 0; j < grid.lons.size(); ++j) out.cols.push_back(j);
    } else if (lo <= hi) {
      for (std::size_t j = 0; j < grid.lons.size(); ++j) {
        const double lon = wrap360(grid.lons[j]);
        if (lon >= lo && lon <= hi) out.cols.push_back(j);
      }
    } else {
      // Box straddles the wrap seam: take the trailing range first so the
      // selected columns are spatially contiguous west to east.
      for (std::size_t j = 0; j < grid.lons.size(); ++j)
        if (wrap360(grid.lons[j]) >= lo) out.cols.push_back(j);
      for (std::size_t j = 0; j < grid.lons.size(); ++j)
        if (wrap360(grid.lons[j]) <= hi) out.cols.push_back(j);
    }
  } else {
    for (std::size_t j = 0; j < grid.lons.size(); ++j)
      if (grid.lons[j] >= box.lon_min && grid.lons[j] <= box.lon_max) out.cols.push_back(j);
  }

  require(!out.rows.empty() && !out.cols.empty(), errc::empty_region,
          "box selects no grid cells");
  return out;
}

RegionBox conus_box() { return RegionBox{24.5, 50.0, 235.0, 293.5}; }

}  // namespace clbench
